"""Local solubility of the surface at the real place and at odd primes, and
the admissible descent data (torsor signs and exponents) at those places.

A torsor is indexed by e = (e1, e2) with e1 e2 = m n f^2.  Over the reals
only the common sign of e1, e2 matters; at a prime p = 3 mod 4 only the pair
of exponents (v_p(e1), v_p(e2)) in {0, 1}^2 matters.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .arith import _legendre_unchecked, factorize, split_valuation
from .model import CanonicalSurface
from .twoadic import x_soluble_at_2

__all__ = [
    "Place",
    "INFINITY",
    "LocalVerdict",
    "InternalInconsistency",
    "real_soluble",
    "x_soluble_at_odd_p",
    "x_locally_soluble",
    "torsor_real_signs",
    "torsor_exponent_set",
    "analyzed_primes",
]


class InternalInconsistency(AssertionError):
    """A result that the theory says cannot happen."""


@dataclass(frozen=True, order=True)
class Place:
    p: int = 0  # 0 stands for the real place

    @property
    def is_infinite(self) -> bool:
        return self.p == 0

    def __str__(self) -> str:
        return "inf" if self.p == 0 else str(self.p)


INFINITY = Place(0)


@dataclass(frozen=True)
class LocalVerdict:
    soluble: bool
    obstruction: Optional[Place] = None


def _bracket(n: int, p: int) -> int:
    e, u = split_valuation(n, p)
    return 1 if e % 2 else _legendre_unchecked(u, p)


def _v(n: int, p: int) -> int:
    return split_valuation(n, p)[0]


def real_soluble(s: CanonicalSurface) -> bool:
    return not (s.b > 0 and s.c < 0 and s.d < 0)


def x_soluble_at_odd_p(s: CanonicalSurface, p: int) -> bool:
    if p % 4 == 1 or (s.m * s.n) % p:
        return True
    a1, b1, c1, d1 = s.primed
    va, vb, vc, vd = (_v(x, p) for x in (a1, b1, c1, d1))
    if (va == vc and va > 0) or (vb == vd and vb > 0):
        return False
    return _bracket(-a1 * b1, p) == 1 or _bracket(-c1 * d1, p) == 1


def x_locally_soluble(s: CanonicalSurface) -> LocalVerdict:
    """Check the real place, then 2, then the primes dividing m n in order."""
    if not real_soluble(s):
        return LocalVerdict(False, INFINITY)
    if not x_soluble_at_2(s):
        return LocalVerdict(False, Place(2))
    for p in sorted(factorize(s.m * s.n)):
        if not x_soluble_at_odd_p(s, p):
            return LocalVerdict(False, Place(p))
    return LocalVerdict(True)


def torsor_real_signs(s: CanonicalSurface) -> frozenset:
    """Common signs of (e1, e2) for which the torsor has real points."""
    if not real_soluble(s):
        raise ValueError(f"{s.coefficients} has no real points")
    b, c, d, delta = s.b, s.c, s.d, s.delta
    out = set()
    if c > 0:
        out.add(1)
        if b < 0 and d < 0:
            out.add(-1)
    else:
        if d > 0 and delta > 0:
            out.add(1)
        if b < 0 and delta < 0:
            out.add(-1)
    return frozenset(out)


def torsor_exponent_set(s: CanonicalSurface, p: int) -> frozenset:
    """Exponent pairs (v_p(e1), v_p(e2)) giving torsors with p-adic points."""
    if p % 4 != 3:
        raise ValueError("exponent sets are only needed for p = 3 mod 4")
    a1, b1, c1, d1 = s.primed
    r1 = _bracket(-a1 * b1, p)
    r2 = _bracket(-c1 * d1, p)
    if (s.m * s.n) % p:
        if r1 + r2 <= 0:
            return frozenset({(0, 0)})
        if s.delta_prime % p:
            return frozenset({(0, 0)})
        return frozenset({(0, 0), (1, 1)})
    if r1 == -1 and r2 == -1:
        raise InternalInconsistency(f"{s.coefficients} has no points over Q_{p}")
    if r2 == -1:
        return frozenset({(1, 0)})
    if r1 == -1:
        return frozenset({(0, 1)})
    va, vb, vc, vd = (_v(x, p) for x in (a1, b1, c1, d1))

    def blocked(x, y):
        return x >= 2 and x % 2 == 0 and y == 1

    out = set()
    if not (blocked(va, vc) or blocked(vb, vd)):
        out.add((1, 0))
    if not (blocked(vc, va) or blocked(vd, vb)):
        out.add((0, 1))
    if not out:
        raise InternalInconsistency(f"empty exponent set for {s.coefficients} at {p}")
    return frozenset(out)


def analyzed_primes(s: CanonicalSurface) -> list[int]:
    """Primes 3 mod 4 dividing m n delta'; every other prime is inert."""
    return [p for p in factorize(s.m * s.n * s.delta_prime) if p % 4 == 3]
