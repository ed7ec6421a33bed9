"""Coefficient tuples (a, b, c, d) for Y^2 + Z^2 = (aT^2 + b)(cT^2 + d).

Two tuples describe isomorphic surfaces when they differ by

* scaling (a, c) by a square or (b, d) by a square (substituting T),
* scaling all four coordinates by a common factor,
* scaling (a, b) or (c, d) by a positive sum of two squares,
* swapping the two factors (``rho1``) or inverting T (``rho2``).

A representative is a primitive tuple with a > 0 and a odd, gcd(a, c) and
gcd(b, d) squarefree, and gcd(a, b), gcd(c, d) squarefree with all prime
factors 3 mod 4.  ``canonicalize`` picks one representative per orbit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple

from .arith import class_membership, factorize

__all__ = [
    "ModelError",
    "ZeroCoefficient",
    "DegenerateDeterminant",
    "NotRepresentative",
    "RawCoefficients",
    "CanonicalSurface",
    "validate",
    "canonicalize",
    "decompose",
    "rho1",
    "rho2",
    "audit",
    "is_representative",
]


class ModelError(ValueError):
    pass


class ZeroCoefficient(ModelError):
    def __init__(self, raw):
        super().__init__(f"abcd = 0 for {tuple(raw)}: every coefficient must be nonzero")


class DegenerateDeterminant(ModelError):
    def __init__(self, raw):
        super().__init__(f"ad - bc = 0 for {tuple(raw)}: the two factors are proportional")


class NotRepresentative(ModelError):
    pass


class RawCoefficients(NamedTuple):
    a: int
    b: int
    c: int
    d: int


def validate(raw) -> RawCoefficients:
    r = RawCoefficients(*(int(x) for x in raw))
    if 0 in r:
        raise ZeroCoefficient(r)
    if r.a * r.d - r.b * r.c == 0:
        raise DegenerateDeterminant(r)
    return r


def rho1(t):
    a, b, c, d = t
    return (c, d, a, b)


def rho2(t):
    a, b, c, d = t
    return (b, a, d, c)


def _sign(x: int) -> str:
    return "+" if x > 0 else "-"


@dataclass(frozen=True)
class CanonicalSurface:
    """A representative tuple together with its primed decomposition."""

    a: int
    b: int
    c: int
    d: int
    iota: int = field(init=False)
    m: int = field(init=False)
    n: int = field(init=False)
    a1: int = field(init=False)
    b1: int = field(init=False)
    c1: int = field(init=False)
    d1: int = field(init=False)
    delta: int = field(init=False)
    delta_prime: int = field(init=False)

    def __post_init__(self):
        a, b, c, d = self.a, self.b, self.c, self.d
        m, n = math.gcd(a, b), math.gcd(c, d)
        put = object.__setattr__
        put(self, "iota", 0 if b % 2 == 0 else 1)
        put(self, "m", m)
        put(self, "n", n)
        put(self, "a1", a // m)
        put(self, "b1", b // m)
        put(self, "c1", c // n)
        put(self, "d1", d // n)
        put(self, "delta", a * d - b * c)
        put(self, "delta_prime", (a // m) * (d // n) - (b // m) * (c // n))

    @classmethod
    def from_tuple(cls, t) -> "CanonicalSurface":
        """Wrap a tuple that is already a representative; raise otherwise."""
        r = validate(t)
        problem = _representative_problem(r)
        if problem:
            raise NotRepresentative(f"{tuple(r)}: {problem}")
        return cls(*r)

    @property
    def coefficients(self) -> tuple[int, int, int, int]:
        return self.a, self.b, self.c, self.d

    @property
    def primed(self) -> tuple[int, int, int, int]:
        return self.a1, self.b1, self.c1, self.d1

    @property
    def sign_pattern(self) -> tuple[str, str, str, str]:
        return tuple(_sign(x) for x in self.coefficients)

    def q1(self, u: int, v: int) -> int:
        return self.a * u * u + self.b * v * v

    def q2(self, u: int, v: int) -> int:
        return self.c * u * u + self.d * v * v

    def q1p(self, u: int, v: int) -> int:
        return self.a1 * u * u + self.b1 * v * v

    def q2p(self, u: int, v: int) -> int:
        return self.c1 * u * u + self.d1 * v * v

    def hcf_identity(self, u: int, v: int) -> bool:
        q1, q2 = self.q1p(u, v), self.q2p(u, v)
        return (
            self.d1 * q1 - self.b1 * q2 == self.delta_prime * u * u
            and -self.c1 * q1 + self.a1 * q2 == self.delta_prime * v * v
        )


def _representative_problem(t) -> str | None:
    a, b, c, d = t
    if 0 in t or a * d - b * c == 0:
        return "degenerate"
    if math.gcd(math.gcd(a, b), math.gcd(c, d)) != 1:
        return "not primitive"
    if a <= 0:
        return "a must be positive"
    if a % 2 == 0:
        return "a must be odd"
    if not class_membership(math.gcd(a, c))[0]:
        return "gcd(a, c) not squarefree"
    if not class_membership(math.gcd(b, d))[0]:
        return "gcd(b, d) not squarefree"
    if not class_membership(math.gcd(a, b))[1]:
        return "gcd(a, b) not squarefree with primes 3 mod 4"
    if not class_membership(math.gcd(c, d))[1]:
        return "gcd(c, d) not squarefree with primes 3 mod 4"
    return None


def is_representative(t) -> bool:
    try:
        return _representative_problem(tuple(int(x) for x in t)) is None
    except ValueError:
        return False


def decompose(s: CanonicalSurface):
    """(m, n, (a', b', c', d'), delta, delta')."""
    return s.m, s.n, s.primed, s.delta, s.delta_prime


def audit(s: CanonicalSurface, samples=((1, 0), (0, 1), (1, 1), (2, 3), (-5, 7))) -> None:
    """Raise AssertionError if any representative invariant fails."""
    problem = _representative_problem(s.coefficients)
    assert problem is None, problem
    assert s.a == s.m * s.a1 and s.b == s.m * s.b1
    assert s.c == s.n * s.c1 and s.d == s.n * s.d1
    assert math.gcd(s.a1, s.b1) == 1 and math.gcd(s.c1, s.d1) == 1
    assert math.gcd(s.m, s.n) == 1
    for u, v in samples:
        assert s.hcf_identity(u, v), (u, v)


# Orbit reduction, one prime at a time.  The exponent vector
# (v_a, v_b, v_c, v_d) at p can be moved by (2,0,2,0), (0,2,0,2), (1,1,1,1),
# and (2,2,0,0), (0,0,2,2) since p^2 is a norm.  When p = 2 or p = 1 mod 4 the
# prime itself is a norm, adding (1,1,0,0) and (0,0,1,1).  The cosets are
# classified by I = v_a - v_b - v_c + v_d together with v_a + v_b mod 2 and,
# for p = 3 mod 4 only, v_a + v_c mod 2.


def _coset_key(p: int, v) -> tuple:
    va, vb, vc, vd = v
    key = (va - vb - vc + vd, (va + vb) % 2)
    if p % 4 == 3:
        key += ((va + vc) % 2,)
    return key


def _reduce_exponents(p: int, v) -> tuple[int, int, int, int]:
    """Least nonnegative vector (by sum, then lexicographically) in the coset."""
    # The coset only depends on p through p mod 4.
    q = 3 if p % 4 == 3 else 1
    return _least_in_coset(q, _coset_key(q, v))


@lru_cache(maxsize=None)
def _least_in_coset(p: int, key: tuple) -> tuple[int, int, int, int]:
    I = key[0]
    best = None
    span = range(4)
    for x in span:
        for y in span:
            for big in range(abs(I) + 8):
                if I >= 0:
                    va, vb, vc = big, x, y
                    vd = I + vb + vc - va
                    cand = (va, vb, vc, vd)
                else:
                    va, vd, vb = x, y, big
                    vc = va + vd - vb - I
                    cand = (va, vb, vc, vd)
                if min(cand) < 0 or _coset_key(p, cand) != key:
                    continue
                rank = (sum(cand), cand)
                if best is None or rank < best:
                    best = rank
    return best[1]


def _reduce(t) -> tuple[int, int, int, int]:
    primes = set()
    for x in t:
        primes.update(factorize(x))
    out = [1 if x > 0 else -1 for x in t]
    if out[0] < 0:
        out = [-s for s in out]
    for p in sorted(primes):
        v = [0, 0, 0, 0]
        for i, x in enumerate(t):
            while x % p == 0:
                x //= p
                v[i] += 1
        for i, e in enumerate(_reduce_exponents(p, v)):
            out[i] *= p**e
    return tuple(out)


def _order_key(t):
    return tuple(abs(x) for x in t), t


def canonicalize(raw) -> CanonicalSurface:
    """The chosen representative of the orbit of ``raw``."""
    t = validate(raw)
    images = (t, rho1(t), rho2(t), rho1(rho2(t)))
    cands = [r for r in (_reduce(g) for g in images) if r[0] % 2]
    best = min(cands, key=_order_key)
    return CanonicalSurface(*best)
