"""Global decision: local obstruction, rational point, or Hasse failure.

After local solubility is settled, the candidate torsors are pinned down
place by place.  If the real place or some prime p = 3 mod 4 admits two
choices, the Brauer class cannot obstruct and the surface has a rational
point.  Otherwise exactly one torsor survives away from 2 and the answer is
decided by its 2-adic solubility, which depends only on e mod 4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np

from .arith import primes_up_to, sum_two_squares
from .localsolve import (
    Place,
    analyzed_primes,
    torsor_exponent_set,
    torsor_real_signs,
    x_locally_soluble,
)
from .model import CanonicalSurface
from .twoadic import TorsorSignClass, torsor_soluble_at_2

__all__ = [
    "TorsorAssembly",
    "Decision",
    "assemble_unique_torsor",
    "decide",
    "witness_search",
    "LOCAL_OBSTRUCTION",
    "RATIONAL_POINT",
    "HASSE_FAILURE",
]

LOCAL_OBSTRUCTION = "local_obstruction"
RATIONAL_POINT = "rational_point"
HASSE_FAILURE = "hasse_failure"


@dataclass(frozen=True)
class TorsorAssembly:
    kind: str  # "shortcut_real", "shortcut_exponents" or "unique"
    prime: Optional[int] = None
    sign: Optional[int] = None
    exponents: dict = field(default_factory=dict)
    eps: Optional[TorsorSignClass] = None

    @property
    def is_shortcut(self) -> bool:
        return self.kind != "unique"


@dataclass(frozen=True)
class Decision:
    status: str
    place: Optional[Place] = None
    reason: Optional[str] = None
    prime: Optional[int] = None
    eps: Optional[TorsorSignClass] = None
    witness: Optional[tuple] = None

    def to_json(self) -> dict:
        out = {"status": self.status}
        if self.place is not None:
            out["place"] = str(self.place)
        if self.reason is not None:
            out["reason"] = self.reason
        if self.prime is not None:
            out["prime"] = self.prime
        if self.eps is not None:
            out["epsilon"] = list(self.eps)
        if self.witness is not None:
            u, v, t, y, z = self.witness
            out["witness"] = {"u": u, "v": v, "t": t, "y": y, "z": z}
        return out


def assemble_unique_torsor(s: CanonicalSurface) -> TorsorAssembly:
    """Apply the two shortcuts, else return the only candidate torsor."""
    signs = torsor_real_signs(s)
    if len(signs) == 2:
        return TorsorAssembly("shortcut_real")
    exps = {}
    for p in analyzed_primes(s):
        choices = torsor_exponent_set(s, p)
        if len(choices) == 2:
            return TorsorAssembly("shortcut_exponents", prime=p)
        (k,) = choices
        if k != (0, 0):
            exps[p] = k
    (sign,) = signs
    e1 = e2 = sign
    for p, (k1, k2) in exps.items():
        e1 *= p**k1
        e2 *= p**k2
    eps = TorsorSignClass(1 if e1 % 4 == 1 else -1, 1 if e2 % 4 == 1 else -1)
    return TorsorAssembly("unique", sign=sign, exponents=exps, eps=eps)


def decide(s: CanonicalSurface) -> Decision:
    lv = x_locally_soluble(s)
    if not lv.soluble:
        return Decision(LOCAL_OBSTRUCTION, place=lv.obstruction)
    t = assemble_unique_torsor(s)
    if t.kind == "shortcut_real":
        return Decision(RATIONAL_POINT, reason="shortcut_real")
    if t.kind == "shortcut_exponents":
        return Decision(RATIONAL_POINT, reason="shortcut_exponents", prime=t.prime)
    if torsor_soluble_at_2(s, t.eps):
        return Decision(RATIONAL_POINT, reason="torsor_everywhere_soluble", eps=t.eps)
    return Decision(HASSE_FAILURE, eps=t.eps)


def _pairs(height: int):
    # Nonnegative coprime (u, v) by increasing max(u, v), then lexicographically.
    for h in range(1, height + 1):
        for u in range(h):
            if math.gcd(u, h) == 1:
                yield (u, h)
        for v in range(h + 1):
            if math.gcd(h, v) == 1:
                yield (h, v)


@lru_cache(maxsize=4)
def _pair_arrays(height: int):
    uv = np.array(list(_pairs(height)), dtype=np.int64).reshape(-1, 2)
    return uv[:, 0].copy(), uv[:, 1].copy()


KERNEL_LIMIT = 1 << 26
_kernel = np.ones(2, dtype=np.int64)


def _kernel_table(limit: int) -> np.ndarray:
    """k[n] = product of the primes 3 mod 4 dividing n to an odd power.

    n > 0 is a sum of two squares exactly when k[n] = 1, and a product n1 n2
    is one exactly when k[n1] = k[n2].
    """
    global _kernel
    if len(_kernel) > limit:
        return _kernel
    size = max(limit + 1, 2 * len(_kernel))
    k = np.ones(size, dtype=np.int64)
    for p in primes_up_to(size - 1).tolist():
        if p % 4 != 3:
            continue
        q, j = p, 1
        while q < size:
            if j % 2:
                k[q::q] *= p
            else:
                k[q::q] //= p
            q *= p
            j += 1
    _kernel = k
    return k


def witness_search(s, height: int):
    """First (u, v, t, y, z) with t = Q1 Q2 (u, v) > 0 and t = y^2 + z^2.

    Pairs are tried by increasing max(u, v).  The test uses a table of
    square-class kernels when the form values are small enough, and exact
    factorisation otherwise; both give the same first witness.
    """
    a, b, c, d = s.coefficients if isinstance(s, CanonicalSurface) else s
    if height < 1:
        return None
    bound = max(abs(a) + abs(b), abs(c) + abs(d)) * height * height
    if bound > KERNEL_LIMIT:
        return _witness_scalar(a, b, c, d, height)
    U, V = _pair_arrays(height)
    U2, V2 = U * U, V * V
    q1 = a * U2 + b * V2
    q2 = c * U2 + d * V2
    k = _kernel_table(bound)
    hit = (q1 * q2 > 0) & (k[np.abs(q1)] == k[np.abs(q2)])
    idx = np.flatnonzero(hit)
    if not len(idx):
        return None
    i = int(idx[0])
    u, v = int(U[i]), int(V[i])
    t = (a * u * u + b * v * v) * (c * u * u + d * v * v)
    yz = sum_two_squares(t)
    if yz is None:
        raise AssertionError(f"kernel table disagrees with factorisation at {t}")
    return (u, v, t) + yz


def _witness_scalar(a, b, c, d, height):
    for u, v in _pairs(height):
        t = (a * u * u + b * v * v) * (c * u * u + d * v * v)
        if t <= 0:
            continue
        yz = sum_two_squares(t)
        if yz is not None:
            return (u, v, t) + yz
    return None
