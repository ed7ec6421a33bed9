"""2-adic solubility of pairs of diagonal binary quadratic forms.

For a tuple t = (A, B, C, D) put R1 = A u^2 + B v^2 and R2 = C u^2 + D v^2.
Two questions are answered for coprime 2-adic integers u, v:

* ``in_Ttot1``: can R1 and R2 both be made 2-adic sums of two squares?
* ``in_Ttot2``: can the product R1*R2 be a 2-adic sum of two squares?

A nonzero 2-adic number is a sum of two squares exactly when its odd part is
1 mod 4; this set is called ``D`` below and its complement ``Dbar``.

The deciders are closed-form case lists keyed on (A, B) mod 4 and on the odd
parts mod 16 together with the 2-adic valuations.  ``certify_by_search`` is an
independent brute-force oracle that walks a residue tree and is used to check
the case lists.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

from .arith import ArithmeticError_, is_squarefree, split_valuation

__all__ = [
    "TwoAdicClass",
    "TwoAdicTuple",
    "TorsorSignClass",
    "SearchMode",
    "SearchVerdict",
    "InvalidTuple",
    "classify_D",
    "odd_pair_condition",
    "in_Ttot1",
    "in_Ttot2",
    "certify_by_search",
    "certify_tuple",
    "x_soluble_at_2",
    "torsor_soluble_at_2",
]


class TwoAdicClass(enum.Enum):
    D = "D"
    Dbar = "Dbar"


class InvalidTuple(ArithmeticError_):
    """A tuple fails one of the normal-form conditions."""


class TorsorSignClass(NamedTuple):
    eps1: int
    eps2: int


def _in_D(x: int) -> bool:
    return (x >> ((x & -x).bit_length() - 1)) & 3 == 1


def classify_D(x: int) -> TwoAdicClass:
    """Class of x according to its odd part mod 4."""
    if x == 0:
        raise ArithmeticError_("0 has no 2-adic class")
    return TwoAdicClass.D if _in_D(x) else TwoAdicClass.Dbar


_ODD_PAIR = {
    TwoAdicClass.D: frozenset({1, 2, 4, 5, 0}),
    TwoAdicClass.Dbar: frozenset({3, 4, 6, 7, 0}),
}


def odd_pair_condition(r: int, s: int, target: TwoAdicClass) -> bool:
    """Whether r u^2 + s v^2 lands in ``target`` for some odd u, v."""
    if r % 2 == 0 or s % 2 == 0:
        raise ArithmeticError_("odd_pair_condition needs odd r and s")
    return (r + s) % 8 in _ODD_PAIR[TwoAdicClass(target)]


@dataclass(frozen=True)
class TwoAdicTuple:
    """(A, B, C, D) with B = 2^beta Bodd, C = 2^gamma Codd, D = 2^delta Dodd."""

    A: int
    Bodd: int
    Codd: int
    Dodd: int
    beta: int
    gamma: int
    delta: int

    @classmethod
    def from_coefficients(
        cls, A: int, B: int, C: int, D: int, check: bool = True, allow_degenerate: bool = False
    ) -> "TwoAdicTuple":
        if 0 in (B, C, D):
            raise InvalidTuple("B, C, D must be nonzero")
        beta, Bo = split_valuation(B, 2)
        gamma, Co = split_valuation(C, 2)
        delta, Do = split_valuation(D, 2)
        t = cls(A, Bo, Co, Do, beta, gamma, delta)
        if check:
            t.validate(allow_degenerate)
        return t

    @property
    def B(self) -> int:
        return self.Bodd << self.beta

    @property
    def C(self) -> int:
        return self.Codd << self.gamma

    @property
    def D(self) -> int:
        return self.Dodd << self.delta

    def coefficients(self) -> tuple[int, int, int, int]:
        return self.A, self.B, self.C, self.D

    def validate(self, allow_degenerate: bool = False) -> None:
        """Raise InvalidTuple naming the first failed condition.

        With ``allow_degenerate`` the condition AD - BC != 0 is skipped; the
        solubility questions still make sense for proportional forms.
        """
        A, B, C, D = self.coefficients()
        if A % 2 == 0:
            raise InvalidTuple("A must be odd")
        if 0 in (self.Bodd, self.Codd, self.Dodd) or min(self.beta, self.gamma, self.delta) < 0:
            raise InvalidTuple("malformed odd parts or valuations")
        if (self.Bodd % 2, self.Codd % 2, self.Dodd % 2) != (1, 1, 1):
            raise InvalidTuple("odd parts must be odd")
        if not allow_degenerate and A * D - B * C == 0:
            raise InvalidTuple("AD - BC must be nonzero")
        if math.gcd(A, B) != 1:
            raise InvalidTuple("gcd(A, B) must be 1")
        if math.gcd(C, D) != 1:
            raise InvalidTuple("gcd(C, D) must be 1")
        if not is_squarefree(math.gcd(A, C)):
            raise InvalidTuple("gcd(A, C) must be squarefree")
        if not is_squarefree(math.gcd(B, D)):
            raise InvalidTuple("gcd(B, D) must be squarefree")


def _as_tuple(t) -> tuple[int, int, int, int]:
    if isinstance(t, TwoAdicTuple):
        t.validate(allow_degenerate=True)
        return t.coefficients()
    A, B, C, D = (int(x) for x in t)
    TwoAdicTuple.from_coefficients(A, B, C, D, allow_degenerate=True)
    return A, B, C, D


# ---------------------------------------------------------------------------
# Closed-form deciders.  Each ``_tK_ij`` receives actual integers in the
# residue class (A, B) = (i, j) mod 4 and follows the case list for that class.

_GOOD = frozenset({1, 2, 4, 5, 0})


def _parts(x: int) -> tuple[int, int]:
    e = (x & -x).bit_length() - 1
    return e, x >> e


def _cond_1331(A: int, B: int, C: int, D: int) -> bool:
    s1, s2 = (A + B) % 8, (C + D) % 8
    return s1 == 0 or (s1 == 4 and (s2 == 0 or (A + B - C - D) % 16 == 0))


def _t1_11(A, B, C, D) -> bool:
    gamma, Cp = _parts(C)
    delta, Dp = _parts(D)
    if _in_D(C) or _in_D(D):
        return True
    if C % 4 == 3 and D % 4 == 3 and (A + B) % 8 == 2 and (C + D) % 8 == 2:
        return True
    if C % 4 == 3 and delta >= 1 and Dp % 4 == 3 and (delta % 2 or (C + Dp) % 8 == 2):
        return True
    if D % 4 == 3 and gamma >= 1 and Cp % 4 == 3 and (gamma % 2 or (Cp + D) % 8 == 2):
        return True
    return False


def _t2_11(A, B, C, D) -> bool:
    gamma, Cp = _parts(C)
    delta, Dp = _parts(D)
    if _in_D(C) or _in_D(D):
        return True
    if C % 4 == 3 and D % 4 == 3 and (A + B - C - D) % 8 == 0:
        return True
    if C % 4 == 3 and Dp % 4 == 3:
        if delta % 2:
            return True
        if delta >= 2 and ((C + Dp) % 8 == 2 or ((A + B) % 8 == 6 and (C + Dp) % 8 == 6)):
            return True
    if D % 4 == 3 and Cp % 4 == 3:
        if gamma % 2:
            return True
        if gamma >= 2 and ((Cp + D) % 8 == 2 or ((A + B) % 8 == 6 and (Cp + D) % 8 == 6)):
            return True
    return False


def _t1_33(A, B, C, D) -> bool:
    return (A + B) % 8 == 2 and (C + D) % 8 in _GOOD


def _t2_33(A, B, C, D) -> bool:
    return _t2_11(-A, -B, -C, -D)


def _t1_13(A, B, C, D) -> bool:
    gamma, Cp = _parts(C)
    if _in_D(C):
        return True
    if (C + D) % 8 in {1, 2, 5}:
        return True
    if D % 4 == 1 and gamma == 1 and Cp % 4 == 3:
        return True
    if D % 4 == 3 and gamma >= 2 and Cp % 4 == 3 and (gamma % 2 or (Cp + D) % 8 == 2):
        return True
    if C % 4 == 3 and D % 4 == 1 and _cond_1331(A, B, C, D):
        return True
    return False


def _t2_13(A, B, C, D) -> bool:
    if _in_D(C):
        return True
    if C % 2 == 0:
        return True
    if C % 4 == 3 and (C + D) % 8 in {1, 2, 3, 5, 6, 7}:
        return True
    if C % 4 == 3 and D % 4 == 1 and _cond_1331(A, B, C, D):
        return True
    return False


def _t1_10(A, B, C, D) -> bool:
    gamma, Cp = _parts(C)
    if D % 4 and (_in_D(C) or (C + D) % 8 in _GOOD):
        return True
    if gamma == 1 and Cp % 4 == 3 and D % 4 == 1:
        return True
    if gamma >= 2 and Cp % 4 == 3 and D % 4 == 3 and (gamma % 2 or (Cp + D) % 8 == 2):
        return True
    return False


def _t2_10(A, B, C, D) -> bool:
    beta, Bp = _parts(B)
    gamma, Cp = _parts(C)
    if _in_D(C):
        return D % 4 != 0
    if (C + D) % 8 in _GOOD:
        return True
    if D % 4 == 0 or (C + D) % 8 not in {3, 6, 7}:
        return False
    # A + B' = 6 mod 8 is demanded when B' = 1 mod 4 and beta is even.
    side = not (Bp % 4 == 1 and beta % 2 == 0) or (A + Bp) % 8 == 6
    if C % 4 == 3 and (C + D) % 8 == 6 and side:
        return True
    if Cp % 4 == 3 and gamma == 1 and D % 4 == 1:
        return True
    if Cp % 4 == 3 and gamma >= 2 and D % 4 == 3:
        if gamma % 2 or (Cp + D) % 8 == 2 or ((Cp + D) % 8 == 6 and side):
            return True
    return False


def _t1_30(A, B, C, D) -> bool:
    # v is odd and u = 2^mu u' with mu >= 1.  R2 only sees mu through
    # whether mu = 1 when delta = 1, so enumerate the admissible mu.
    beta, Bp = _parts(B)
    delta, Dp = _parts(D)

    def r1_ok(mu):
        if 2 * mu == beta - 1:
            return True
        if 2 * mu >= beta + 2 and Bp % 4 == 1:
            return True
        if 2 * mu == beta + 1 and Bp % 4 == 3:
            return True
        return 2 * mu == beta and (A + Bp) % 8 in (2, 4, 0)

    if delta == 0:
        return D % 4 == 1 and any(r1_ok(mu) for mu in range(1, beta + 3))
    if Dp % 4 == 3:
        return r1_ok(1)
    return any(r1_ok(mu) for mu in range(2, beta + 3))


def _t2_30(A, B, C, D) -> bool:
    return _t2_10(-A, -B, -C, -D)


def _t1_12(A, B, C, D) -> bool:
    _, Bp = _parts(B)
    gamma, Cp = _parts(C)
    delta, Dp = _parts(D)
    if _in_D(C):
        return True
    if Cp % 4 != 3:
        return False
    if gamma >= 1:
        if D % 4 == 1:
            return True
        if D % 4 == 3 and (gamma % 2 or (Cp + D) % 8 == 2):
            return True
        return False
    if Bp % 4 == 3:
        if delta in (0, 2, 3) and Dp % 4 == 1:
            return True
        if delta in (1, 2, 3) and Dp % 4 == 3 and (delta != 2 or (C + Dp) % 8 == 2):
            return True
        return False
    if Dp % 4 == 1:
        return True
    return delta >= 3 and Dp % 4 == 3 and (delta % 2 or (C + Dp) % 8 == 2)


def _t2_12(A, B, C, D) -> bool:
    _, Bp = _parts(B)
    gamma, Cp = _parts(C)
    delta, Dp = _parts(D)
    if _in_D(C):
        return True
    if Cp % 4 == 3 and gamma >= 1:
        return True
    if C % 4 == 3:
        if Bp % 4 == Dp % 4:
            return True
        return delta != 1
    return False


def _t1_32(A, B, C, D) -> bool:
    _, Bp = _parts(B)
    delta, Dp = _parts(D)
    s = (C + D) % 8
    if s in _GOOD:
        return True
    if D % 4 == 1 and s in (3, 6, 7):
        return True
    if s % 4 == 3 and delta == 1 and Dp % 4 == Bp % 4:
        return True
    if C % 4 == 3 and delta >= 2:
        if Bp % 4 == 3:
            return delta == 3 or (delta == 2 and (C + Dp) % 8 in (2, 4, 0))
        if Dp % 4 == 1:
            return True
        return delta >= 3 and (delta % 2 or (C + Dp) % 8 == 2)
    return False


def _t2_32(A, B, C, D) -> bool:
    return _t2_12(-A, -B, -C, -D)


def _t1_31(A, B, C, D) -> bool:
    # Exchanging u and v lands in class (1, 3).
    return _t1_13(B, A, D, C)


def _t2_31(A, B, C, D) -> bool:
    return _t2_13(-A, -B, -C, -D)


_DISPATCH = {
    (1, 1): (_t1_11, _t2_11),
    (3, 3): (_t1_33, _t2_33),
    (1, 3): (_t1_13, _t2_13),
    (3, 1): (_t1_31, _t2_31),
    (1, 0): (_t1_10, _t2_10),
    (3, 0): (_t1_30, _t2_30),
    (1, 2): (_t1_12, _t2_12),
    (3, 2): (_t1_32, _t2_32),
}

_EXP_CAP = 12


def _key(A: int, B: int, C: int, D: int) -> tuple:
    # Everything the case lists look at: odd parts mod 16 and exponents,
    # with large exponents folded onto a representative of the same parity.
    out = [A % 16]
    for x in (B, C, D):
        e, o = _parts(x)
        if e > _EXP_CAP:
            e = _EXP_CAP + (e - _EXP_CAP) % 2
        out += [e, o % 16]
    return tuple(out)


@lru_cache(maxsize=None)
def _decide_key(key: tuple) -> tuple[bool, bool]:
    a, eb, ob, ec, oc, ed, od = key
    A, B, C, D = a, ob << eb, oc << ec, od << ed
    f1, f2 = _DISPATCH[(A % 4, B % 4)]
    return f1(A, B, C, D), f2(A, B, C, D)


def decide_pair(A: int, B: int, C: int, D: int) -> tuple[bool, bool]:
    """(in T1, in T2) without validating the tuple.  Used on hot paths."""
    return _decide_key(_key(A, B, C, D))


def in_Ttot1(t) -> bool:
    """Both forms can be made sums of two squares at one coprime (u, v)."""
    return decide_pair(*_as_tuple(t))[0]


def in_Ttot2(t) -> bool:
    """The product of the forms can be made a sum of two squares."""
    return decide_pair(*_as_tuple(t))[1]


# ---------------------------------------------------------------------------
# Residue-tree certifier.


class SearchMode(str, enum.Enum):
    single_form_pair_in_D = "single_form_pair_in_D"
    product_in_D = "product_in_D"


@dataclass(frozen=True)
class SearchVerdict:
    status: str  # "soluble", "insoluble" or "inconclusive"
    witness: tuple[int, int] | None = None

    @property
    def soluble(self) -> bool:
        return self.status == "soluble"


def _state(value: int, j: int) -> int:
    # 1: class D fixed, -1: class Dbar fixed, 0: not yet fixed.
    # value mod 2^(j+1) is independent of the lift, so the odd part mod 4 is
    # known once v_2(value) <= j - 1.
    if value == 0:
        return 0
    e = (value & -value).bit_length() - 1
    if e > j - 1:
        return 0
    return 1 if (value >> e) & 3 == 1 else -1


def certify_by_search(q1: tuple[int, int], q2: tuple[int, int], mode="product_in_D", depth: int = 20) -> SearchVerdict:
    """Exhaust (u, v) over a 2-adic residue tree.

    Since u, v are coprime and odd squares are 1 mod 8, one may scale so that
    v = 1, or u = 1 with v even.  Each branch is a single residue class mod
    2^j refined one bit at a time until the relevant classes are fixed.
    """
    mode = SearchMode(mode)
    r1, s1 = q1
    r2, s2 = q2
    if 0 in (r1 * r1 + s1 * s1, r2 * r2 + s2 * s2):
        raise ArithmeticError_("a form is identically zero")
    # (kind, residue, j): kind 0 is (x, 1) with x mod 2^j, kind 1 is (1, x) with x even.
    stack = [(0, 0, 1), (0, 1, 1), (1, 0, 1)]
    inconclusive = False
    while stack:
        kind, x, j = stack.pop()
        u, v = (x, 1) if kind == 0 else (1, x)
        f1 = r1 * u * u + s1 * v * v
        f2 = r2 * u * u + s2 * v * v
        # An exact integer value already in the target class certifies a
        # point, whether or not every lift of this residue class agrees.
        if mode is SearchMode.product_in_D:
            if f1 * f2 and _in_D(f1 * f2):
                return SearchVerdict("soluble", (u, v))
            st = _state(f1 * f2, j)
            if st == 1:
                return SearchVerdict("soluble", (u, v))
            if st == -1:
                continue
        else:
            if f1 and f2 and _in_D(f1) and _in_D(f2):
                return SearchVerdict("soluble", (u, v))
            a, b = _state(f1, j), _state(f2, j)
            if a == -1 or b == -1:
                continue
            if a == 1 and b == 1:
                return SearchVerdict("soluble", (u, v))
        if j >= depth:
            inconclusive = True
            continue
        stack.append((kind, x + (1 << j), j + 1))
        stack.append((kind, x, j + 1))
    return SearchVerdict("inconclusive" if inconclusive else "insoluble")


def certify_tuple(t, mode="product_in_D", depth: int = 20) -> SearchVerdict:
    A, B, C, D = t.coefficients() if isinstance(t, TwoAdicTuple) else t
    return certify_by_search((A, B), (C, D), mode, depth)


# ---------------------------------------------------------------------------
# Surface-level entry points.


def _twist(s) -> tuple[int, int, int, int]:
    sigma = 1 if (s.m * s.n) % 4 == 1 else -1
    return sigma * s.a1, sigma * s.b1, s.c1, s.d1


def x_soluble_at_2(s) -> bool:
    """The surface has a 2-adic point."""
    t = _twist(s)
    try:
        TwoAdicTuple.from_coefficients(*t, allow_degenerate=True)
    except InvalidTuple as exc:
        raise AssertionError(f"2-adic tuple {t} malformed: {exc}") from exc
    return decide_pair(*t)[1]


def torsor_soluble_at_2(s, signs) -> bool:
    """The torsor with sign classes (eps1, eps2) mod 4 has a 2-adic point."""
    e1, e2 = signs
    t = (e1 * s.a1, e1 * s.b1, e2 * s.c1, e2 * s.d1)
    TwoAdicTuple.from_coefficients(*t, allow_degenerate=True)
    return decide_pair(*t)[0]
