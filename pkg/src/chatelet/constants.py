"""Density constants: Euler factors, Euler products, and local densities.

Exact quantities are ``fractions.Fraction``.  Infinite products are evaluated
with mpmath over p <= bound and come with a rigorous bound on the log of the
omitted tail, obtained from an explicit bound |f_p - 1| <= C p^-r.
"""

from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import mpmath
import numpy as np

from .arith import ArithmeticError_, is_probable_prime, primes_up_to
from .budget import BudgetExceeded, check_budget, work_budget
from .twoadic import _EXP_CAP, _decide_key, decide_pair

__all__ = [
    "EulerProductValue",
    "BudgetExceeded",
    "PrecisionShortfall",
    "StabilizationError",
    "TAU_LOC_INF",
    "TAU_LOC_2",
    "RATIO_PREFACTOR",
    "local_factor",
    "euler_product",
    "tau_loc2_exact",
    "tau2_component",
    "table6",
    "density_bruteforce",
    "work_budget",
    "fraction_str",
]

TAU_LOC_INF = Fraction(7, 4)
TAU_LOC_2 = Fraction(4751, 9216)
RATIO_PREFACTOR = Fraction(33257, 39168)
WORKING_DIGITS = 40


class PrecisionShortfall(ArithmeticError_):
    pass


class StabilizationError(ArithmeticError_):
    pass


def fraction_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


# ---------------------------------------------------------------------------
# Local factors.  Polynomials in x = 1/p are coefficient lists, lowest first.


def _pmul(f, g):
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        for j, b in enumerate(g):
            out[i + j] += a * b
    return out


def _padd(f, g):
    n = max(len(f), len(g))
    return [(f[i] if i < len(f) else 0) + (g[i] if i < len(g) else 0) for i in range(n)]


def _peval(f, x):
    out = 0
    for c in reversed(f):
        out = out * x + c
    return out


H = Fraction(1, 2)
_ONE_MINUS = [1, -1]
_ONE_PLUS = [1, 1]
_SQ_MINUS = _pmul(_ONE_MINUS, _ONE_MINUS)
_SQ_PLUS = _pmul(_ONE_PLUS, _ONE_PLUS)

_A_P = _pmul(_SQ_MINUS, [1, 2, 1, 0, -2])
_B_P = _pmul(_SQ_PLUS, [1, 2, 3, 4, 0, -4])
# c_p' = (1-x)^2 (1+x)^-2 * _C_INNER
_C_INNER = [1, 4, 3, 2, 3 * H, -2, -2]
# a_p + 2 c_p' / p^2 = (1-x)^2 (1+x)^-2 * _LOC_INNER
_LOC_INNER = [1, 4, 8, 12, 5, 0, 1, -4, -4]
_RATIO_DEFECT = [0, 0, 0, 0, 6, 0, -9, 0, 4]


def local_factor(p: int, kind: str) -> Fraction:
    """Exact value of a named local factor at the prime p."""
    if not is_probable_prime(p):
        raise ArithmeticError_(f"{p} is not prime")
    x = Fraction(1, p)
    if kind == "a_p":
        return _peval(_A_P, x)
    if kind == "b_p":
        return _peval(_B_P, x)
    sq = _peval(_SQ_MINUS, x) / _peval(_SQ_PLUS, x)
    if kind == "c_p_prime":
        return sq * _peval(_C_INNER, x)
    if kind == "loc_p":
        return sq * _peval(_LOC_INNER, x)
    if kind == "ratio_factor":
        return 1 - _peval(_RATIO_DEFECT, x) / _peval(_B_P, x)
    raise ValueError(f"unknown local factor {kind!r}")


# Each Euler factor is written as 1 + num(x)/den(x) with den(x) >= 1 on
# (0, 1/2], so |f_p - 1| <= sum |num_i| x^i.  Each kind lists its factor at
# p = 1 mod 4 and p = 3 mod 4 in that form.
_TAU_1 = (_padd(_A_P, [-1]), [1])
_TAU_3 = (_padd(_pmul(_SQ_MINUS, [1, 2, 3, 4, 0, -4]), [-1]), [1])
_LOC_3 = (_padd(_pmul(_SQ_MINUS, _LOC_INNER), [-x for x in _SQ_PLUS]), _SQ_PLUS)
_RATIO_3 = ([-c for c in _RATIO_DEFECT], _B_P)
_ONE = ([0], [1])

_KINDS = {
    "tau": (_TAU_1, _TAU_3, Fraction(17, 16)),
    "tau_loc": (_TAU_1, _LOC_3, TAU_LOC_INF * TAU_LOC_2),
    "thm12_ratio": (_ONE, _RATIO_3, Fraction(1)),
    "hasse_ratio": (_ONE, _RATIO_3, RATIO_PREFACTOR),
}


def _deviation_bound(num, bound: int) -> tuple[int, float]:
    """(r, C) with |num(x)| <= C x^r whenever x <= 1/bound."""
    nz = [i for i, c in enumerate(num) if c]
    if not nz:
        return 2, 0.0
    r = nz[0]
    c = sum(abs(float(num[i])) * bound ** -(i - r) for i in nz)
    return r, c


@dataclass(frozen=True)
class EulerProductValue:
    name: str
    value: mpmath.mpf
    prime_bound: int
    tail_bound: float  # bound on |log(true value) - log(value)|
    exact_prefactor: Fraction

    @property
    def digits(self) -> int:
        """Decimal places that the tail bound leaves intact."""
        err = float(abs(self.value)) * math.expm1(self.tail_bound) if self.tail_bound else 0.0
        if err == 0.0:
            return WORKING_DIGITS - 5
        return max(0, int(math.floor(-math.log10(err))))

    def interval(self) -> tuple[float, float]:
        v = float(self.value)
        return v * math.exp(-self.tail_bound), v * math.exp(self.tail_bound)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "exact": None,
            "value": mpmath.nstr(
                self.value, max(1, self.digits), strip_zeros=False, min_fixed=-math.inf, max_fixed=math.inf
            ),
            "prime_bound": self.prime_bound,
            "tail_bound": self.tail_bound,
        }


def _identity_check():
    # The ratio prefactor must be exactly the product of the 2-adic, real and
    # 2-part constants; the ratio factor must equal the loc/tau quotient.
    assert TAU_LOC_INF * TAU_LOC_2 / Fraction(17, 16) == RATIO_PREFACTOR
    assert Fraction(7 * 4751, 2**8 * 3**2 * 17) == RATIO_PREFACTOR
    assert _padd(_B_P, [-c for c in _LOC_INNER]) == [0, 0, 0, 0, 6, 0, -9, 0, 4]


_identity_check()


def euler_product(kind: str, prime_bound: int, digits: int = WORKING_DIGITS) -> EulerProductValue:
    """Partial Euler product over p <= prime_bound with a tail bound."""
    if kind not in _KINDS:
        raise ValueError(f"unknown product {kind!r}")
    if prime_bound < 100:
        raise ArithmeticError_("prime_bound must be at least 100")
    if digits < 30:
        raise PrecisionShortfall(f"{digits} digits requested, at least 30 are required")
    f1, f3, pre = _KINDS[kind]
    primes = primes_up_to(prime_bound)
    with mpmath.workdps(digits):
        log_sum = mpmath.mpf(0)
        for p in primes[1:].tolist():
            num, den = f1 if p % 4 == 1 else f3
            if num == [0]:
                continue
            x = mpmath.mpf(1) / p
            log_sum += mpmath.log1p(_peval(num, x) / _peval(den, x))
        value = mpmath.mpf(pre.numerator) / pre.denominator * mpmath.exp(log_sum)
        rounding = len(primes) * 10.0 ** (-digits + 3)
    # Tail over p > B: |log f_p| <= g/(1-g) with g <= C p^-r, and
    # sum_{n > B} n^-r <= B^(1-r)/(r-1).
    tail = 0.0
    for num, _ in (f1, f3):
        r, c = _deviation_bound(num, prime_bound)
        if c == 0.0:
            continue
        g = c * prime_bound**-r
        if g >= 0.5:
            raise ArithmeticError_("prime_bound too small for the tail estimate")
        tail += c * prime_bound ** (1 - r) / (r - 1) / (1 - g)
    if rounding > tail and rounding > 1e-25:
        raise PrecisionShortfall(f"rounding error {rounding:.2e} exceeds the tail bound")
    with mpmath.workdps(digits):
        return EulerProductValue(kind, +value, prime_bound, tail + rounding, pre)


# ---------------------------------------------------------------------------
# Exact 2-adic density.

STABILIZATION = 12
_ODD16 = range(1, 16, 2)


def _h_counts(beta: int, gamma: int, delta: int) -> Counter:
    """#H for every (A, 2^beta B') class mod 4 at once."""
    if max(beta, gamma, delta) > _EXP_CAP + 1:
        raise StabilizationError("exponents beyond the decider's folding range")
    out = Counter()
    for A in _ODD16:
        for B in _ODD16:
            ij = (A % 4, (B << beta) % 4)
            n = 0
            for C in _ODD16:
                for D in _ODD16:
                    # Same lookup as decide_pair(A, B << beta, C << gamma, D << delta).
                    n += _decide_key((A, beta, B, gamma, C, delta, D))[1]
            out[ij] += n
    return out


def _exponent_classes(threshold: int):
    """(exponent, weight): explicit exponents, then one class per parity tail."""
    out = [(e, Fraction(1, 2**e)) for e in range(threshold)]
    for parity in (0, 1):
        e0 = threshold + (parity - threshold) % 2
        out.append((e0, Fraction(1, 2**e0) / (1 - Fraction(1, 4))))
    return out


def _check_stabilization(threshold: int) -> None:
    # Exponents at and beyond the threshold must only matter through parity.
    for e in (threshold - 2, threshold - 1):
        for small in range(4):
            for probe in ((e, small, 0), (small, e, 0), (0, small, e), (1, 0, e)):
                lo = _h_counts(*probe)
                hi = _h_counts(*(x + 2 if x == e else x for x in probe))
                if lo != hi:
                    raise StabilizationError(f"#H not parity-stable at exponent {e} for {probe}")


_TABLE6 = {}


def _all_components() -> dict:
    if _TABLE6:
        return _TABLE6
    _check_stabilization(STABILIZATION)
    acc = {(i, j): Fraction(0) for i in (1, 3) for j in range(4)}
    classes = _exponent_classes(STABILIZATION)
    for beta, wb in classes:
        for gamma, wg in classes:
            for delta, wd in classes:
                if min(gamma, delta) != 0 or min(beta, delta) > 1:
                    continue
                w = wb * wg * wd / 2**16
                for ij, h in _h_counts(beta, gamma, delta).items():
                    acc[ij] += h * w
    _TABLE6.update(acc)
    return _TABLE6


def tau2_component(i: int, j: int) -> Fraction:
    """2-adic density of tuples with (A, B) = (i, j) mod 4 and product solubility."""
    if i % 4 not in (1, 3):
        raise ArithmeticError_("i must be odd")
    return _all_components()[(i % 4, j % 4)]


def table6() -> dict:
    return {(1, j): tau2_component(1, j) for j in range(4)}


def tau_loc2_exact() -> Fraction:
    c = _all_components()
    # Classes with b even are counted twice: once directly and once as the
    # image of a tuple with a even under (a, b, c, d) -> (b, a, d, c).
    total = sum(c[(i, j)] for i in (1, 3) for j in (0, 2)) * 2 + sum(
        c[(i, j)] for i in (1, 3) for j in (1, 3)
    )
    if total != TAU_LOC_2:
        raise StabilizationError(f"2-adic density came out as {total}")
    return total


# ---------------------------------------------------------------------------
# Brute-force p-adic densities over (Z/p^k)^4 minus p(Z/p^k)^4.


def _delta_p(p: int) -> int:
    return 1 if p % 4 == 3 else 0


def _side_conditions(p, va, vb, vc, vd) -> bool:
    dp = _delta_p(p)
    return min(va, vc) <= 1 and min(vb, vd) <= 1 and min(va, vb) <= dp and min(vc, vd) <= dp


def density_bruteforce(p: int, k: int, method: Optional[str] = None, workers: int = 1) -> float:
    """Proportion of tuples mod p^k that are primitive, meet the valuation
    side conditions and give a surface with a p-adic point.

    At p = 2 the default ``method="box"`` takes each residue as its least
    nonnegative integer and accepts it when some (u, v) in [0, 2^k)^2, not
    both even, makes (a u^2 + b v^2)(c u^2 + d v^2) a nonzero 2-adic sum of
    two squares.  ``method="decider"`` instead applies the closed-form
    decider to the representative, reading 0 as 2^k.
    """
    if not is_probable_prime(p):
        raise ArithmeticError_(f"{p} is not prime")
    if k < 1:
        raise ArithmeticError_("k must be positive")
    check_budget(f"density_bruteforce({p}, {k})", p ** (4 * k))
    if p == 2:
        method = method or "box"
        if method == "box":
            return _density2_box(k, workers)
        if method == "decider":
            return _density2_decider(k)
        raise ValueError(f"unknown method {method!r}")
    return _density_odd(p, k)


def _residue_classes(p: int, k: int):
    """(valuation, unit class, count) for residues mod p^k; 0 has valuation k."""
    out = []
    for e in range(k):
        n = p ** (k - e - 1) * (p - 1)
        if p % 4 == 3:
            out += [(e, 1, n // 2), (e, -1, n // 2)]
        else:
            out.append((e, 1, n))
    out.append((k, 1, 1))
    return out


def _density_odd(p: int, k: int) -> float:
    from .localsolve import x_soluble_at_odd_p
    from .model import CanonicalSurface

    nonres = next(g for g in range(2, p) if pow(g, (p - 1) // 2, p) == p - 1)

    def rep(cls):
        e, chi, _ = cls
        return p**e * (1 if chi == 1 else nonres)

    classes = _residue_classes(p, k)
    total = 0
    for ca in classes:
        for cb in classes:
            if min(ca[0], cb[0]) > _delta_p(p):
                continue
            for cc in classes:
                if min(ca[0], cc[0]) > 1:
                    continue
                for cd in classes:
                    va, vb, vc, vd = ca[0], cb[0], cc[0], cd[0]
                    if min(va, vb, vc, vd) > 0 or not _side_conditions(p, va, vb, vc, vd):
                        continue
                    if p % 4 == 3:
                        s = CanonicalSurface(rep(ca), rep(cb), rep(cc), rep(cd))
                        if not x_soluble_at_odd_p(s, p):
                            continue
                    total += ca[2] * cb[2] * cc[2] * cd[2]
    return total / p ** (4 * k)


def _two_classes(k: int):
    """Per residue mod 2^k: class id, capped valuation; plus class reps."""
    M = 1 << k
    ids, reps = {}, []
    cls = np.empty(M, dtype=np.int64)
    val = np.empty(M, dtype=np.int64)
    for x in range(M):
        if x == 0:
            key, e = (k, 1), k
        else:
            e = (x & -x).bit_length() - 1
            key = (e, (x >> e) % 16)
        if key not in ids:
            ids[key] = len(reps)
            reps.append(key)
        cls[x] = ids[key]
        val[x] = e
    return cls, val, reps


def _decision_table(k: int, reps) -> np.ndarray:
    """Closed-form verdict per class 4-tuple: 1 soluble, 0 not, -1 unknown."""
    n = len(reps)
    table = np.full((n, n, n, n), -1, dtype=np.int8)
    for ia, (ea, oa) in enumerate(reps):
        for ib, (eb, ob) in enumerate(reps):
            if min(ea, eb) > 0:
                continue
            for ic, (ec, oc) in enumerate(reps):
                if min(ea, ec) > 1:
                    continue
                for id_, (ed, od) in enumerate(reps):
                    if min(ec, ed) > 0 or min(eb, ed) > 1:
                        continue
                    if k in (ea, eb, ec, ed):
                        continue
                    A, B, C, D = oa << ea, ob << eb, oc << ec, od << ed
                    if ea:
                        A, B, C, D = B, A, D, C
                    table[ia, ib, ic, id_] = decide_pair(A, B, C, D)[1]
    return table


def _density2_decider(k: int) -> float:
    M = 1 << k
    cls, val, reps = _two_classes(k)
    counts = np.bincount(cls, minlength=len(reps))
    rep_lift = [(e, o) if e < k else (k, 1) for e, o in reps]
    total = 0
    for ia, (ea, oa) in enumerate(rep_lift):
        for ib, (eb, ob) in enumerate(rep_lift):
            if min(ea, eb) > 0:
                continue
            for ic, (ec, oc) in enumerate(rep_lift):
                if min(ea, ec) > 1:
                    continue
                for id_, (ed, od) in enumerate(rep_lift):
                    if min(ec, ed) > 0 or min(eb, ed) > 1:
                        continue
                    A, B, C, D = oa << ea, ob << eb, oc << ec, od << ed
                    if ea:
                        A, B, C, D = B, A, D, C
                    if decide_pair(A, B, C, D)[1]:
                        total += int(counts[ia] * counts[ib] * counts[ic] * counts[id_])
    return total / M**4


def _box_kernel():
    import numba

    @numba.njit(cache=True)
    def in_d(f):
        while f % 2 == 0:
            f //= 2
        return f % 4 == 1

    @numba.njit(cache=True)
    def run(k, a_lo, a_hi, cls, val, table):
        M = 1 << k
        total = 0
        wu, wv = 1, 1
        for a in range(a_lo, a_hi):
            va = val[a]
            for b in range(M):
                vb = val[b]
                if va > 0 and vb > 0:
                    continue
                for c in range(M):
                    vc = val[c]
                    if va > 1 and vc > 1:
                        continue
                    for d in range(M):
                        vd = val[d]
                        if (vc > 0 and vd > 0) or (vb > 1 and vd > 1):
                            continue
                        verdict = table[cls[a], cls[b], cls[c], cls[d]]
                        if verdict == 0:
                            continue
                        f = (a * wu * wu + b * wv * wv) * (c * wu * wu + d * wv * wv)
                        if f != 0 and in_d(f):
                            total += 1
                            continue
                        found = False
                        for u in range(M):
                            for v in range(M):
                                if u % 2 == 0 and v % 2 == 0:
                                    continue
                                f = (a * u * u + b * v * v) * (c * u * u + d * v * v)
                                if f != 0 and in_d(f):
                                    found = True
                                    wu, wv = u, v
                                    break
                            if found:
                                break
                        if found:
                            total += 1
        return total

    return run


def _box_shard(args) -> int:
    k, lo, hi = args
    cls, val, reps = _two_classes(k)
    table = _decision_table(k, reps)
    return int(_box_kernel()(k, lo, hi, cls, val, table))


def _density2_box(k: int, workers: int = 1) -> float:
    if 3 * k + 2 > 62:
        raise ArithmeticError_("k too large for 64-bit box search")
    M = 1 << k
    step = max(1, M // max(1, 4 * workers))
    shards = [(k, lo, min(M, lo + step)) for lo in range(0, M, step)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            total = sum(pool.map(_box_shard, shards))
    else:
        cls, val, reps = _two_classes(k)
        table = _decision_table(k, reps)
        kernel = _box_kernel()
        total = sum(int(kernel(k, lo, hi, cls, val, table)) for _, lo, hi in shards)
    return total / M**4
