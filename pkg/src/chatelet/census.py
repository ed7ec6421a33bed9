"""Counting surfaces in a height box.

Tuples (a, b, c, d) with max |coordinate| <= P are taken modulo +-1 (so
a > 0) and kept when they are primitive, nondegenerate, have gcd(a, c) and
gcd(b, d) squarefree and gcd(a, b), gcd(c, d) squarefree with only primes
3 mod 4.  Each kept tuple is classified as locally obstructed, having a
rational point, or failing the Hasse principle.  Tuples with a even are
classified through (a, b, c, d) -> (b, a, d, c), which is an isomorphism.

Every count is divided by 4, one for each choice of the two generating maps.
"""

from __future__ import annotations

import csv
import math
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .arith import ArithmeticError_
from .budget import check_budget
from .twoadic import decide_pair

__all__ = [
    "CensusReport",
    "DecayFit",
    "run_census",
    "decay_fit",
    "classify",
    "members",
    "write_csv",
    "OBSTRUCTED",
    "RATIONAL",
    "HASSE",
]

OBSTRUCTED, RATIONAL, HASSE = 0, 1, 2


# ---------------------------------------------------------------------------
# Lean classifier.  Same decision procedure as ``descent.decide`` but on bare
# integers, with factorisations read off a smallest-prime-factor table.


class _Tables:
    def __init__(self, P: int):
        limit = 2 * P * P + 2
        spf = np.zeros(limit + 1, dtype=np.int64)
        for p in range(2, math.isqrt(limit) + 1):
            if spf[p] == 0:
                block = spf[p * p :: p]
                block[block == 0] = p
        idx = np.flatnonzero(spf == 0)
        spf[idx] = idx
        self.spf = spf.tolist()

    def primes(self, n: int) -> list[int]:
        n = abs(n)
        out = []
        spf = self.spf
        while n > 1:
            p = spf[n]
            out.append(p)
            while n % p == 0:
                n //= p
        return out


def _vp(x: int, p: int) -> tuple[int, int]:
    e = 0
    while x % p == 0:
        x //= p
        e += 1
    return e, x


def _bracket(x: int, p: int) -> int:
    e, u = _vp(x, p)
    if e % 2:
        return 1
    return 1 if pow(u % p, (p - 1) // 2, p) == 1 else -1


def classify(t, tables: _Tables) -> int:
    """OBSTRUCTED, RATIONAL or HASSE for a representative with a odd, a > 0."""
    a, b, c, d = t
    if b > 0 and c < 0 and d < 0:
        return OBSTRUCTED
    m, n = math.gcd(a, b), math.gcd(c, d)
    a1, b1, c1, d1 = a // m, b // m, c // n, d // n
    sigma = 1 if (m * n) % 4 == 1 else -1
    if not decide_pair(sigma * a1, sigma * b1, c1, d1)[1]:
        return OBSTRUCTED
    mn = m * n
    if mn > 1:
        for p in tables.primes(mn):
            va, vb, vc, vd = _vp(a1, p)[0], _vp(b1, p)[0], _vp(c1, p)[0], _vp(d1, p)[0]
            if (va == vc and va > 0) or (vb == vd and vb > 0):
                return OBSTRUCTED
            if _bracket(-a1 * b1, p) != 1 and _bracket(-c1 * d1, p) != 1:
                return OBSTRUCTED

    # Real signs of admissible torsors.
    delta = a * d - b * c
    if c > 0:
        if b < 0 and d < 0:
            return RATIONAL
        sign = 1
    else:
        plus = d > 0 and delta > 0
        minus = b < 0 and delta < 0
        if plus and minus:
            return RATIONAL
        sign = 1 if plus else -1

    dp = a1 * d1 - b1 * c1
    e1 = e2 = sign
    for p in sorted(set(tables.primes(mn)) | set(tables.primes(dp))):
        if p % 4 != 3:
            continue
        r1, r2 = _bracket(-a1 * b1, p), _bracket(-c1 * d1, p)
        if mn % p:
            if r1 + r2 > 0 and dp % p == 0:
                return RATIONAL
            continue
        if r2 == -1:
            e1 *= p
            continue
        if r1 == -1:
            e2 *= p
            continue
        va, vb, vc, vd = _vp(a1, p)[0], _vp(b1, p)[0], _vp(c1, p)[0], _vp(d1, p)[0]
        first = not (_blocked(va, vc) or _blocked(vb, vd))
        second = not (_blocked(vc, va) or _blocked(vd, vb))
        if first and second:
            return RATIONAL
        if first:
            e1 *= p
        else:
            e2 *= p
    eps1 = 1 if e1 % 4 == 1 else -1
    eps2 = 1 if e2 % 4 == 1 else -1
    if decide_pair(eps1 * a1, eps1 * b1, eps2 * c1, eps2 * d1)[0]:
        return RATIONAL
    return HASSE


def _blocked(x: int, y: int) -> bool:
    return x >= 2 and x % 2 == 0 and y == 1


# ---------------------------------------------------------------------------
# Enumeration.


def _class_tables(P: int):
    sqf = np.ones(P + 1, dtype=bool)
    in_b = np.ones(P + 1, dtype=bool)
    sqf[0] = in_b[0] = False
    for q in range(2, math.isqrt(P) + 1):
        sqf[q * q :: q * q] = False
    for p in range(2, P + 1):
        if all(p % r for r in range(2, math.isqrt(p) + 1)) and p % 4 != 3:
            in_b[p::p] = False
    in_b &= sqf
    return sqf, in_b


def _cd_grid(P: int):
    vals = np.array([x for x in range(-P, P + 1) if x], dtype=np.int64)
    C, D = np.meshgrid(vals, vals, indexing="ij")
    C, D = C.ravel(), D.ravel()
    return C, D, np.gcd(C, D)


def members(P: int, a_values):
    """Yield every box member with a in ``a_values`` (a > 0), in order."""
    sqf, in_b = _class_tables(P)
    C, D, G = _cd_grid(P)
    ok_cd = in_b[G]
    for a in a_values:
        for b in range(-P, P + 1):
            if b == 0:
                continue
            m = math.gcd(a, b)
            if not in_b[m]:
                continue
            ok = ok_cd & (np.gcd(m, G) == 1) & sqf[np.gcd(a, C)] & sqf[np.gcd(b, D)] & (a * D - b * C != 0)
            for c, d in zip(C[ok].tolist(), D[ok].tolist()):
                yield a, b, c, d


def _oriented(t):
    a, b, c, d = t
    if a % 2:
        return t
    return (b, a, d, c) if b > 0 else (-b, -a, -d, -c)


def _shard(args) -> Counter:
    P, a_values = args
    tables = _Tables(P)
    out = Counter()
    for t in members(P, a_values):
        out[classify(_oriented(t), tables)] += 1
    return out


@dataclass(frozen=True)
class CensusReport:
    P: int
    mode: str
    N: Fraction
    N_loc: Fraction
    N_glob: Fraction
    N_Br: Fraction
    obstructed: Fraction  # (number locally obstructed) / 4
    ratios: dict
    ci: Optional[dict] = None
    samples: Optional[int] = None
    seed: Optional[int] = None
    accepted: Optional[int] = None
    workers: int = 1
    seconds: float = field(default=0.0, compare=False)

    def check(self) -> None:
        assert self.N == self.N_loc + self.obstructed
        assert self.N_loc == self.N_glob + self.N_Br
        assert min(self.N, self.N_loc, self.N_glob, self.N_Br, self.obstructed) >= 0

    def to_json(self, timing: bool = True) -> dict:
        return {
            "P": self.P,
            "mode": self.mode,
            "counts": {k: _q(getattr(self, k)) for k in ("N", "N_loc", "N_glob", "N_Br")},
            "ratios": {k: float(v) for k, v in self.ratios.items()},
            "ci": self.ci,
            "seed": self.seed,
            "samples": self.samples,
            "workers": self.workers,
            "seconds": round(self.seconds, 3) if timing else None,
        }


def _q(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _ratios(total, loc, glob, br) -> dict:
    if total == 0:
        return {}
    return {"loc_over_total": loc / total, "glob_over_total": glob / total, "br_over_total": br / total}


def _wilson(k: int, n: int) -> list[float]:
    from scipy.stats import binomtest

    ci = binomtest(k, n).proportion_ci(confidence_level=0.95, method="wilson")
    return [float(ci.low), float(ci.high)]


def run_census(
    P: int,
    mode: str = "exhaustive",
    samples: int = 0,
    seed: int = 0,
    workers: int = 1,
) -> CensusReport:
    if P < 1:
        raise ArithmeticError_("P must be positive")
    t0 = time.perf_counter()
    if mode == "exhaustive":
        check_budget(f"exhaustive census at P={P}", (2 * P + 1) ** 4)
        counts = _exhaustive(P, workers)
        n_all = sum(counts.values())
        q = Fraction(1, 4)
        rep = CensusReport(
            P=P,
            mode=mode,
            N=n_all * q,
            N_loc=(counts[RATIONAL] + counts[HASSE]) * q,
            N_glob=counts[RATIONAL] * q,
            N_Br=counts[HASSE] * q,
            obstructed=counts[OBSTRUCTED] * q,
            ratios=_ratios(n_all, counts[RATIONAL] + counts[HASSE], counts[RATIONAL], counts[HASSE]),
            workers=workers,
        )
    elif mode == "sample":
        if samples < 1:
            raise ArithmeticError_("sample mode needs at least one sample")
        check_budget(f"sampled census with {samples} draws", samples)
        counts, accepted = _sampled(P, samples, seed)
        # Members among signed tuples are (accepted/samples) (2P+1)^4; halve
        # for +-1 and quarter for the generating maps.
        scale = Fraction((2 * P + 1) ** 4, 8 * samples)
        loc = counts[RATIONAL] + counts[HASSE]
        ci = None
        if accepted:
            ci = {
                "loc_over_total": _wilson(loc, accepted),
                "glob_over_total": _wilson(counts[RATIONAL], accepted),
                "br_over_total": _wilson(counts[HASSE], accepted),
            }
        rep = CensusReport(
            P=P,
            mode=mode,
            N=accepted * scale,
            N_loc=loc * scale,
            N_glob=counts[RATIONAL] * scale,
            N_Br=counts[HASSE] * scale,
            obstructed=counts[OBSTRUCTED] * scale,
            ratios=_ratios(accepted, loc, counts[RATIONAL], counts[HASSE]),
            ci=ci,
            samples=samples,
            seed=seed,
            accepted=accepted,
            workers=1,
        )
    else:
        raise ValueError(f"unknown census mode {mode!r}")
    rep.check()
    object.__setattr__(rep, "seconds", time.perf_counter() - t0)
    return rep


def _exhaustive(P: int, workers: int) -> Counter:
    # Interleave a-strips so shards carry similar work.
    nshards = max(1, workers) * 4
    shards = [(P, list(range(1 + i, P + 1, nshards))) for i in range(min(nshards, P))]
    total = Counter()
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            for part in pool.map(_shard, shards):
                total += part
    else:
        for s in shards:
            total += _shard(s)
    return Counter({k: total.get(k, 0) for k in (OBSTRUCTED, RATIONAL, HASSE)})


def _is_member(t, sqf, in_b) -> bool:
    a, b, c, d = t
    if 0 in t or a * d == b * c:
        return False
    m, n = math.gcd(a, b), math.gcd(c, d)
    return bool(
        in_b[m] and in_b[n] and math.gcd(m, n) == 1 and sqf[math.gcd(a, c)] and sqf[math.gcd(b, d)]
    )


def _sampled(P: int, samples: int, seed: int):
    rng = np.random.default_rng(seed)
    sqf, in_b = _class_tables(P)
    tables = _Tables(P)
    counts = Counter()
    accepted = 0
    left = samples
    while left:
        n = min(left, 1 << 16)
        left -= n
        draw = rng.integers(-P, P + 1, size=(n, 4))
        for row in draw.tolist():
            t = tuple(row)
            if not _is_member(t, sqf, in_b):
                continue
            if t[0] < 0:
                t = tuple(-x for x in t)
            accepted += 1
            counts[classify(_oriented(t), tables)] += 1
    return counts, accepted


@dataclass(frozen=True)
class DecayFit:
    rows: list  # (P, c_est)
    low: float
    high: float

    @property
    def spread(self) -> float:
        return self.high / self.low if self.low > 0 else math.inf

    def to_json(self) -> dict:
        return {
            "rows": [{"P": P, "c_est": c} for P, c in self.rows],
            "min": self.low,
            "max": self.high,
            "spread": self.spread,
        }


def decay_fit(reports) -> DecayFit:
    """N_Br(P) (log P)^(1/4) / P^4 for each exhaustive report."""
    reports = sorted(reports, key=lambda r: r.P)
    if len(reports) < 2:
        raise ArithmeticError_("decay_fit needs at least two reports")
    if len({r.P for r in reports}) != len(reports):
        raise ArithmeticError_("decay_fit needs distinct box sizes")
    for r in reports:
        if r.mode != "exhaustive" or r.P < 10:
            raise ArithmeticError_("decay_fit needs exhaustive reports with P >= 10")
    rows = [(r.P, float(r.N_Br) * math.log(r.P) ** 0.25 / r.P**4) for r in reports]
    vals = [c for _, c in rows]
    return DecayFit(rows, min(vals), max(vals))


_CSV_FIELDS = ["P", "mode", "N", "N_loc", "N_glob", "N_Br", "loc_over_total", "glob_over_total", "br_over_total"]


def write_csv(reports, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(_CSV_FIELDS)
        for r in reports:
            w.writerow(
                [r.P, r.mode, _q(r.N), _q(r.N_loc), _q(r.N_glob), _q(r.N_Br)]
                + [float(r.ratios.get(k, float("nan"))) for k in _CSV_FIELDS[6:]]
            )
