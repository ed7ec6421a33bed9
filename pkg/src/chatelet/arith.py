"""Exact elementary number theory used throughout the package.

Everything here is a pure function of integer arguments.  Factorisation uses
trial division up to 2**20 followed by Pollard--Brent rho with a fixed seed,
so results are reproducible run to run.
"""

from __future__ import annotations

import math
import random
from functools import lru_cache

__all__ = [
    "ArithmeticError_",
    "FactorizationError",
    "factorize",
    "is_probable_prime",
    "valuation",
    "split_valuation",
    "legendre",
    "bracket",
    "class_membership",
    "is_squarefree",
    "sum_two_squares",
    "is_sum_two_squares",
    "primes_up_to",
]

MAX_FACTOR_INPUT = 1 << 96
TRIAL_BOUND = 1 << 20
RHO_SEED = 0x5EED
RHO_ITERATIONS = 1 << 22


class ArithmeticError_(ValueError):
    """Domain error raised on invalid arithmetic input."""


class FactorizationError(RuntimeError):
    """A composite cofactor survived the rho budget."""


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71)


def is_probable_prime(n: int) -> bool:
    """Miller--Rabin with the first twenty prime bases.

    Deterministic below 3.3e24; a strong probable-prime test beyond that.
    """
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@lru_cache(maxsize=1)
def _small_primes() -> tuple[int, ...]:
    return tuple(int(p) for p in primes_up_to(TRIAL_BOUND))


def primes_up_to(n: int):
    """All primes <= n as a numpy array (sieve of Eratosthenes)."""
    import numpy as np

    if n < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    sieve[4::2] = False
    for i in range(3, math.isqrt(n) + 1, 2):
        if sieve[i]:
            sieve[i * i :: 2 * i] = False
    return np.flatnonzero(sieve).astype(np.int64)


def _brent(n: int, rng: random.Random) -> int:
    if n % 2 == 0:
        return 2
    for _ in range(64):
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g = r = q = 1
        steps = 0
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
            steps += r
            if steps > RHO_ITERATIONS:
                raise FactorizationError(f"rho budget exhausted on {n}")
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
    raise FactorizationError(f"rho failed to split {n}")


def factorize(n: int) -> dict[int, int]:
    """Prime factorisation of |n| as an ordered ``{prime: exponent}`` dict."""
    if n == 0:
        raise ArithmeticError_("cannot factor 0")
    n = abs(n)
    if n >= MAX_FACTOR_INPUT:
        raise ArithmeticError_(f"|n| exceeds 2**96: {n}")
    return dict(sorted(_factor_cached(n)))


@lru_cache(maxsize=1 << 16)
def _factor_cached(n: int) -> tuple[tuple[int, int], ...]:
    out: dict[int, int] = {}
    for p in _small_primes():
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out[p] = e
    if n > 1:
        rng = random.Random(RHO_SEED)
        stack = [n]
        while stack:
            m = stack.pop()
            if m == 1:
                continue
            if is_probable_prime(m):
                out[m] = out.get(m, 0) + 1
                continue
            d = _brent(m, rng)
            stack.extend((d, m // d))
    return tuple(sorted(out.items()))


def valuation(n: int, p: int) -> int:
    """Largest e with p**e dividing n."""
    if n == 0:
        raise ArithmeticError_("valuation of 0 is infinite")
    if p == 2:
        return (n & -n).bit_length() - 1
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e


def split_valuation(n: int, p: int) -> tuple[int, int]:
    """Return (v_p(n), n / p**v_p(n))."""
    if n == 0:
        raise ArithmeticError_("valuation of 0 is infinite")
    if p == 2:
        e = (n & -n).bit_length() - 1
        return e, n >> e
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e, n


def _check_odd_prime(p: int) -> None:
    if p < 3 or p % 2 == 0 or not is_probable_prime(p):
        raise ArithmeticError_(f"{p} is not an odd prime")


def legendre(n: int, p: int) -> int:
    """Legendre symbol (n/p) for an odd prime p; 0 when p divides n."""
    _check_odd_prime(p)
    r = pow(n % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def _legendre_unchecked(n: int, p: int) -> int:
    r = pow(n % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def bracket(n: int, p: int) -> int:
    """+1 if v_p(n) is odd, else the Legendre symbol of the p-free part."""
    if n == 0:
        raise ArithmeticError_("bracket symbol undefined at 0")
    _check_odd_prime(p)
    e, u = split_valuation(n, p)
    if e % 2:
        return 1
    return _legendre_unchecked(u, p)


def is_squarefree(n: int) -> bool:
    if n == 0:
        return False
    return all(e == 1 for e in factorize(n).values())


def class_membership(n: int) -> tuple[bool, bool]:
    """(n squarefree, n squarefree with every prime factor 3 mod 4)."""
    if n < 1:
        raise ArithmeticError_("class membership defined for n >= 1")
    f = factorize(n)
    in_a = all(e == 1 for e in f.values())
    return in_a, in_a and all(p % 4 == 3 for p in f)


def is_sum_two_squares(n: int) -> bool:
    if n < 0:
        return False
    if n == 0:
        return True
    return all(e % 2 == 0 for p, e in factorize(n).items() if p % 4 == 3)


def _prime_two_squares(p: int) -> tuple[int, int]:
    # Cornacchia / Hermite-Serret: reduce p against a square root of -1.
    if p == 2:
        return 1, 1
    c = 2
    while pow(c, (p - 1) // 2, p) != p - 1:
        c += 1
    r = pow(c, (p - 1) // 4, p)
    a, b = p, r
    limit = math.isqrt(p)
    while b > limit:
        a, b = b, a % b
    y, z = b, math.isqrt(p - b * b)
    return min(y, z), max(y, z)


def sum_two_squares(n: int) -> tuple[int, int] | None:
    """A pair (y, z) with y <= z and y*y + z*z == n, or None if impossible."""
    if n < 1:
        raise ArithmeticError_("sum_two_squares expects n >= 1")
    f = factorize(n)
    if any(e % 2 for p, e in f.items() if p % 4 == 3):
        return None
    # Multiply Gaussian integers x + iy.
    x, y = 1, 0
    for p, e in f.items():
        if p % 4 == 3:
            x, y = x * p ** (e // 2), y * p ** (e // 2)
            continue
        s, t = _prime_two_squares(p)
        for _ in range(e):
            x, y = x * s - y * t, x * t + y * s
    y, z = sorted((abs(x), abs(y)))
    return y, z
