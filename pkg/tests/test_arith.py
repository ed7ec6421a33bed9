import math

import pytest
from hypothesis import given, strategies as st

from chatelet.arith import (
    ArithmeticError_,
    bracket,
    class_membership,
    factorize,
    is_probable_prime,
    legendre,
    primes_up_to,
    sum_two_squares,
    valuation,
)


def trial_division(n):
    out, n, p = {}, abs(n), 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def test_factorize_examples():
    assert factorize(360) == {2: 3, 3: 2, 5: 1}
    assert factorize(1) == {}
    assert factorize(9991) == {97: 1, 103: 1}
    assert factorize(-12) == {2: 2, 3: 1}


def test_factorize_zero():
    with pytest.raises(ArithmeticError_):
        factorize(0)


def test_factorize_large_semiprime():
    p, q = 1000000007, 998244353
    assert factorize(p * q * 4) == {2: 2, q: 1, p: 1}
    big = (1 << 61) - 1
    assert factorize(big * 3) == {3: 1, big: 1}


@given(st.integers(min_value=-(10**12), max_value=10**12).filter(bool))
def test_factorize_reconstructs(n):
    f = factorize(n)
    assert list(f) == sorted(f)
    assert all(is_probable_prime(p) for p in f)
    assert math.prod(p**e for p, e in f.items()) == abs(n)


@given(st.integers(min_value=1, max_value=10**6))
def test_factorize_matches_trial_division(n):
    assert factorize(n) == trial_division(n)


def test_valuation():
    assert valuation(40, 2) == 3
    assert valuation(98, 7) == 2
    assert valuation(15, 2) == 0
    with pytest.raises(ArithmeticError_):
        valuation(0, 3)


def test_legendre():
    assert legendre(2, 7) == 1
    assert legendre(3, 7) == -1
    assert legendre(14, 7) == 0
    with pytest.raises(ArithmeticError_):
        legendre(3, 9)
    with pytest.raises(ArithmeticError_):
        legendre(3, 2)


@given(st.sampled_from([3, 5, 7, 11, 13, 101, 1009]), st.integers(1, 10**6), st.integers(1, 10**6))
def test_legendre_multiplicative(p, n, m):
    if n % p == 0 or m % p == 0:
        return
    assert legendre(n * m, p) == legendre(n, p) * legendre(m, p)
    assert legendre(n, p) == (1 if pow(n, (p - 1) // 2, p) == 1 else -1)


def test_bracket():
    assert bracket(14, 7) == 1
    assert bracket(45, 7) == -1
    assert bracket(147, 7) == -1
    with pytest.raises(ArithmeticError_):
        bracket(0, 7)


@given(st.sampled_from([3, 7, 11, 19, 23]), st.integers(-(10**6), 10**6).filter(bool))
def test_bracket_odd_valuation_branch(p, n):
    if valuation(n, p) % 2 == 0:
        assert bracket(p * n, p) == 1
    assert bracket(n, p) in (1, -1)


def test_class_membership():
    assert class_membership(21) == (True, True)
    assert class_membership(15) == (True, False)
    assert class_membership(9) == (False, False)
    assert class_membership(1) == (True, True)
    assert class_membership(2) == (True, False)


def test_sum_two_squares_examples():
    assert sum_two_squares(5) == (1, 2)
    assert sum_two_squares(21) is None
    assert sum_two_squares(544) == (12, 20)
    assert sum_two_squares(1) == (0, 1)


def test_sum_two_squares_exhaustive():
    limit = 10**4
    representable = set()
    for y in range(math.isqrt(limit) + 1):
        for z in range(y, math.isqrt(limit - y * y) + 1):
            representable.add(y * y + z * z)
    for n in range(1, limit + 1):
        w = sum_two_squares(n)
        assert (w is not None) == (n in representable), n
        if w is not None:
            y, z = w
            assert 0 <= y <= z and y * y + z * z == n


@given(st.integers(min_value=1, max_value=10**15))
def test_sum_two_squares_criterion(n):
    ok = all(e % 2 == 0 for p, e in factorize(n).items() if p % 4 == 3)
    w = sum_two_squares(n)
    assert (w is not None) == ok
    if w:
        assert w[0] ** 2 + w[1] ** 2 == n


def test_primes_up_to():
    assert list(primes_up_to(30)) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
