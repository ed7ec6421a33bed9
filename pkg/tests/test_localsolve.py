import itertools

import pytest
from hypothesis import given, strategies as st

from chatelet.arith import valuation
from chatelet.localsolve import (
    INFINITY,
    Place,
    analyzed_primes,
    real_soluble,
    torsor_exponent_set,
    torsor_real_signs,
    x_locally_soluble,
    x_soluble_at_odd_p,
)
from chatelet.model import CanonicalSurface, is_representative

from padic_oracle import exponent_witnesses, product_parities


def S(*t):
    return CanonicalSurface.from_tuple(t)


def small_representatives(bound):
    vals = [x for x in range(-bound, bound + 1) if x]
    for t in itertools.product(range(1, bound + 1, 2), vals, vals, vals):
        if is_representative(t):
            yield CanonicalSurface(*t)


def test_real_soluble():
    assert not real_soluble(S(1, 2, -1, -3))
    assert real_soluble(S(1, -2, -1, 3))
    assert real_soluble(S(1, 1, 1, 3))


def test_x_soluble_at_odd_p_examples():
    assert x_soluble_at_odd_p(S(3, 15, 1, 4), 3)
    assert not x_soluble_at_odd_p(S(3, 3, 1, 4), 3)
    assert x_soluble_at_odd_p(S(1, -2, -1, 3), 3)


def test_x_soluble_at_odd_p_oracle_examples():
    assert 0 in product_parities(S(3, 15, 1, 4), 3, 3)
    assert product_parities(S(3, 3, 1, 4), 3, 3) == {1}


def test_x_locally_soluble_examples():
    v = x_locally_soluble(S(1, -2, -1, 3))
    assert v.soluble and v.obstruction is None
    assert x_locally_soluble(S(1, 2, -1, -1)).obstruction == INFINITY
    assert x_locally_soluble(S(1, -111, -1, 112)).obstruction == Place(2)


def test_torsor_real_signs():
    assert torsor_real_signs(S(1, -2, -1, 3)) == {1}
    assert torsor_real_signs(S(1, -2, 1, -3)) == {1, -1}
    assert torsor_real_signs(S(1, 1, 1, 3)) == {1}
    with pytest.raises(Exception):
        torsor_real_signs(S(1, 2, -1, -3))


def test_torsor_real_signs_sign_delta():
    s = S(1, -3, -1, 2)
    assert s.delta == -1
    assert torsor_real_signs(s) == {-1}


def test_exponent_set_examples():
    assert torsor_exponent_set(S(1, 2, 1, 5), 3) == {(0, 0), (1, 1)}
    assert torsor_exponent_set(S(1, 1, 1, 4), 3) == {(0, 0)}
    assert torsor_exponent_set(S(3, 15, 1, 4), 3) == {(1, 0)}


def test_exponent_set_examples_oracle():
    assert exponent_witnesses(S(1, 2, 1, 5), 3, 5)[0] >= {(0, 0), (1, 1)}
    assert (0, 0) in exponent_witnesses(S(1, 1, 1, 4), 3, 5)[0]
    assert (1, 1) not in exponent_witnesses(S(1, 1, 1, 4), 3, 5)[0]
    found, _ = exponent_witnesses(S(3, 15, 1, 4), 3, 5)
    assert (1, 0) in found and (0, 1) not in found


@given(
    st.tuples(
        st.integers(1, 400).filter(lambda x: x % 2),
        st.integers(-400, 400).filter(bool),
        st.integers(-400, 400).filter(bool),
        st.integers(-400, 400).filter(bool),
    ).filter(is_representative),
    st.sampled_from([3, 5, 7, 11, 13, 19, 23]),
)
def test_odd_p_away_from_mn(t, p):
    s = CanonicalSurface(*t)
    if (s.m * s.n) % p:
        assert x_soluble_at_odd_p(s, p)


def test_odd_p_oracle_sweep():
    checked = 0
    for s in small_representatives(6):
        if (s.m * s.n) % 3 == 0:
            seen = product_parities(s, 3, 4)
            assert x_soluble_at_odd_p(s, 3) == (0 in seen), s.coefficients
            checked += 1
    assert checked > 50


def test_exponent_sets_against_oracle():
    p, N = 3, 5
    checked = 0
    for s in small_representatives(7):
        if p not in analyzed_primes(s) or not x_soluble_at_odd_p(s, p):
            continue
        if valuation(s.delta_prime, p) > 2:
            continue
        got = torsor_exponent_set(s, p)
        found, _ = exponent_witnesses(s, p, N)
        pool = {(0, 0), (1, 1)} if (s.m * s.n) % p else {(1, 0), (0, 1)}
        assert got <= pool
        assert got == found & pool, s.coefficients
        checked += 1
    assert checked > 100


@given(
    st.tuples(
        st.integers(1, 200).filter(lambda x: x % 2),
        st.integers(-200, 200).filter(bool),
        st.integers(-200, 200).filter(bool),
        st.integers(-200, 200).filter(bool),
    ).filter(is_representative)
)
def test_inert_primes_give_trivial_exponents(t):
    s = CanonicalSurface(*t)
    for p in (3, 7, 11, 19, 23, 31):
        if (s.m * s.n * s.delta_prime) % p:
            assert torsor_exponent_set(s, p) == {(0, 0)}
            assert p not in analyzed_primes(s)


def test_rho1_swaps_exponents():
    checked = 0
    for s in small_representatives(6):
        a, b, c, d = s.coefficients
        if c < 0 or c % 2 == 0 or not is_representative((c, d, a, b)):
            continue
        r = CanonicalSurface(c, d, a, b)
        for p in analyzed_primes(s):
            if x_soluble_at_odd_p(s, p):
                swapped = {(k2, k1) for k1, k2 in torsor_exponent_set(s, p)}
                assert torsor_exponent_set(r, p) == swapped
                checked += 1
    assert checked > 50
