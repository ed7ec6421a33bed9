from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from chatelet.arith import ArithmeticError_, primes_up_to
from chatelet.budget import BudgetExceeded
from chatelet.constants import (
    RATIO_PREFACTOR,
    TAU_LOC_2,
    TAU_LOC_INF,
    density_bruteforce,
    euler_product,
    fraction_str,
    local_factor,
    table6,
    tau2_component,
    tau_loc2_exact,
)


def closed(p, kind):
    x = Fraction(1, p)
    if kind == "a_p":
        return (1 - x) ** 2 * (1 + 2 * x + x**2 - 2 * x**4)
    if kind == "b_p":
        return (1 + x) ** 2 * (1 + 2 * x + 3 * x**2 + 4 * x**3 - 4 * x**5)
    if kind == "c_p_prime":
        return (1 - x) ** 2 / (1 + x) ** 2 * (1 + 4 * x + 3 * x**2 + 2 * x**3 + Fraction(3, 2) * x**4 - 2 * x**5 - 2 * x**6)
    b = closed(p, "b_p")
    return 1 - (6 - 9 * x**2 + 4 * x**4) * x**4 / b


def test_local_factor_examples():
    assert local_factor(5, "a_p") == Fraction(14368, 15625)
    assert local_factor(3, "b_p") == Fraction(8288, 2187)
    assert local_factor(2, "a_p") == Fraction(17, 32)


@given(st.sampled_from(primes_up_to(400).tolist()), st.sampled_from(["a_p", "b_p", "c_p_prime", "ratio_factor"]))
def test_local_factor_closed_forms(p, kind):
    assert local_factor(p, kind) == closed(p, kind)


def test_local_factor_rejects_composites():
    with pytest.raises(ArithmeticError_):
        local_factor(9, "a_p")
    with pytest.raises(ValueError):
        local_factor(3, "bogus")


def test_prefactor_identity():
    assert Fraction(7 * 4751, 2**8 * 3**2 * 17) == Fraction(33257, 39168) == RATIO_PREFACTOR
    assert RATIO_PREFACTOR == TAU_LOC_INF * TAU_LOC_2 / Fraction(17, 16)


def test_loc_factor_identity():
    for p in primes_up_to(200).tolist()[1:]:
        assert local_factor(p, "loc_p") == local_factor(p, "a_p") + 2 * local_factor(p, "c_p_prime") / p**2


def test_ratio_factor_is_loc_over_tau():
    for p in (3, 7, 11, 19):
        tau_p = (1 - Fraction(1, p)) ** 2 * (1 + 2 * Fraction(1, p) + 3 * Fraction(1, p**2) + 4 * Fraction(1, p**3) - 4 * Fraction(1, p**5))
        assert local_factor(p, "ratio_factor") == local_factor(p, "loc_p") / tau_p


def test_table6():
    assert tau2_component(1, 0) == Fraction(89, 2304)
    assert tau2_component(1, 1) == Fraction(17, 384)
    assert tau2_component(1, 2) == Fraction(23, 512)
    assert tau2_component(1, 3) == Fraction(95, 2048)
    for j in range(4):
        assert tau2_component(3, j) == tau2_component(1, (-j) % 4)
    assert tau_loc2_exact() == Fraction(4751, 9216)
    rows = table6()
    assert 4 * (rows[1, 0] + rows[1, 2]) + 2 * (rows[1, 1] + rows[1, 3]) == Fraction(4751, 9216)


def test_euler_product_tail_bound():
    lo = euler_product("thm12_ratio", 2000)
    hi = euler_product("thm12_ratio", 4000)
    assert abs(float(lo.value - hi.value)) < lo.tail_bound
    a, b = lo.interval()
    assert a <= float(hi.value) <= b
    assert hi.tail_bound < lo.tail_bound


def test_euler_product_json():
    doc = euler_product("tau", 1000).to_json()
    assert set(doc) == {"name", "exact", "value", "prime_bound", "tail_bound"}
    assert doc["prime_bound"] == 1000 and doc["exact"] is None


def test_euler_product_assembly():
    tau_loc = euler_product("tau_loc", 5000)
    ratio = euler_product("hasse_ratio", 5000)
    tau = euler_product("tau", 5000)
    assert abs(float(tau_loc.value / tau.value - ratio.value)) < 1e-12
    assert tau_loc.exact_prefactor == Fraction(7, 4) * Fraction(4751, 9216)


def test_euler_product_needs_bound():
    with pytest.raises(ArithmeticError_):
        euler_product("tau", 50)


def test_fraction_str():
    assert fraction_str(Fraction(4751, 9216)) == "4751/9216"


def test_density_two_small():
    # values computed with this package's box search; the decider reading
    # differs at finite k and both approach 4751/9216
    assert density_bruteforce(2, 3) == pytest.approx(density_bruteforce(2, 3, workers=2))
    box = density_bruteforce(2, 5)
    dec = density_bruteforce(2, 5, method="decider")
    target = 4751 / 9216
    assert abs(box - target) < 0.01 and abs(dec - target) < 0.01


def test_density_p1_mod_4():
    for k in (1, 2, 3):
        assert abs(density_bruteforce(5, k) - float(local_factor(5, "a_p"))) < 0.01
    assert abs(density_bruteforce(13, 2) - float(local_factor(13, "a_p"))) < 0.001


def test_density_p3_direct_series(monkeypatch):
    # 24167/26244 sums the local density series at p = 3 term by term; the
    # brute force oscillates around it with shrinking amplitude.  The closed
    # form for loc_p at p = 3 gives 0.9318 instead.
    monkeypatch.setenv("CHATELET_WORK_BUDGET", str(10**20))
    limit = Fraction(24167, 26244)
    for k, tol in ((5, 1e-4), (6, 5e-5), (7, 1e-5)):
        assert abs(density_bruteforce(3, k) - float(limit)) < tol


def test_density_budget(monkeypatch):
    monkeypatch.setenv("CHATELET_WORK_BUDGET", "1000")
    with pytest.raises(BudgetExceeded) as err:
        density_bruteforce(3, 2)
    assert err.value.cost == 3**8


def test_density_rejects_bad_input():
    with pytest.raises(ArithmeticError_):
        density_bruteforce(4, 2)
    with pytest.raises(ArithmeticError_):
        density_bruteforce(3, 0)
