import csv
import itertools
import json
import math
from fractions import Fraction

import pytest

from chatelet.arith import ArithmeticError_, class_membership
from chatelet.budget import BudgetExceeded
from chatelet.census import decay_fit, members, run_census, write_csv


def in_box_set(P):
    """The defining conditions, checked one tuple at a time."""
    vals = [x for x in range(-P, P + 1) if x]
    out = set()
    for a, b, c, d in itertools.product(range(1, P + 1), vals, vals, vals):
        if a * d == b * c:
            continue
        m, n = math.gcd(a, b), math.gcd(c, d)
        if math.gcd(m, n) != 1:
            continue
        if not (class_membership(m)[1] and class_membership(n)[1]):
            continue
        if not (class_membership(math.gcd(a, c))[0] and class_membership(math.gcd(b, d))[0]):
            continue
        out.add((a, b, c, d))
    return out


@pytest.mark.parametrize("P", [1, 2, 4, 5])
def test_members_match_definition(P):
    got = list(members(P, range(1, P + 1)))
    assert len(got) == len(set(got))
    assert set(got) == in_box_set(P)


def test_p1():
    r = run_census(1)
    assert r.N == 1
    r.check()


def test_p3_has_hasse_failure():
    r = run_census(3)
    assert r.N_Br >= Fraction(1, 4)
    r.check()


def test_partition_identities():
    r = run_census(8)
    r.check()
    assert r.N == r.N_glob + r.N_Br + r.obstructed
    assert 0 < r.ratios["loc_over_total"] < 1


def test_worker_independence():
    one = run_census(7, workers=1)
    two = run_census(7, workers=2)
    key = lambda r: (r.N, r.N_loc, r.N_glob, r.N_Br, r.obstructed)
    assert key(one) == key(two)


def test_sample_is_deterministic():
    a = run_census(20, mode="sample", samples=20000, seed=1)
    b = run_census(20, mode="sample", samples=20000, seed=1)
    assert a == b
    assert a.to_json(timing=False) == b.to_json(timing=False)
    assert a.ci["loc_over_total"][0] < a.ratios["loc_over_total"] < a.ci["loc_over_total"][1]


def test_sample_tracks_exhaustive():
    exact = run_census(10)
    est = run_census(10, mode="sample", samples=200000, seed=3)
    lo, hi = est.ci["loc_over_total"]
    assert lo - 0.01 <= exact.ratios["loc_over_total"] <= hi + 0.01
    assert abs(float(est.N / exact.N) - 1) < 0.05


def test_sample_needs_draws():
    with pytest.raises(ArithmeticError_):
        run_census(5, mode="sample", samples=0)


def test_budget_refusal(monkeypatch):
    monkeypatch.setenv("CHATELET_WORK_BUDGET", "1000")
    with pytest.raises(BudgetExceeded) as err:
        run_census(10)
    assert err.value.cost == 21**4


def test_json_schema():
    doc = run_census(4).to_json(timing=False)
    assert set(doc) == {"P", "mode", "counts", "ratios", "ci", "seed", "samples", "workers", "seconds"}
    assert set(doc["counts"]) == {"N", "N_loc", "N_glob", "N_Br"}
    assert set(doc["ratios"]) == {"loc_over_total", "glob_over_total", "br_over_total"}
    for v in doc["counts"].values():
        num, den = v.split("/")
        assert int(den) in (1, 2, 4)
    assert json.loads(json.dumps(doc)) == doc


def test_decay_fit_errors():
    with pytest.raises(ArithmeticError_):
        decay_fit([])
    with pytest.raises(ArithmeticError_):
        decay_fit([run_census(10)])
    with pytest.raises(ArithmeticError_):
        decay_fit([run_census(4), run_census(10)])


def test_decay_fit_rows():
    fit = decay_fit([run_census(12), run_census(10)])
    assert [P for P, _ in fit.rows] == [10, 12]
    assert fit.low > 0 and fit.spread >= 1


def test_csv(tmp_path):
    path = tmp_path / "c.csv"
    write_csv([run_census(3), run_census(4)], str(path))
    rows = list(csv.DictReader(open(path)))
    assert [r["P"] for r in rows] == ["3", "4"]
    assert Fraction(rows[0]["N_Br"]) >= Fraction(1, 4)
