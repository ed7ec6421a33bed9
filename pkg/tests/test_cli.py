import io
import json
import subprocess
import sys

import pytest

from chatelet.cli import iskovskikh_expected, run


def call(*argv):
    out = io.StringIO()
    code = run(list(argv), out)
    return code, out.getvalue()


def call_json(*argv):
    code, text = call(*argv, "--json")
    return code, json.loads(text)


def test_decide_json():
    code, doc = call_json("decide", "1", "-2", "-1", "3")
    assert code == 0
    assert doc["status"] == "hasse_failure"
    assert doc["epsilon"] == [1, 1]
    assert doc["representative"] == [1, -2, -1, 3]


def test_decide_canonicalizes_and_explains():
    code, doc = call_json("decide", "5", "-10", "-5", "15", "--explain")
    assert doc["representative"] == [1, -2, -1, 3]
    assert doc["explain"]["m"] == 1 and doc["explain"]["real_signs"] == [1]


def test_decide_witness():
    code, doc = call_json("decide", "1", "-1", "-1", "2", "--witness-height", "10")
    assert doc["status"] == "rational_point"
    assert doc["witness"] == {"u": 9, "v": 7, "t": 544, "y": 12, "z": 20}


def test_decide_refuses_degenerate():
    code, doc = call_json("decide", "1", "2", "2", "4")
    assert code == 1 and doc["error"] == "DegenerateDeterminant"


def test_human_mode():
    code, text = call("decide", "1", "2", "-1", "-1")
    assert code == 0
    assert "status: local_obstruction" in text
    assert "place: inf" in text


def test_usage_errors():
    assert call("frobnicate")[0] == 2
    assert call("decide", "1", "2")[0] == 2
    assert call("census", "--pmax", "3", "--bogus")[0] == 2


def test_family():
    code, doc = call_json("family", "iskovskikh", "--kmin", "2", "--kmax", "4")
    assert code == 0
    assert [r["status"] for r in doc["results"]] == ["rational_point", "hasse_failure", "rational_point"]
    assert doc["mismatches"] == 0


def test_iskovskikh_prediction():
    assert iskovskikh_expected(-5) == (False, False)
    assert iskovskikh_expected(3) == (True, False)
    assert iskovskikh_expected(28) == (True, False)
    assert iskovskikh_expected(112) == (False, False)
    assert iskovskikh_expected(7) == (True, False)
    assert iskovskikh_expected(2) == (True, True)


def test_constants_tau_loc_2():
    code, doc = call_json("constants", "--what", "tau-loc-2")
    assert doc["exact"] == "4751/9216"
    assert doc["value"].startswith("0.51551649")


def test_constants_table6():
    code, doc = call_json("constants", "--what", "table6")
    assert [r["exact"] for r in doc["components"][:4]] == ["89/2304", "17/384", "23/512", "95/2048"]


def test_constants_euler():
    code, doc = call_json("constants", "--what", "thm12-ratio", "--prime-bound", "1000")
    assert code == 0 and doc["prime_bound"] == 1000
    assert abs(float(doc["value"]) - 0.9818672) < 1e-4


def test_census_byte_identical():
    argv = ("census", "--pmax", "12", "--mode", "sample", "--samples", "5000", "--seed", "4", "--json")
    assert call(*argv) == call(*argv)


def test_census_outputs(tmp_path):
    path = tmp_path / "rows.csv"
    code, doc = call_json("census", "--pmax", "10", "12", "--fit", "--out", str(path))
    assert code == 0
    assert len(doc["reports"]) == 2 and len(doc["decay_fit"]["rows"]) == 2
    assert path.read_text().count("\n") == 3


def test_census_budget(monkeypatch):
    monkeypatch.setenv("CHATELET_WORK_BUDGET", "100")
    code, doc = call_json("census", "--pmax", "5")
    assert code == 1
    assert doc["error"] == "budget" and doc["estimated_cost"] == 11**4


def test_verify_tables():
    code, doc = call_json("verify", "tables", "--samples", "300", "--depth", "20", "--seed", "2")
    assert code == 0
    assert doc["checked"] == 300 and doc["disagreements"] == 0 and doc["inconclusive"] == 0


def test_verify_padic():
    code, doc = call_json("verify", "p-adic", "--p", "5", "--k", "2")
    assert code == 0 and abs(doc["difference"]) < 0.01


def test_verify_two_adic():
    code, doc = call_json("verify", "two-adic", "--k", "3")
    assert code == 0 and doc["exact"] == "4751/9216"


@pytest.mark.slow
def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "chatelet", "decide", "1", "-2", "-1", "3", "--json"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["status"] == "hasse_failure"
