from __future__ import annotations

import csv
import io
import json
import subprocess
import sys

import pytest

from multlab.cli import main
from multlab.experiment import CSV_FIELDS


@pytest.fixture
def files(tmp_path):
    def write(name, data):
        path = tmp_path / name
        path.write_text(data if isinstance(data, str) else json.dumps(data))
        return str(path)
    return write


@pytest.fixture
def shear(files):
    return files("shear.json", {"n": 2, "mode": "affine", "components": ["1", "x1"]})


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# mult -----------------------------------------------------------------------------


def test_mult_finite(capsys, shear):
    code, out, _ = run(capsys, "mult", "--field", shear, "--poly", "x2", "--point", "0,0")
    assert code == 0
    assert "status: finite" in out and "order: 2" in out


def test_mult_json(capsys, shear):
    code, out, _ = run(capsys, "--format", "json", "mult", "--field", shear, "--poly", "x2", "--point", "[0, 0]")
    assert code == 0
    data = json.loads(out)
    assert (data["status"], data["order"]) == ("finite", 2)


def test_mult_singular_point(capsys, files):
    field = files("eig.json", {"n": 2, "components": ["2*x1", "3*x2"]})
    code, _, err = run(capsys, "mult", "--field", field, "--poly", "x1", "--point", "0,0")
    assert code == 2
    assert "singular point of V" in err


def test_mult_inconclusive(capsys, shear):
    code, out, _ = run(capsys, "mult", "--field", shear, "--poly", "x2", "--point", "0,0", "--cutoff", "1")
    assert code == 3 and "inconclusive" in out


def test_mult_certified_infinite(capsys, files):
    field = files("eig.json", {"n": 2, "components": ["2*x1", "3*x2"]})
    code, out, _ = run(capsys, "mult", "--field", field, "--poly", "x1^3 - x2^2", "--point", "1,1")
    assert code == 0 and "certified_infinite" in out


def test_mult_poly_file(capsys, shear, files):
    poly = files("p.txt", "x2 - 1/2*x1^2\n")
    code, out, _ = run(capsys, "mult", "--field", shear, "--poly-file", poly, "--point", "0,0")
    assert code == 0


def test_mult_parse_error_is_domain_error(capsys, shear):
    code, _, err = run(capsys, "mult", "--field", shear, "--poly", "x1 +", "--point", "0,0")
    assert code == 2 and "position 4" in err


def test_mult_usage_errors(capsys, shear, files):
    assert run(capsys, "mult", "--field", shear, "--point", "0,0")[0] == 1
    assert run(capsys, "mult", "--field", files("bad.json", "{"), "--poly", "x1", "--point", "0,0")[0] == 1
    assert run(capsys, "mult", "--field", shear, "--poly", "x1", "--point", "0,0", "--cutoff", "-2")[0] == 1
    assert run(capsys, "mult", "--field", shear, "--poly", "x1", "--point", "a,0")[0] == 1


# bounds ---------------------------------------------------------------------------


def test_bounds_table(capsys):
    code, out, _ = run(capsys, "bounds", "--n", "2", "--d", "3", "--delta", "2")
    assert code == 0
    for value in ("2696", "76", "128"):
        assert value in out
    assert "checked: sum <= weak" in out


def test_bounds_gr(capsys):
    code, out, _ = run(capsys, "--format", "json", "bounds", "--n", "3", "--d", "3", "--delta", "2", "--which", "gr")
    data = json.loads(out)
    values = {e["name"]: e["value"] for e in data["entries"]}
    assert code == 0 and values["gr"] == "99" and values["improved"] == "87"


def test_bounds_polytopes(capsys, files):
    p = files("p.json", {"n": 2, "points": [[0, 0], [3, 0], [0, 3]]})
    v = files("v.json", {"n": 2, "points": [[0, 0], [1, 0], [0, 1]]})
    code, out, _ = run(capsys, "--format", "csv", "bounds", "--n", "2", "--d", "3", "--delta", "2",
                       "--poly-polytope", p, "--field-polytope", v)
    rows = {r["name"]: r["value"] for r in csv.DictReader(io.StringIO(out))}
    assert code == 0
    assert (rows["mc_polytope_k0"], rows["mc_polytope_k1"]) == ("34", "3")
    assert (rows["mc_degree_k0"], rows["mc_degree_k1"]) == ("64", "12")


def test_bounds_multipoint(capsys):
    code, out, _ = run(capsys, "bounds", "--n", "2", "--d", "2", "--delta", "2", "--which", "degree",
                       "--multipoint", "1,5")
    assert code == 0 and "multipoint" in out and " 76 " in out


def test_bounds_malformed_polytope(capsys, files):
    bad = files("bad.json", {"n": 2, "points": [[0, 0.5]]})
    good = files("v.json", {"n": 2, "points": [[0, 0]]})
    code, _, _ = run(capsys, "bounds", "--n", "2", "--d", "3", "--delta", "2",
                     "--poly-polytope", bad, "--field-polytope", good)
    assert code == 1


def test_bounds_hypothesis_violation(capsys, files):
    p = files("p.json", {"n": 2, "points": [[0, 0], [3, 0], [0, 3]]})
    v = files("v.json", {"n": 2, "points": [[-1, 0]]})
    args = ["bounds", "--n", "2", "--d", "3", "--delta", "2", "--poly-polytope", p, "--field-polytope", v]
    assert run(capsys, *args)[0] == 2
    code, out, _ = run(capsys, *args, "--waive")
    assert code == 0 and "unverified" in out


# polytope ---------------------------------------------------------------------------


def test_polytope_ops(capsys, files):
    sq = files("sq.json", {"n": 2, "points": [[0, 0], [1, 0], [0, 1], [1, 1]]})
    tri = files("tri.json", {"n": 2, "points": [[0, 0], [1, 0], [0, 1]]})
    code, out, _ = run(capsys, "--format", "json", "polytope", "hull", sq)
    assert code == 0 and json.loads(out)[0]["vertices"] == [[0, 0], [0, 1], [1, 0], [1, 1]]
    assert "1/2" in run(capsys, "polytope", "volume", tri)[1]
    assert "1/2" in run(capsys, "polytope", "quermass", sq, "--j", "2")[1]
    code, out, _ = run(capsys, "--format", "json", "polytope", "bk-count", sq, tri)
    assert code == 0 and json.loads(out)["bk_count"] == 2
    code, out, _ = run(capsys, "--format", "json", "polytope", "mixed-volume", sq, tri)
    assert json.loads(out)["mixed_volume"] == "1"
    assert run(capsys, "polytope", "mixed-volume", sq)[0] == 2
    assert run(capsys, "polytope", "quermass", sq)[0] == 1


# witness ----------------------------------------------------------------------------


def test_witness_points(capsys, files):
    pts = files("pts.json", [[0, 0], [1, 1], [2, 2]])
    code, out, _ = run(capsys, "--format", "json", "witness", "--points", pts, "--n", "2", "--D", "1")
    assert code == 0 and json.loads(out) == [["0", "0"], ["1", "1"]]


def test_witness_levels(capsys, files):
    levels = files("lv.json", {"n": 1, "D": 1, "levels": [{"i": 1, "points": [[0], [1], [2], [3]]},
                                                          {"i": 2, "points": [[0], ["1/1"]]}]})
    code, out, _ = run(capsys, "--format", "json", "witness", "--levels", levels)
    assert code == 0 and json.loads(out) == [["0"], ["1"]]


def test_witness_cycle(capsys, files):
    cycle = files("cyc.json", [{"type": "hypersurface", "data": "x1 - x2", "coeff": 2},
                               {"type": "point", "data": [5, 5], "coeff": 1}])
    code, out, _ = run(capsys, "--format", "json", "witness", "--cycle", cycle, "--n", "2", "--at", "5,5")
    assert code == 0 and json.loads(out) == {"degf": 3}
    bad = files("bad.json", [{"type": "curve", "data": [], "coeff": 1}])
    assert run(capsys, "witness", "--cycle", bad, "--n", "2", "--at", "5,5")[0] == 1
    assert run(capsys, "witness")[0] == 1


# experiment -------------------------------------------------------------------------


def test_experiment_seed1_passes(capsys):
    code, out, _ = run(capsys, "experiment", "--seed", "1", "--n", "2", "--trials", "100")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 100
    assert list(rows[0]) == CSV_FIELDS
    assert all(r["pass"] == "pass" for r in rows)


def test_experiment_zero_trials(capsys):
    code, out, _ = run(capsys, "experiment", "--trials", "0")
    assert code == 0 and out == ",".join(CSV_FIELDS) + "\n"


def test_experiment_deterministic(capsys, monkeypatch):
    args = ["experiment", "--seed", "7", "--n", "3", "--trials", "15"]
    first = run(capsys, *args)[1]
    assert run(capsys, *args)[1] == first
    monkeypatch.setenv("MULTLAB_SEED", "7")
    assert run(capsys, "experiment", "--seed", "99", "--n", "3", "--trials", "15")[1] == first
    monkeypatch.setenv("MULTLAB_SEED", "8")
    assert run(capsys, *args)[1] != first


def test_experiment_replay(capsys, tmp_path):
    _, out, _ = run(capsys, "experiment", "--seed", "3", "--trials", "6")
    rows = list(csv.DictReader(io.StringIO(out)))
    _, dumped, _ = run(capsys, "experiment", "--seed", "3", "--instance", "4")
    path = tmp_path / "inst.json"
    path.write_text(dumped)
    code, replayed, _ = run(capsys, "experiment", "--replay", str(path))
    assert code == 0
    assert list(csv.DictReader(io.StringIO(replayed))) == [rows[4]]


def test_console_script_output_is_byte_identical(tmp_path):
    cmd = [sys.executable, "-m", "multlab.cli", "experiment", "--seed", "2", "--trials", "10"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and a.count(b"\n") == 11
