import csv
import io
import json

import numpy as np
import pytest

from bochner_forge.cli import main
from bochner_forge.errors import ConfigError
from bochner_forge.io import (SCHEMA, dumps, first_order_from_json, first_order_to_json, loads, pair_from_json,
                              pair_to_json, point_from_json, point_to_json)


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_dumps_round_trip_bits(scans):
    p = scans["III"].accepted[0]
    doc = loads(dumps(point_to_json(p)))
    assert doc["schema"] == SCHEMA
    q = point_from_json(doc)
    assert q.as_tuple() == p.as_tuple()


def test_non_finite_floats():
    doc = loads(dumps({"x": float("nan"), "y": float("inf")}))
    assert doc["x"] == "nan" and doc["y"] == "inf"


def test_foreign_schema():
    with pytest.raises(ConfigError):
        loads('{"schema": "other/2"}')
    with pytest.raises(ConfigError):
        loads("{not json")


def test_pair_round_trip(pairs):
    pair = pairs["II"][0]
    back = pair_from_json(loads(dumps(pair_to_json(pair))))
    x = np.linspace(-0.9, 0.9, 7)
    assert np.array_equal(back.W(x), pair.W(x))
    assert np.array_equal(back.D.A10, pair.D.A10)
    assert back.point.as_tuple() == pair.point.as_tuple()


def test_first_order_round_trip(darboux_search):
    c = darboux_search.accepted[0]
    f, G = first_order_from_json(loads(dumps(first_order_to_json(c.f, c.G))))
    assert np.array_equal(f.S1, c.f.S1) and np.array_equal(f.C, c.f.C) and np.array_equal(G, c.G)
    assert f.sign == c.f.sign


def test_verify_point_family_III(capsys, scans):
    doc = dumps(point_to_json(scans["III"].accepted[0]))
    code, out, _ = run_cli(capsys, "verify-point", "--input", doc)
    assert code == 0
    assert json.loads(out)["certificate"]["passed"]


def test_verify_point_bad_B12(capsys, scans):
    d = point_to_json(scans["I"].accepted[0])
    d["B0"] = np.array(d["B0"]).copy()
    d["B0"][0, 1] = 2.0
    code, out, _ = run_cli(capsys, "verify-point", "--input", dumps(d))
    assert code == 3
    assert json.loads(out)["certificate"]["values"]["membership"] == 1.0


def test_build_then_verify(capsys, tmp_path, scans):
    src = tmp_path / "p.json"
    src.write_text(dumps(point_to_json(scans["II"].accepted[1])))
    built = tmp_path / "pair.json"
    code, _, _ = run_cli(capsys, "build-family", "--input", str(src), "--out", str(built))
    assert code == 0
    code, out, _ = run_cli(capsys, "--command", "verify-point", "--input", str(built))
    assert code == 0


def test_recurrence_legendre_csv(capsys):
    code, out, _ = run_cli(capsys, "recurrence", "--input", '{"diagonal": [[0, 0], [0, 0]]}',
                           "--N", "12", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    for r in rows:
        n = int(r["n"])
        want = n * n / (4 * n * n - 1)
        for k in ("B11", "B12", "B21", "B22"):
            assert abs(float(r[k])) < 1e-10
        assert abs(float(r["C11"]) - want) < 1e-10 and abs(float(r["C22"]) - want) < 1e-10


def test_adcheck(capsys, scans):
    code, out, _ = run_cli(capsys, "adcheck", "--input", dumps(point_to_json(scans["I"].accepted[0])))
    assert code == 0
    assert json.loads(out)["max_Z1_Z0"] < 1e-8


def test_config_errors(capsys, tmp_path):
    assert run_cli(capsys, "verify-point", "--input", str(tmp_path / "missing.json"))[0] == 2
    assert run_cli(capsys, "recurrence", "--input", '{"diagonal": [[0, 0], [0, 0]]}', "--m", "10")[0] == 2
    assert run_cli(capsys, "recurrence", "--input", '{"diagonal": [[0, 0], [0, 0]]}', "--N", "1")[0] == 2
    assert run_cli(capsys, "verify-point", "--input", "{}", "--tol-cert", "symmetry=-1")[0] == 2
    assert run_cli(capsys, "verify-point", "--input", "{}", "--tol-cert", "symmetry")[0] == 2
    assert run_cli(capsys, "bogus")[0] == 2
    assert run_cli(capsys)[0] == 2


def test_tolerance_override(capsys, scans):
    doc = dumps(point_to_json(scans["III"].accepted[0]))
    code, out, _ = run_cli(capsys, "verify-point", "--input", doc, "--tol-cert", "symmetry=1e-30")
    assert code == 3
    assert "symmetry" in json.loads(out)["certificate"]["failures"]


def test_breakdown_exit(capsys):
    # a singular weight breaks the Gram-Schmidt recursion
    doc = {"weight": {"terms": [{"alpha": 0, "beta": 0, "P": [[[1, 1], [1, 1]]]}]},
           "operator": {"A11": [[-2, 0], [0, -2]], "A10": [[0, 0], [0, 0]], "A0": [[0, 0], [0, 0]]}}
    code, out, _ = run_cli(capsys, "recurrence", "--input", dumps(doc))
    assert code == 4


def test_deform_reports(capsys, scans):
    d = point_to_json(scans["III"].accepted[0])
    d["ks"] = [0.1]
    code, out, _ = run_cli(capsys, "deform", "--input", dumps(d))
    rows = json.loads(out)["rows"]
    assert len(rows) == 1 and rows[0]["k"] == 0.1
    assert code in (0, 3)


def test_darboux_deterministic(capsys, monkeypatch):
    monkeypatch.setenv("BOCHNER_THREADS", "1")
    code1, out1, _ = run_cli(capsys, "darboux")
    monkeypatch.setenv("BOCHNER_THREADS", "3")
    code2, out2, _ = run_cli(capsys, "darboux", "--threads", "1")
    assert code1 == code2 == 0
    assert out1 == out2
    doc = json.loads(out1)
    assert any(e["family"] in ("I", "II") for e in doc["found"])
