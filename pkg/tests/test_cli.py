import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from chebsys import (
    AlternationResult, FunctionSystem, certify_t_property, emit_report, load_report, remez,
    uniqueness_certificate,
)
from chebsys.cli import main

MONO4 = {"family": "monomial", "params": {"order": 4}, "domain": [-1, 1]}
TT2 = {"family": "custom", "params": {"polynomials": [[0, 1], [0, 0, 1]]}, "domain": [-1, 1]}


def run(tmp_path, command, cfg, *extra, name="out"):
    path = tmp_path / f"{name}.json"
    path.write_text(json.dumps(cfg))
    out = tmp_path / name
    code = main([command, "--config", str(path), "--out", str(out), *extra])
    report = load_report(out / "report.json") if (out / "report.json").exists() else None
    return code, report, out


def test_check_examples(tmp_path):
    code, rep, out = run(tmp_path, "check", {"system": MONO4, "samples": 100}, "--seed", "7")
    assert code == 0 and rep["result"]["certification"]["verdict"] == "certified-consistent"
    assert rep["provenance"]["seed"] == 7
    rows = list(csv.reader(open(out / "sweep.csv")))
    assert rows[0][-3:] == ["determinant", "sign", "smallest_singular_value"] and len(rows) == 101
    code, rep, _ = run(tmp_path, "check", {"system": TT2, "samples": 200}, name="tt2")
    assert code == 2 and rep["status"] == "refuted"
    knots = [t for t, _ in rep["result"]["certification"]["witness"]]
    assert min(knots) <= 0 <= max(knots)


@pytest.mark.parametrize("cfg,needle", [
    ({"system": {"family": "monomial", "params": {"order": 4}}}, "domain"),
    ({"system": MONO4, "sampels": 10}, "sampels"),
    ({"system": MONO4, "mode": "fuzzy"}, "mode"),
    ({"system": MONO4, "tolerances": {"singular_rtol": -1}}, "tolerances.singular_rtol"),
    ({"system": MONO4, "command": "remez"}, "command"),
])
def test_config_errors(tmp_path, capsys, cfg, needle):
    code, rep, _ = run(tmp_path, "check", cfg)
    assert code == 1 and rep is None
    assert needle in capsys.readouterr().err


def test_unreadable_config(tmp_path, capsys):
    assert main(["check", "--config", str(tmp_path / "missing.json")]) == 1
    (tmp_path / "bad.json").write_text("{not json")
    assert main(["check", "--config", str(tmp_path / "bad.json")]) == 1
    assert main(["bogus", "--config", "x"]) == 1


def test_interpolate_and_dt(tmp_path):
    cfg = {"system": {"family": "cauchy", "params": {"s": [1, 2, 3]}, "domain": [0, 1]},
           "data": [{"knot": 0.1, "values": [1]}, {"knot": 0.5, "values": [-2]}, {"knot": 0.9, "values": [0.5]}]}
    code, rep, _ = run(tmp_path, "interpolate", cfg)
    assert code == 0 and rep["result"]["relative_residual"] <= 1e-10
    cfg = {"system": TT2, "data": [{"knot": 0, "values": [1]}, {"knot": 1, "values": [1]}]}
    code, rep, _ = run(tmp_path, "interpolate", cfg, name="sing")
    assert code == 2 and rep["status"] == "singular" and rep["result"]["rank"] == 1
    cubic = {"family": "monomial", "params": {"order": 4}, "domain": [0, 1]}
    cfg = {"system": cubic, "alpha": 0, "beta": 1, "left": [0, 0], "right": [1, 0], "boundary_basis": True}
    code, rep, _ = run(tmp_path, "dt", cfg, name="dt")
    assert code == 0
    np.testing.assert_allclose(rep["result"]["coefficients"], [0, 0, 3, -2], atol=1e-12)
    np.testing.assert_allclose(rep["result"]["boundary_basis"]["boundary_data_matrix"], np.eye(4), atol=1e-10)


def test_remez(tmp_path):
    line = {"family": "monomial", "params": {"order": 2}, "domain": [-1, 1]}
    code, rep, out = run(tmp_path, "remez", {"system": line, "target": "t**2"})
    assert code == 0
    alt = rep["result"]["alternation"]
    assert alt["delta"] == 0.5 and len(alt["points"]) == 3
    rows = list(csv.reader(open(out / "error_curve.csv")))
    assert rows[0] == ["t", "f_minus_u"] and len(rows) == 502
    code, rep, _ = run(tmp_path, "remez", {"system": line, "target": "t**2", "candidate": [0, 0]}, name="cand")
    assert code == 2 and rep["result"]["refuted"]
    code, _, _ = run(tmp_path, "remez", {"system": line, "target": "import os"}, name="bad")
    assert code == 1


def test_moments(tmp_path):
    code, rep, _ = run(tmp_path, "moments", {"moments": [2, 0, 2 / 3, 0], "interval": [-1, 1]})
    assert code == 0
    np.testing.assert_allclose(rep["result"]["measure"]["nodes"], [-3**-0.5, 3**-0.5], atol=1e-12)
    code, rep, _ = run(tmp_path, "moments", {"moments": [1, 0, -1, 0], "interval": [-1, 1]}, name="neg")
    assert code == 2 and rep["status"] == "infeasible"
    code, rep, _ = run(tmp_path, "moments", {"moments": [1, 0.5, 0.25], "interval": [0, 1],
                                             "measure": {"nodes": [0.5], "weights": [1]}}, name="ver")
    assert code == 0 and rep["result"]["residual"] == 0.0


def test_polyharmonic(tmp_path):
    cfg = {"N": 2, "M": 3, "geometry": {"type": "subdisk", "rho": 0.5},
           "data": {"0": [1, 0], "2": [[0.5, -0.25], 0], "-2": [[0.5, 0.25], 0]},
           "field": {"radial_points": 5, "angular_points": 8}}
    code, rep, out = run(tmp_path, "polyharmonic", cfg)
    assert code == 0 and rep["result"]["certificate"]["verdict"] == "unique"
    assert len(rep["result"]["certificate"]["per_mode"]) == 4
    assert rep["result"]["boundary_relative_residual"] <= 1e-12
    rows = list(csv.reader(open(out / "field.csv")))
    assert rows[0] == ["r", "theta", "value"] and len(rows) == 41
    cfg = {"N": 2, "M": 3, "geometry": {"type": "concentric", "radii": [0.5, 0.5 + 1e-12]}, "data": {}}
    code, rep, _ = run(tmp_path, "polyharmonic", cfg, name="degen")
    assert code == 2 and rep["status"] == "degenerate"


def test_nested_build(tmp_path):
    cfg = {"weights": [1, 1, 1, 1], "anchor": 0, "domain": [-1, 2],
           "evaluate": {"points": [2.0], "deriv_orders": [0, 1]}, "certify": {"samples": 30}}
    code, rep, _ = run(tmp_path, "nested-build", cfg)
    assert code == 0
    assert rep["result"]["values"]["0"][3][0] == pytest.approx(4 / 3, abs=1e-10)
    assert rep["result"]["values"]["1"][3][0] == pytest.approx(2.0, abs=1e-10)
    assert rep["result"]["certification"]["verdict"] == "certified-consistent"


def _strip(path):
    doc = json.loads(path.read_text())
    doc.pop("generated_at")
    return json.dumps(doc, sort_keys=True)


def test_determinism(tmp_path):
    cfg = {"system": {"family": "gauss", "params": {"s": [-1, 0, 1]}, "domain": [-1, 1]}, "samples": 50}
    _, _, a = run(tmp_path, "check", cfg, "--seed", "3", name="a")
    _, _, b = run(tmp_path, "check", cfg, "--seed", "3", name="b")
    assert _strip(a / "report.json") == _strip(b / "report.json")
    assert (a / "sweep.csv").read_bytes() == (b / "sweep.csv").read_bytes()


def test_emit_examples(tmp_path):
    line = FunctionSystem.monomial(2, (-1, 1))
    res = remez(line, lambda t: t**2)
    assert isinstance(res, AlternationResult)
    p = emit_report(res, tmp_path / "r.json", command="remez", seed=0)
    doc = load_report(p)
    assert doc["result"]["delta"] == 0.5 and len(doc["result"]["points"]) == 3
    cert = certify_t_property(FunctionSystem.monomial(3), sample_count=20)
    doc = load_report(emit_report(cert, tmp_path / "c.json", command="check"))
    assert doc["result"]["min_abs_det"] > 0
    u = uniqueness_certificate(3, 8, "subdisk", rho=0.5)
    doc = load_report(emit_report(u, tmp_path / "u.json", command="polyharmonic"))
    assert len(doc["result"]["per_mode"]) == 9


def test_full_precision_and_nonfinite(tmp_path):
    x = 0.1 + 0.2
    doc = load_report(emit_report({"x": x, "big": float("inf"), "v": np.float32(1.5)},
                                  tmp_path / "p.json", command="check"))
    assert doc["result"]["x"] == x and doc["result"]["big"] == "inf" and doc["result"]["v"] == 1.5


def test_entry_point_and_logging(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"system": TT2, "samples": 50}))
    env_run = lambda level: subprocess.run(
        [sys.executable, "-m", "chebsys.cli", "check", "--config", str(path), "--out", str(tmp_path / level)],
        capture_output=True, text=True, env={**__import__("os").environ, "CHEBSYS_LOG": level})
    quiet, debug = env_run("quiet"), env_run("debug")
    assert quiet.returncode == 2 and debug.returncode == 2
    assert quiet.stderr == "" and "INFO" in debug.stderr
