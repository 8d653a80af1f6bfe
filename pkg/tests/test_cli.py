import json

import numpy as np
import pytest

from sphereiso.algebra import read_grid_csv
from sphereiso.cli import RunConfig, InputError, main
from sphereiso.tingley import generate_oracle, random_sphere, spike


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    report = json.loads(out.out) if out.out.strip() else None
    return code, report, out.err


def test_report_fields(capsys):
    code, rep, _ = run(capsys, "verify-geometry", "--samples", "2000")
    assert code == 0
    assert {"check", "pass", "max_residual", "witnesses", "seed", "config"} <= set(rep)
    assert rep["seed"] == 0 and rep["max_residual"] < 1e-12


def test_geometry_full(capsys):
    code, rep, _ = run(capsys, "verify-geometry", "--samples", "100000")
    assert code == 0 and rep["pass"]
    assert all(r["max_violation"] < 1e-12 for r in rep["reports"])


def test_tingley_example(capsys):
    code, rep, _ = run(capsys, "tingley", "--n", "4", "--seed", "7", "--trials", "1000")
    assert code == 0 and rep["round_trip"] is True
    assert rep["max_residual"] < 1e-9


def test_unknown_subcommand(capsys):
    assert main(["frobnicate"]) == 2


def test_unknown_tolerance(capsys):
    code, _, err = run(capsys, "tingley", "--tol", "nonsense=1")
    assert code == 2 and "nonsense" in err
    with pytest.raises(InputError):
        RunConfig("tingley", tolerances={"bogus": 1.0})
    code, _, _ = run(capsys, "tingley", "--tol", "residual")
    assert code == 2


def test_failure_names_check(capsys):
    code, rep, err = run(capsys, "peak", "--arc", "0.1", "--sharpness", "1")
    assert code == 1 and not rep["pass"]
    assert "peak" in err and "off-arc" in err


def test_tolerance_override_changes_verdict(capsys):
    code, rep, _ = run(capsys, "tingley", "--n", "3", "--trials", "10", "--tol", "residual=1e-30")
    assert code == 1 and not rep["pass"]


def test_byte_identical(capsys):
    main(["faces", "--n", "4", "--trials", "5", "--seed", "3"])
    a = capsys.readouterr().out
    main(["faces", "--n", "4", "--trials", "5", "--seed", "3"])
    b = capsys.readouterr().out
    assert a == b
    main(["faces", "--n", "4", "--trials", "5", "--seed", "4"])
    assert capsys.readouterr().out != a


def test_riemann_csv(tmp_path, capsys):
    path = tmp_path / "trace.csv"
    out = tmp_path / "report.json"
    code = main(["riemann-map", "--nodes", "512", "--csv", str(path), "--output", str(out)])
    assert code == 0
    rep = json.loads(out.read_text())
    assert rep["report"]["hausdorff"] < 1e-4
    theta, vals = read_grid_csv(path)
    assert theta.size == 512 and abs(vals[0] - 1) < 1e-6


def test_riemann_bad_order(capsys):
    code, rep, _ = run(capsys, "riemann-map", "--order", "8")
    assert code == 1 and not rep["pass"]


def test_peak(capsys):
    code, rep, _ = run(capsys, "peak", "--x", "1.0", "--arc", "0.3", "--delta", "0.1")
    assert code == 0
    assert rep["certificate"]["off_peak_max"] < 0.1
    assert rep["function"]["kind"] == "localized_peak"


def test_peak_bad_delta(capsys):
    assert run(capsys, "peak", "--delta", "2")[0] == 2


def test_bishop_from_file(tmp_path, capsys):
    path = tmp_path / "f.json"
    path.write_text(json.dumps({"coeffs": [[0, 0], [0.5, 0], [0.5, 0]]}))
    code, rep, _ = run(capsys, "bishop", "--f", str(path), "--x", "0.0", "--r", "0.7")
    assert code == 0
    assert rep["output"]["norms"]["g_plus_upper"] <= 1 + 1e-6
    assert rep["distance"]["pass"]


def test_bishop_bad_input(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    assert run(capsys, "bishop", "--f", str(path))[0] == 2
    assert run(capsys, "bishop", "--r", "1.5")[0] == 2


def test_faces_disk(capsys):
    code, rep, _ = run(capsys, "faces", "--mode", "disk", "--n", "3", "--trials", "1")
    assert code == 0
    assert all(row["gap"] < 0.02 for row in rep["intervals"])


def test_tingley_table(tmp_path, capsys):
    T, truth = generate_oracle(3, 11)
    inputs = [spike(3, x, lam) for x in range(3) for lam in (1, 1j)] + list(random_sphere(np.random.default_rng(0), 3, 20))
    table = {"n": 3, "pairs": [{"input": [[z.real, z.imag] for z in v], "output": [[z.real, z.imag] for z in T(v)]} for v in inputs]}
    path = tmp_path / "table.json"
    path.write_text(json.dumps(table))
    code, rep, _ = run(capsys, "tingley", "--oracle", "json-table", "--table", str(path), "--trials", "10")
    assert code == 0
    assert rep["reconstruction"]["sigma"] == truth.sigma.tolist()
    assert run(capsys, "tingley", "--oracle", "json-table")[0] == 2


def test_all(capsys):
    code, rep, _ = run(capsys, "all")
    assert code == 0
    assert set(rep["reports"]) == {"verify-geometry", "riemann-map", "peak", "bishop", "faces", "tingley"}
