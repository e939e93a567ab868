import csv
import json
import math

import numpy as np
import pytest

from pointmembrane.cli import main
from pointmembrane.experiments import (ExperimentConfig, aitken_limit, eoc, nonuniform_derivative,
                                       run_convergence, theta_of, write_csv)


def test_theta_of():
    assert float(theta_of(0.25)) == pytest.approx(math.asin(0.25 / math.sqrt(0.625)), rel=1e-14)
    assert float(theta_of(0.25)) == pytest.approx(0.32175, abs=1e-5)
    assert float(theta_of(0.0)) == 0.0
    assert float(theta_of(1.0)) == pytest.approx(math.pi / 2)
    assert float(theta_of(0.5)) == pytest.approx(math.pi / 4)


def test_numeric_helpers():
    f = lambda x: 2 * x**2 - x + 3
    assert nonuniform_derivative(0.1, 0.3, 0.7, f(0.1), f(0.3), f(0.7)) == pytest.approx(0.2)
    assert eoc([4e-2, 1e-2], [0.2, 0.1])[0] == pytest.approx(2.0)
    x = [1 + 0.5**k for k in range(3)]
    assert aitken_limit(*x) == pytest.approx(1.0)


def test_config_file(tmp_path):
    p = tmp_path / "c.yaml"
    p.write_text("kappa: 2.0\nlevels: [2, 3, 4]\n")
    cfg = ExperimentConfig.from_file(p, level=3)
    assert cfg.kappa == 2.0 and cfg.levels == [2, 3, 4] and cfg.level == 3
    p.write_text("bogus: 1\n")
    with pytest.raises(ValueError):
        ExperimentConfig.from_file(p)


def test_csv_roundtrip(tmp_path):
    v = 0.1 + 0.2
    path = write_csv([{"a": v, "b": None}, {"a": np.float64(-1.2345678901234567), "c": 3}],
                     tmp_path / "t.csv")
    rows = list(csv.DictReader(path.open()))
    assert float(rows[0]["a"]) == v
    assert float(rows[1]["a"]) == -1.2345678901234567
    assert rows[0]["b"] == "" and rows[1]["c"] == "3"


def test_convergence_cli_outputs(tmp_path, capsys):
    out = tmp_path / "run"
    code = main(["convergence", "--levels", "1-3", "--out", str(out)])
    printed = capsys.readouterr().out
    assert code in (0, 1)
    assert "[PASS]" in printed or "[FAIL]" in printed
    rows = list(csv.DictReader((out / "convergence.csv").open()))
    assert [int(r["level"]) for r in rows] == [1, 2, 3]
    vtk = (out / "convergence_finest.vtk").read_text()
    assert "SCALARS u double" in vtk
    man = json.loads((out / "convergence_manifest.json").read_text())
    assert man["beta"] == 1e8 and man["config"]["levels"] == [1, 2, 3]
    assert "delta" in man


def test_runs_are_deterministic(tmp_path):
    for k in ("a", "b"):
        assert main(["convergence", "--levels", "1-3", "--no-vtk", "--out", str(tmp_path / k)]) in (0, 1)
    a = (tmp_path / "a" / "convergence.csv").read_bytes()
    assert a == (tmp_path / "b" / "convergence.csv").read_bytes()


def test_cli_errors(tmp_path, capsys):
    assert main(["convergence", "--levels", "2-3", "--out", str(tmp_path)]) == 2
    assert "at least three" in capsys.readouterr().err
    bad = tmp_path / "bad.yaml"
    bad.write_text("nope: 1\n")
    assert main(["convergence", "--config", str(bad), "--out", str(tmp_path)]) == 2
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert main(["single-null", "--levels", "1", "--out", str(blocker / "sub")]) == 2
    with pytest.raises(SystemExit):
        main(["no-such-command"])


def test_orientation_cli_low_level(tmp_path):
    code = main(["orientation", "--level", "3", "--no-vtk", "--out", str(tmp_path)])
    assert code in (0, 1)
    rows = list(csv.DictReader(next(tmp_path.glob("orientation*.csv")).open()))
    assert rows
