"""Tests for the command-line entry point."""

import csv
import json

import pytest

from critfield import __version__
from critfield.cli import main
from critfield.output import CSV_COLUMNS


def test_version(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert __version__ in capsys.readouterr().out


def test_unknown_command():
    with pytest.raises(SystemExit) as exc:
        main(["fig-unknown"])
    assert exc.value.code == 2


@pytest.mark.parametrize(
    "a2,regime",
    [("1", "low_disorder"), ("2.414213562373095", "sparse"), ("9", "high_disorder")],
)
def test_regime(capsys, a2, regime):
    assert main(["regime", "--a2", a2]) == 0
    assert regime in capsys.readouterr().out


def test_kernel_info(capsys):
    assert main(["kernel-info", "--a2", "9", "--depth", "3"]) == 0
    out = capsys.readouterr().out
    assert "high_disorder" in out
    assert "gamma_L" in out


def test_kernel_info_json(capsys):
    assert main(["kernel-info", "--activation", "relu", "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["ddkappa1"] == "inf"
    assert data["cri"] == {"kind": "known", "value": 1.5}


def test_missing_a2_is_argument_error(capsys):
    assert main(["regime"]) == 2
    assert "--a2" in capsys.readouterr().err


def test_predict_relu_is_unsupported(capsys):
    assert main(["predict", "--activation", "relu", "--mc-samples", "2000"]) == 3
    assert "Error" in capsys.readouterr().err


def test_predict_writes_csv(tmp_path, capsys):
    argv = ["predict", "--a2", "1", "--depth", "4", "--mc-samples", "5000", "--asymptotic", "--out", str(tmp_path)]
    assert main(argv) == 0
    assert "alternating sum" in capsys.readouterr().out
    with open(tmp_path / "predict.csv", newline="") as f:
        rows = list(csv.DictReader(f))
    assert list(rows[0]) == list(CSV_COLUMNS)
    assert sorted(r["quantity"] for r in rows) == ["asymptotic"] * 3 + ["theory"] * 3
    assert {r["L"] for r in rows} == {"4"}


def test_predict_with_threshold(capsys):
    assert main(["predict", "--a2", "9", "--depth", "2", "--threshold", "1", "--mc-samples", "2000"]) == 0
    assert "E[C_2]" in capsys.readouterr().out


def test_goi_estimate(capsys):
    assert main(["goi-estimate", "--d", "1", "--c", "0.5", "--mc-samples", "5000"]) == 0
    assert "mean" in capsys.readouterr().out
    assert main(["goi-estimate", "--method", "eigenvalues", "--mc-samples", "5000"]) == 0


def test_goi_estimate_bad_index(capsys):
    assert main(["goi-estimate", "--d", "2", "--index", "5"]) == 2


def test_goi_estimate_degenerate(capsys):
    assert main(["goi-estimate", "--d", "2", "--c", "-0.7"]) == 2


def test_experiment_outputs(tmp_path, capsys):
    argv = ["fig-variance", "--depths", "1,2", "--lmax", "16", "--out", str(tmp_path)]
    assert main(argv) == 0
    out = capsys.readouterr().out
    assert "FIG-VARIANCE" in out
    assert (tmp_path / "fig_variance.csv").exists()
    sidecar = json.loads((tmp_path / "fig_variance.json").read_text())
    assert sidecar["config"]["depths"] == [1, 2]
    assert sidecar["version"] == __version__


def test_experiment_csv_is_reproducible(tmp_path):
    argv = ["fig-monte", "--mc-samples", "5000", "--seed", "4"]
    assert main([*argv, "--out", str(tmp_path / "a")]) == 0
    assert main([*argv, "--out", str(tmp_path / "b")]) == 0
    first = (tmp_path / "a" / "fig_monte.csv").read_bytes()
    assert first == (tmp_path / "b" / "fig_monte.csv").read_bytes()
    assert main(["fig-monte", "--mc-samples", "5000", "--seed", "5", "--out", str(tmp_path / "c")]) == 0
    assert first != (tmp_path / "c" / "fig_monte.csv").read_bytes()


def test_experiment_exports_fields(tmp_path):
    argv = [
        "threshold-sweep", "--depths", "1", "--resolutions", "1", "--replicas", "2",
        "--thresholds", "0", "--mc-samples", "2000", "--export-fields", "--out", str(tmp_path),
    ]
    assert main(argv) == 0
    assert (tmp_path / "field_L1_r1.bin").exists()
    assert (tmp_path / "field_L1_r1.csv").exists()
    assert (tmp_path / "adjacency_healpix_1.csv").exists()


def test_experiment_config_file(tmp_path):
    config = tmp_path / "variance.json"
    config.write_text(json.dumps({"name": "fig-variance", "depths": [2], "lmax": 8}))
    assert main(["fig-variance", "--config", str(config), "--out", str(tmp_path)]) == 0
    assert main(["fig-monte", "--config", str(config), "--out", str(tmp_path)]) == 2


def test_experiment_invalid_override(tmp_path):
    assert main(["fig-critical", "--replicas", "0", "--out", str(tmp_path)]) == 2
