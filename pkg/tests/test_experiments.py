"""Tests for experiment configuration, runners and the reporter."""

import csv
import json
import math

import pytest

from critfield.core.errors import ConfigError
from critfield.experiments import (
    EXPERIMENTS,
    ExperimentConfig,
    default_config,
    load_config,
    monte_checkpoints,
    run_experiment,
    table_activations,
)
from critfield.output import CSV_COLUMNS, Reporter

TINY = {"replicas": 2, "width": 8, "mc_samples": 2000, "resolutions": (1,), "depths": (1,)}


def tiny(name: str, **overrides) -> ExperimentConfig:
    return default_config(name).with_overrides(**{**TINY, **overrides})


def read_rows(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


def rows_by(rows, quantity, *keys):
    return {tuple(row.get(k) for k in keys): row for row in rows if row["quantity"] == quantity}


@pytest.mark.parametrize("name", EXPERIMENTS)
def test_defaults_are_valid(name):
    assert default_config(name).validate().name == name
    assert default_config(name, paper_scale=True).validate().name == name


def test_paper_scale_sizes():
    config = default_config("fig-critical", paper_scale=True)
    assert (config.replicas, config.width, config.mc_samples) == (1000, 1000, 1_000_000)
    assert max(config.depths) == 60
    assert default_config("fig-variance").lmax == 1536


@pytest.mark.parametrize(
    "overrides",
    [
        {"name": "fig-unknown"},
        {"replicas": 0},
        {"mc_samples": 10},
        {"depths": ()},
        {"depths": (0, 3)},
        {"resolutions": (14,)},
        {"d": 3},
        {"activation": "sigmoid"},
        {"a2": -1.0},
        {"lambda_b": 1.5},
        {"thresholds": (math.nan,)},
    ],
)
def test_invalid_configs(overrides):
    with pytest.raises(ConfigError):
        default_config("fig-critical").with_overrides(**overrides).validate()


def test_config_hash():
    config = default_config("threshold-sweep")
    assert config.config_hash() == default_config("threshold-sweep").config_hash()
    assert config.config_hash() == config.with_overrides(output_dir="elsewhere").config_hash()
    assert config.config_hash() != config.with_overrides(seed=1).config_hash()


def test_config_dict_round_trip():
    config = tiny("threshold-sweep", thresholds=(-1.0, 2.0))
    assert ExperimentConfig.from_dict(config.to_dict()) == config
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"name": "fig-monte", "replicaz": 3})


def test_with_overrides_skips_none():
    config = default_config("fig-monte")
    assert config.with_overrides(seed=None, replicas=None) == config


def test_load_config(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"name": "fig-critical", "depths": [2, 3], "seed": 9}))
    config = load_config(path)
    assert config.depths == (2, 3)
    assert config.seed == 9
    assert config.replicas == default_config("fig-critical").replicas

    path.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(path)
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.json")


def test_monte_checkpoints():
    points = monte_checkpoints(1_000_000)
    assert len(points) >= 20
    assert points[0] == 1000
    assert points[-1] == 1_000_000
    assert points == sorted(points)


def test_table_activations():
    kinds = [act.kind.value for act in table_activations()]
    assert kinds == ["gaussian_rbf", "relu", "tanh"]


def test_fig_critical_rows():
    result = run_experiment(tiny("fig-critical"))
    quantities = {row["quantity"] for row in result.rows}
    assert quantities == {"theory", "asymptotic", "simulated"}
    simulated = [row for row in result.rows if row["quantity"] == "simulated"]
    assert {row["i"] for row in simulated} == {0, 2}
    assert all(row["n"] == 2 and row["value"] >= 1 for row in simulated)
    assert result.summary["regime"] == "low_disorder"


def test_fig_critical_relu_is_simulation_only():
    result = run_experiment(tiny("fig-critical", activation="relu"))
    assert {row["quantity"] for row in result.rows} == {"simulated"}


def test_fig_critical_exports():
    result = run_experiment(tiny("fig-critical", export_fields=True))
    assert [name for name, _, _ in result.exports] == ["field_L1_r1_n8"]


def test_fig_monte():
    result = run_experiment(default_config("fig-monte").with_overrides(mc_samples=20_000))
    assert [row["n"] for row in result.rows] == monte_checkpoints(20_000)
    assert result.summary["checkpoints"] == len(result.rows)
    assert result.summary["A_0"] > 0.0


def test_fig_variance():
    result = run_experiment(default_config("fig-variance").with_overrides(depths=(1, 3), lmax=32))
    values = [row["value"] for row in result.rows]
    assert all(0.0 < v <= 1.0 for v in values)
    assert result.summary["lmax"] == 32


def test_table_relu():
    result = run_experiment(tiny("table-relu"))
    assert len(result.rows) == 2 * 3
    assert set(result.summary) == {act.label for act in table_activations()}


def test_threshold_sweep():
    config = tiny("threshold-sweep", thresholds=(-12.0, 0.0, 1.0))
    result = run_experiment(config)
    theory = [row for row in result.rows if row["quantity"] == "theory"]
    simulated = [row for row in result.rows if row["quantity"] == "simulated"]
    assert len(theory) == 2 * (1 + 3)
    assert len(simulated) == 2 * 3
    assert {row["u"] for row in simulated} == {-12.0, 0.0, 1.0}


@pytest.mark.slow
def test_fig_critical_simulation_matches_theory():
    config = default_config("fig-critical")
    assert (config.a2, config.depths, config.resolutions) == (1.0, (1, 5, 10, 20), (6,))
    assert (config.replicas, config.width) == (200, 500)
    result = run_experiment(config)
    theory = rows_by(result.rows, "theory", "L", "i")
    simulated = rows_by(result.rows, "simulated", "L", "i")
    for L in config.depths:
        expected = theory[(L, config.d)]["value"]
        assert simulated[(L, config.d)]["value"] == pytest.approx(expected, rel=0.15), L


@pytest.mark.slow
def test_table_relu_divergence():
    config = default_config("table-relu")
    assert config.resolutions == (3, 4, 5, 6, 7)
    result = run_experiment(config)
    gaussian, relu, tanh = (result.summary[act.label] for act in table_activations())

    relu_max = [relu[str(r)]["mean_max"] for r in config.resolutions]
    assert all(b > a for a, b in zip(relu_max, relu_max[1:]))
    assert relu_max[0] == pytest.approx(3.027, rel=0.25)
    assert relu_max[-1] == pytest.approx(31.80, rel=0.25)

    for r in config.resolutions:
        assert 2.5 <= gaussian[str(r)]["mean_min"] <= 4.0, r
        assert 1.3 <= tanh[str(r)]["mean_min"] <= 2.0, r


@pytest.mark.slow
def test_threshold_sweep_simulation_matches_theory():
    config = default_config("threshold-sweep")
    result = run_experiment(config)
    theory = {k: row for k, row in rows_by(result.rows, "theory", "L", "i", "u").items() if k[2] is not None}
    simulated = rows_by(result.rows, "simulated", "L", "i", "u")
    assert set(simulated) == set(theory)
    for key, predicted in theory.items():
        observed = simulated[key]
        allowed = 3.0 * math.hypot(predicted["stderr"], observed["stderr"]) + 0.10 * predicted["value"]
        assert abs(observed["value"] - predicted["value"]) <= allowed, key


def test_runs_are_deterministic():
    config = tiny("threshold-sweep", thresholds=(0.0,))
    assert run_experiment(config).rows == run_experiment(config).rows


def test_reporter_csv(tmp_path):
    reporter = Reporter(tmp_path, "0.1.0", "abc", 3)
    rows = [
        {"experiment": "x", "quantity": "theory", "L": 5, "value": 0.5, "u": None},
        {"experiment": "x", "quantity": "theory", "L": 1, "value": 1.5, "u": 1.0},
    ]
    path = reporter.write_csv("sub/out.csv", rows)
    assert path == (tmp_path / "sub" / "out.csv").resolve()
    header = path.read_text().splitlines()[0]
    assert header == ",".join(CSV_COLUMNS)
    written = read_rows(path)
    assert [r["L"] for r in written] == ["1", "5"]
    assert written[1]["u"] == ""
    assert {r["seed"] for r in written} == {"3"}
    assert reporter.written == [path]


def test_reporter_json(tmp_path):
    reporter = Reporter(tmp_path, "0.1.0", "abc", 3)
    data = json.loads(reporter.write_json("out.json", {"summary": {"ddkappa1": math.inf}}).read_text())
    assert data["summary"]["ddkappa1"] == "inf"
    assert data["config_hash"] == "abc"


def test_reporter_stays_inside_output_dir(tmp_path):
    reporter = Reporter(tmp_path / "out", "0.1.0", "abc", 0)
    with pytest.raises(ConfigError):
        reporter.resolve("../escape.csv")
