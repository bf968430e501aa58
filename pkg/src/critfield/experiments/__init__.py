"""Named experiments reproducing the figure and table computations."""

from critfield.experiments.config import (
    EXPERIMENTS,
    ExperimentConfig,
    default_config,
    load_config,
)
from critfield.experiments.runners import (
    RUNNERS,
    ExperimentResult,
    monte_checkpoints,
    run_experiment,
    run_fig_critical,
    run_fig_monte,
    run_fig_variance,
    run_table_relu,
    run_threshold_sweep,
    table_activations,
)

__all__ = [
    "EXPERIMENTS",
    "ExperimentConfig",
    "default_config",
    "load_config",
    "RUNNERS",
    "ExperimentResult",
    "monte_checkpoints",
    "run_experiment",
    "run_fig_critical",
    "run_fig_monte",
    "run_fig_variance",
    "run_table_relu",
    "run_threshold_sweep",
    "table_activations",
]
