"""Experiment runners: each turns an ExperimentConfig into report rows."""

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np

from critfield.core.constants import MIN_MC_SAMPLES, SPARSE_A2
from critfield.core.models import (
    Activation,
    AngularSpectrum,
    CRIKind,
    FieldSample,
    GOIParams,
    GridScheme,
    IndexSelector,
    NetworkConfig,
    SphereGrid,
)
from critfield.core.parallel import MomentAccumulator, ParallelSampler, chunk_sizes, derive_seed
from critfield.experiments.config import ExperimentConfig
from critfield.goi.estimators import goi_running_estimate
from critfield.kacrice.asymptotics import asymptotic_crit_count
from critfield.kacrice.predictions import (
    expected_crit_count,
    expected_crit_count_above,
    kac_rice_prefactor,
    prediction_table,
)
from critfield.kernel.covariance import build_kernel, classify_regime
from critfield.kernel.spectrum import angular_spectrum, variance_explained
from critfield.sphere.extrema import count_extrema_above
from critfield.sphere.fields import simulate_network_field, synthesize_gaussian_field
from critfield.sphere.grids import build_grid

logger = logging.getLogger(__name__)

# Replicas simulated per work chunk
REPLICA_CHUNK = 10
# Running-estimate checkpoints of fig-monte
MONTE_CHECKPOINTS = 30

# Seed stream ids under the configured master seed
_THEORY, _ASYMPTOTIC, _NETWORK, _SPECTRAL, _THRESHOLD, _MONTE = range(6)


@dataclass
class ExperimentResult:
    """Report rows of one experiment plus a summary for the JSON sidecar."""

    name: str
    rows: list[dict]
    summary: dict
    exports: list[tuple[str, FieldSample, SphereGrid]] = field(default_factory=list)


@lru_cache(maxsize=8)
def _healpix(order: int) -> SphereGrid:
    return build_grid(GridScheme.HEALPIX, order)


def _row(config: ExperimentConfig, quantity: str, value: float, **columns) -> dict:
    return {"experiment": config.name, "d": config.d, "quantity": quantity, "value": value, **columns}


def _estimate_columns(values: np.ndarray) -> dict:
    estimate = MomentAccumulator.of(np.asarray(values, dtype=float)).estimate()
    return {"value": estimate.mean, "stderr": estimate.stderr, "n": estimate.n_samples}


def _network_extrema_chunk(
    size: int, seed: int, cfg: NetworkConfig, order: int, thresholds: tuple[float, ...]
) -> np.ndarray:
    """(size, n_thresholds, 2) minima and maxima counts of network replicas."""
    grid = _healpix(order)
    counts = np.empty((size, len(thresholds), 2), dtype=np.int64)
    for j in range(size):
        sample = simulate_network_field(cfg, grid, derive_seed(seed, j))
        for k, u in enumerate(thresholds):
            c = count_extrema_above(sample, grid, u)
            counts[j, k] = (c.n_min, c.n_max)
    return counts


def _spectral_extrema_chunk(
    size: int, seed: int, spec: AngularSpectrum, order: int, thresholds: tuple[float, ...]
) -> np.ndarray:
    grid = _healpix(order)
    counts = np.empty((size, len(thresholds), 2), dtype=np.int64)
    for j in range(size):
        sample = synthesize_gaussian_field(spec, grid, derive_seed(seed, j))
        for k, u in enumerate(thresholds):
            c = count_extrema_above(sample, grid, u)
            counts[j, k] = (c.n_min, c.n_max)
    return counts


def _replica_counts(sampler: ParallelSampler, fn, replicas: int, master_seed: int, *args) -> np.ndarray:
    return np.concatenate(sampler.map_chunks(fn, chunk_sizes(replicas, REPLICA_CHUNK), master_seed, *args))


def _first_replica_seed(master_seed: int) -> int:
    """Seed that the replica runner hands to replica 0 of chunk 0."""
    return derive_seed(derive_seed(master_seed, 0), 0)


def _extrema_rows(config, counts, d, thresholds, report_u=True, **columns) -> list[dict]:
    """Minima as index 0 and maxima as index d, one pair of rows per threshold."""
    rows = []
    for k, u in enumerate(thresholds):
        for slot, i in ((0, 0), (1, d)):
            rows.append(
                {
                    "experiment": config.name,
                    "d": d,
                    "quantity": "simulated",
                    "i": i,
                    "u": u if report_u else None,
                    **columns,
                    **_estimate_columns(counts[:, k, slot]),
                }
            )
    return rows


def run_fig_critical(config: ExperimentConfig, sampler: Optional[ParallelSampler] = None) -> ExperimentResult:
    """
    Expected minima and maxima across depth: Kac-Rice prediction, depth
    asymptote and finite-width network simulation on HEALPix grids.
    """
    sampler = sampler or ParallelSampler()
    act = config.activation_spec()
    kernel = build_kernel(act)
    regime = classify_regime(kernel).tag.value
    kernel_id = act.label
    d = config.d
    rows: list[dict] = []
    exports = []

    for L in config.depths:
        logger.info("fig-critical: depth %d", L)
        # kernels with infinite kappa''(1) are simulated only
        if kernel.has_finite_ddkappa1:
            table = prediction_table(
                kernel, L, d, config.mc_samples, derive_seed(config.seed, _THEORY, L), sampler=sampler
            )
            for p in table.predictions:
                rows.append(
                    _row(config, "theory", p.value, stderr=p.stderr, n=config.mc_samples, L=L, i=p.index,
                         kernel_id=kernel_id, regime=regime)
                )
        if kernel.cri.kind is CRIKind.GREATER_THAN_TWO:
            for i in range(d + 1):
                p = asymptotic_crit_count(
                    kernel, L, d, i, config.mc_samples, derive_seed(config.seed, _ASYMPTOTIC, i), sampler
                )
                rows.append(
                    _row(config, "asymptotic", p.value, stderr=p.stderr, n=config.mc_samples, L=L, i=i,
                         kernel_id=kernel_id, regime=regime)
                )

        for r in config.resolutions:
            for width in config.sweep_widths:
                cfg = NetworkConfig.uniform(L, width, act, d)
                master = derive_seed(config.seed, _NETWORK, L, r, width)
                counts = _replica_counts(
                    sampler, _network_extrema_chunk, config.replicas, master, cfg, r, (-math.inf,)
                )
                rows += _extrema_rows(
                    config, counts, d, (-math.inf,), report_u=False, L=L, resolution=r, width=width,
                    kernel_id=kernel_id, regime=regime,
                )
                if config.export_fields:
                    grid = _healpix(r)
                    sample = simulate_network_field(cfg, grid, _first_replica_seed(master))
                    exports.append((f"field_L{L}_r{r}_n{width}", sample, grid))

    summary = {
        "kernel_id": kernel_id,
        "regime": regime,
        "dkappa1": kernel.dkappa1,
        "ddkappa1": kernel.ddkappa1 if kernel.has_finite_ddkappa1 else "inf",
        "max_theory_by_depth": {
            str(row["L"]): row["value"]
            for row in rows
            if row["quantity"] == "theory" and row["i"] == d
        },
    }
    return ExperimentResult(config.name, rows, summary, exports)


def monte_checkpoints(n: int, count: int = MONTE_CHECKPOINTS) -> list[int]:
    """Logarithmically spaced sample counts from 10^3 up to n."""
    return sorted({int(round(x)) for x in np.geomspace(MIN_MC_SAMPLES, n, count)})


def run_fig_monte(config: ExperimentConfig, sampler: Optional[ParallelSampler] = None) -> ExperimentResult:
    """Running Monte Carlo estimate of A_0 against the number of samples."""
    d = config.d
    checkpoints = monte_checkpoints(config.mc_samples)
    estimates = goi_running_estimate(
        GOIParams(d, 0.5), IndexSelector(0), checkpoints, derive_seed(config.seed, _MONTE)
    )
    prefactor = kac_rice_prefactor(d, 1.0)
    rows = []
    for e in estimates:
        scaled = e.scaled(prefactor)
        rows.append(_row(config, "A_0", scaled.mean, stderr=scaled.stderr, n=e.n_samples, i=0))

    final = rows[-1]["value"]
    last_decade = [r["value"] for r in rows if r["n"] >= config.mc_samples / 10]
    summary = {
        "A_0": final,
        "stderr": rows[-1]["stderr"],
        "checkpoints": len(rows),
        "last_decade_relative_range": (max(last_decade) - min(last_decade)) / abs(final),
    }
    return ExperimentResult(config.name, rows, summary)


def run_fig_variance(config: ExperimentConfig, sampler: Optional[ParallelSampler] = None) -> ExperimentResult:
    """Share of the variance of kappa_L carried by multipoles up to lmax, per depth."""
    act = config.activation_spec()
    kernel = build_kernel(act)
    lmax = 1536 if config.lmax is None else config.lmax
    rows = []
    for L in config.depths:
        spec = angular_spectrum(kernel, L, lmax)
        value = variance_explained(spec, lmax)
        logger.info("fig-variance: depth %d explains %.6f", L, value)
        rows.append(_row(config, "variance_explained", value, L=L, kernel_id=act.label))
    summary = {"kernel_id": act.label, "lmax": lmax, "by_depth": {str(r["L"]): r["value"] for r in rows}}
    return ExperimentResult(config.name, rows, summary)


def table_activations(lambda_b: float = 0.0) -> tuple[Activation, ...]:
    """Gaussian at the sparse parameter, ReLU and tanh."""
    return (
        Activation.gaussian(a2=SPARSE_A2, lambda_b=lambda_b),
        Activation.relu(lambda_b),
        Activation.tanh(lambda_b),
    )


def run_table_relu(config: ExperimentConfig, sampler: Optional[ParallelSampler] = None) -> ExperimentResult:
    """Mean minima and maxima of shallow networks per activation and HEALPix resolution."""
    sampler = sampler or ParallelSampler()
    rows: list[dict] = []
    exports = []
    summary: dict = {}
    for a, act in enumerate(table_activations(config.lambda_b)):
        cfg = NetworkConfig.uniform(1, config.width, act, config.d)
        for r in config.resolutions:
            logger.info("table-relu: %s at resolution %d", act.label, r)
            master = derive_seed(config.seed, _NETWORK, a, r)
            counts = _replica_counts(sampler, _network_extrema_chunk, config.replicas, master, cfg, r, (-math.inf,))
            rows += _extrema_rows(
                config, counts, config.d, (-math.inf,), report_u=False, L=1, resolution=r, width=config.width,
                kernel_id=act.label,
            )
            summary.setdefault(act.label, {})[str(r)] = {
                "mean_min": float(counts[:, 0, 0].mean()),
                "mean_max": float(counts[:, 0, 1].mean()),
            }
            if config.export_fields:
                grid = _healpix(r)
                exports.append(
                    (f"field_{act.kind.value}_r{r}", simulate_network_field(cfg, grid, _first_replica_seed(master)), grid)
                )
    return ExperimentResult(config.name, rows, summary, exports)


def run_threshold_sweep(
    config: ExperimentConfig, sampler: Optional[ParallelSampler] = None
) -> ExperimentResult:
    """
    Expected minima and maxima above each threshold: Kac-Rice theory against
    counts on exact Gaussian samples of the limit field.
    """
    sampler = sampler or ParallelSampler()
    act = config.activation_spec()
    kernel = build_kernel(act)
    regime = classify_regime(kernel).tag.value
    kernel_id = act.label
    d = config.d
    thresholds = tuple(config.thresholds)
    rows: list[dict] = []
    exports = []

    for L in config.depths:
        for i in (0, d):
            seed = derive_seed(config.seed, _THEORY, L, i)
            p = expected_crit_count(kernel, L, d, i, config.mc_samples, seed, sampler)
            rows.append(
                _row(config, "theory", p.value, stderr=p.stderr, n=config.mc_samples, L=L, i=i,
                     kernel_id=kernel_id, regime=regime)
            )
            for k, u in enumerate(thresholds):
                seed = derive_seed(config.seed, _THRESHOLD, L, i, k)
                p = expected_crit_count_above(kernel, L, d, i, u, config.mc_samples, seed, sampler)
                rows.append(
                    _row(config, "theory", p.value, stderr=p.stderr, n=config.mc_samples, L=L, i=i, u=u,
                         kernel_id=kernel_id, regime=regime)
                )

        for r in config.resolutions:
            lmax = 2 * 2**r if config.lmax is None else config.lmax
            spec = angular_spectrum(kernel, L, lmax)
            master = derive_seed(config.seed, _SPECTRAL, L, r)
            counts = _replica_counts(sampler, _spectral_extrema_chunk, config.replicas, master, spec, r, thresholds)
            rows += _extrema_rows(
                config, counts, d, thresholds, L=L, resolution=r, kernel_id=kernel_id, regime=regime
            )
            if config.export_fields:
                grid = _healpix(r)
                exports.append(
                    (f"field_L{L}_r{r}", synthesize_gaussian_field(spec, grid, _first_replica_seed(master)), grid)
                )

    summary = {"kernel_id": kernel_id, "regime": regime, "thresholds": list(thresholds)}
    return ExperimentResult(config.name, rows, summary, exports)


RUNNERS = {
    "fig-critical": run_fig_critical,
    "fig-monte": run_fig_monte,
    "fig-variance": run_fig_variance,
    "table-relu": run_table_relu,
    "threshold-sweep": run_threshold_sweep,
}


def run_experiment(config: ExperimentConfig, sampler: Optional[ParallelSampler] = None) -> ExperimentResult:
    config.validate()
    return RUNNERS[config.name](config, sampler)
