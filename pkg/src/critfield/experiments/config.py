"""Experiment configuration: defaults, JSON files and overrides."""

import dataclasses
import hashlib
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

from critfield.core.constants import (
    HEALPIX_MAX_ORDER,
    HIGH_DISORDER_A2,
    LOW_DISORDER_A2,
    MIN_MC_SAMPLES,
)
from critfield.core.errors import ArgumentError, ConfigError
from critfield.core.models import Activation, ActivationKind

logger = logging.getLogger(__name__)

EXPERIMENTS = ("fig-critical", "fig-monte", "fig-variance", "table-relu", "threshold-sweep")

# Experiments that count extrema on S^2 grids
_GRID_EXPERIMENTS = {"fig-critical", "table-relu", "threshold-sweep"}

_TUPLE_FIELDS = ("depths", "resolutions", "thresholds", "widths")


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything that determines the output of one experiment run."""

    name: str
    activation: str = ActivationKind.GAUSSIAN_RBF.value
    a2: Optional[float] = LOW_DISORDER_A2
    lambda_b: float = 0.0
    depths: tuple[int, ...] = (1, 5, 10, 20)
    resolutions: tuple[int, ...] = (6,)
    replicas: int = 200
    width: int = 500
    widths: tuple[int, ...] = ()
    mc_samples: int = 200_000
    seed: int = 0
    output_dir: str = "results"
    d: int = 2
    # None: 2 * nside on grids
    lmax: Optional[int] = None
    thresholds: tuple[float, ...] = (-12.0, -2.0, -1.0, 0.0, 1.0, 2.0)
    export_fields: bool = False
    extra: dict[str, Any] = field(default_factory=dict)

    def activation_spec(self) -> Activation:
        """The configured activation, built and validated."""
        try:
            kind = ActivationKind(self.activation)
        except ValueError as e:
            raise ConfigError(f"unknown activation {self.activation!r}") from e
        try:
            match kind:
                case ActivationKind.GAUSSIAN_RBF:
                    if self.a2 is None:
                        raise ConfigError("gaussian_rbf needs a2")
                    return Activation.gaussian(a2=self.a2, lambda_b=self.lambda_b)
                case ActivationKind.RELU:
                    return Activation.relu(self.lambda_b)
                case ActivationKind.TANH:
                    return Activation.tanh(self.lambda_b)
                case ActivationKind.NUMERIC_TABLE:
                    table = self.extra.get("table")
                    if not table:
                        raise ConfigError("numeric_table needs extra.table = {x: [...], y: [...]}")
                    return Activation.numeric_table(table["x"], table["y"], self.lambda_b)
        except ConfigError:
            raise
        except ArgumentError as e:
            raise ConfigError(str(e)) from e

    @property
    def sweep_widths(self) -> tuple[int, ...]:
        return self.widths or (self.width,)

    def validate(self) -> "ExperimentConfig":
        """Check every invariant; raises ConfigError on the first violation."""
        if self.name not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.name!r}; expected one of {EXPERIMENTS}")
        if self.replicas < 1:
            raise ConfigError(f"replicas must be >= 1, got {self.replicas}")
        if self.mc_samples < MIN_MC_SAMPLES:
            raise ConfigError(f"mc_samples must be >= {MIN_MC_SAMPLES}, got {self.mc_samples}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if self.d < 1:
            raise ConfigError(f"d must be >= 1, got {self.d}")
        if not self.depths or any(L < 1 for L in self.depths):
            raise ConfigError(f"depths must be a nonempty list of positive integers, got {self.depths}")
        if any(n < 1 for n in self.sweep_widths):
            raise ConfigError(f"widths must be positive, got {self.sweep_widths}")
        if self.lmax is not None and self.lmax < 0:
            raise ConfigError(f"lmax must be >= 0, got {self.lmax}")
        if any(math.isnan(u) for u in self.thresholds):
            raise ConfigError("thresholds must not be NaN")
        if self.name in _GRID_EXPERIMENTS:
            if self.d != 2:
                raise ConfigError(f"{self.name} simulates fields on S^2, got d={self.d}")
            if not self.resolutions or any(
                not 0 <= r <= HEALPIX_MAX_ORDER for r in self.resolutions
            ):
                raise ConfigError(
                    f"resolutions must be HEALPix orders in [0, {HEALPIX_MAX_ORDER}], "
                    f"got {self.resolutions}"
                )
        if self.name == "threshold-sweep" and not self.thresholds:
            raise ConfigError("threshold-sweep needs at least one threshold")
        if self.name != "table-relu":
            self.activation_spec()
        return self

    def to_dict(self) -> dict:
        data = dataclasses.asdict(self)
        for key in _TUPLE_FIELDS:
            data[key] = list(data[key])
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
        if "name" not in data:
            raise ConfigError("configuration needs a name")
        values = dict(data)
        try:
            for key in _TUPLE_FIELDS:
                if key in values:
                    values[key] = tuple(values[key])
            for key in ("depths", "resolutions", "widths"):
                if key in values:
                    values[key] = tuple(int(v) for v in values[key])
            if "thresholds" in values:
                values["thresholds"] = tuple(float(v) for v in values["thresholds"])
        except (TypeError, ValueError) as e:
            raise ConfigError(f"malformed configuration: {e}") from e
        return cls(**values)

    def with_overrides(self, **overrides: Any) -> "ExperimentConfig":
        """Copy with every override that is not None applied."""
        return dataclasses.replace(self, **{k: v for k, v in overrides.items() if v is not None})

    def config_hash(self) -> str:
        """SHA-256 of the canonical JSON of everything except the output location."""
        data = self.to_dict()
        data.pop("output_dir")
        canonical = json.dumps(data, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()


def default_config(name: str, paper_scale: bool = False) -> ExperimentConfig:
    """
    Built-in settings of each experiment.

    Desk scale uses 200 replicas of width-500 networks and 2e5 Monte Carlo
    samples; ``paper_scale`` restores 1000 replicas, width 1000 and 1e6 samples.
    """
    if name not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {name!r}; expected one of {EXPERIMENTS}")

    scale = (
        {"replicas": 1000, "width": 1000, "mc_samples": 1_000_000}
        if paper_scale
        else {"replicas": 200, "width": 500, "mc_samples": 200_000}
    )
    match name:
        case "fig-critical":
            depths = (1, 5, 10, 20, 30, 40, 50, 60) if paper_scale else (1, 5, 10, 20)
            return ExperimentConfig(name, depths=depths, resolutions=(6,), **scale)
        case "fig-monte":
            scale["mc_samples"] = 1_000_000
            return ExperimentConfig(name, **scale)
        case "fig-variance":
            return ExperimentConfig(
                name, a2=HIGH_DISORDER_A2, depths=(1, 5, 10, 20, 30, 40, 50, 60), lmax=1536, **scale
            )
        case "table-relu":
            resolutions = (3, 4, 5, 6, 7, 8, 9) if paper_scale else (3, 4, 5, 6, 7)
            scale["width"] = 1000
            return ExperimentConfig(name, depths=(1,), resolutions=resolutions, **scale)
        case "threshold-sweep":
            return ExperimentConfig(name, depths=(5,), resolutions=(6,), **scale)


def load_config(path: Path, paper_scale: bool = False) -> ExperimentConfig:
    """Defaults of the named experiment overlaid with a JSON configuration file."""
    try:
        with open(path) as f:
            data = json.load(f)
    except OSError as e:
        raise ConfigError(f"cannot read configuration {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path} is not valid JSON: {e}") from e
    if not isinstance(data, dict) or "name" not in data:
        raise ConfigError(f"{path} must hold a JSON object with a name")

    base = default_config(data["name"], paper_scale).to_dict()
    base.update(data)
    logger.info("loaded configuration %s from %s", data["name"], path)
    return ExperimentConfig.from_dict(base)
