"""Data models for kernels, GOI estimates, predictions and sphere fields."""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Union

import numpy as np

from critfield.core.errors import ArgumentError, ParameterError


class ActivationKind(Enum):
    """Supported activation families."""

    GAUSSIAN_RBF = "gaussian_rbf"  # exp(-a^2 x^2 / 2)
    RELU = "relu"
    TANH = "tanh"
    NUMERIC_TABLE = "numeric_table"  # cubic spline through samples


class CRIKind(Enum):
    """Covariance regularity index annotation."""

    GREATER_THAN_TWO = "greater_than_two"
    KNOWN = "known"
    UNKNOWN = "unknown"


class RegimeTag(Enum):
    """Depth trichotomy of the expected number of critical points."""

    LOW_DISORDER = "low_disorder"  # kappa'(1) < 1, bounded counts
    SPARSE = "sparse"  # kappa'(1) = 1, growth L^{d/2}
    HIGH_DISORDER = "high_disorder"  # kappa'(1) > 1, growth kappa'(1)^{Ld/2}


class GridScheme(Enum):
    """Sphere pixelization schemes."""

    HEALPIX = "healpix"
    ICOSPHERE = "icosphere"


@dataclass(frozen=True)
class Activation:
    """An activation function together with the bias variance of the network."""

    kind: ActivationKind
    lambda_b: float = 0.0
    a: Optional[float] = None
    table_x: Optional[tuple[float, ...]] = None
    table_y: Optional[tuple[float, ...]] = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.lambda_b < 1.0:
            raise ArgumentError(f"lambda_b must lie in [0, 1), got {self.lambda_b}")
        match self.kind:
            case ActivationKind.GAUSSIAN_RBF:
                if self.a is None or not self.a > 0.0:
                    raise ArgumentError(f"GaussianRBF requires a > 0, got {self.a}")
            case ActivationKind.NUMERIC_TABLE:
                if self.table_x is None or self.table_y is None:
                    raise ArgumentError("NumericTable requires table_x and table_y")
                if len(self.table_x) != len(self.table_y) or len(self.table_x) < 4:
                    raise ArgumentError("NumericTable needs at least 4 matching samples")
                if any(b <= a for a, b in zip(self.table_x, self.table_x[1:])):
                    raise ArgumentError("NumericTable abscissae must be strictly increasing")

    @classmethod
    def gaussian(
        cls, a: Optional[float] = None, a2: Optional[float] = None, lambda_b: float = 0.0
    ) -> "Activation":
        """Gaussian activation, parametrized by ``a`` or by ``a2 = a**2``."""
        if (a is None) == (a2 is None):
            raise ArgumentError("pass exactly one of a or a2")
        if a is None:
            if a2 <= 0.0:
                raise ArgumentError(f"a2 must be positive, got {a2}")
            a = math.sqrt(a2)
        return cls(ActivationKind.GAUSSIAN_RBF, lambda_b=lambda_b, a=a)

    @classmethod
    def relu(cls, lambda_b: float = 0.0) -> "Activation":
        return cls(ActivationKind.RELU, lambda_b=lambda_b)

    @classmethod
    def tanh(cls, lambda_b: float = 0.0) -> "Activation":
        return cls(ActivationKind.TANH, lambda_b=lambda_b)

    @classmethod
    def numeric_table(cls, xs, ys, lambda_b: float = 0.0) -> "Activation":
        return cls(
            ActivationKind.NUMERIC_TABLE,
            lambda_b=lambda_b,
            table_x=tuple(float(x) for x in xs),
            table_y=tuple(float(y) for y in ys),
        )

    @property
    def label(self) -> str:
        """Short identifier used as ``kernel_id`` in reports."""
        match self.kind:
            case ActivationKind.GAUSSIAN_RBF:
                base = f"gaussian_a2={self.a**2:.6g}"
            case ActivationKind.NUMERIC_TABLE:
                base = f"table_n={len(self.table_x)}"
            case _:
                base = self.kind.value
        if self.lambda_b:
            base += f"_lb={self.lambda_b:.6g}"
        return base

    def to_dict(self) -> dict:
        data: dict = {"kind": self.kind.value, "lambda_b": self.lambda_b}
        if self.a is not None:
            data["a"] = self.a
        if self.table_x is not None:
            data["table_x"] = list(self.table_x)
            data["table_y"] = list(self.table_y)
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "Activation":
        try:
            kind = ActivationKind(data["kind"])
        except (KeyError, ValueError) as e:
            raise ArgumentError(f"unknown activation kind in {data!r}") from e
        table_x = data.get("table_x")
        table_y = data.get("table_y")
        return cls(
            kind,
            lambda_b=float(data.get("lambda_b", 0.0)),
            a=data.get("a"),
            table_x=tuple(table_x) if table_x is not None else None,
            table_y=tuple(table_y) if table_y is not None else None,
        )


@dataclass(frozen=True)
class CRI:
    """Stored covariance regularity annotation of a kernel."""

    kind: CRIKind
    value: Optional[float] = None

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "value": self.value}


@dataclass(frozen=True, eq=False)
class Kernel:
    """One-layer covariance kernel with its Hermite series and derivatives at 1."""

    activation: Activation
    lambda_w: float
    coeffs: np.ndarray
    dkappa1: float
    ddkappa1: float
    cri: CRI
    quad_nodes: int = 0

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def has_finite_ddkappa1(self) -> bool:
        return math.isfinite(self.ddkappa1)

    def to_dict(self) -> dict:
        return {
            "activation": self.activation.to_dict(),
            "lambda_b": self.activation.lambda_b,
            "lambda_w": self.lambda_w,
            "coeffs": [float(b) for b in self.coeffs],
            "dkappa1": self.dkappa1,
            "ddkappa1": self.ddkappa1 if self.has_finite_ddkappa1 else "inf",
            "cri": self.cri.to_dict(),
        }


@dataclass(frozen=True)
class Regime:
    """Result of classifying a kernel by kappa'(1)."""

    tag: RegimeTag
    dkappa1: float
    tolerance: float


@dataclass(frozen=True, eq=False)
class AngularSpectrum:
    """Legendre coefficients of kappa_L, normalized so that they sum to the variance."""

    lmax: int
    chat: np.ndarray
    depth: int = 1
    quad_nodes: int = 0

    @property
    def total(self) -> float:
        return float(np.sum(self.chat))


@dataclass(frozen=True)
class GOIParams:
    """Dimension and covariance parameter of a GOI(c) matrix."""

    d: int
    c: float

    def __post_init__(self) -> None:
        if self.d < 1:
            raise ArgumentError(f"GOI dimension must be >= 1, got {self.d}")
        if not 1.0 + self.d * self.c > 0.0:
            raise ParameterError(
                f"GOI nondegeneracy 1 + d*c > 0 violated: d={self.d}, c={self.c}"
            )


@dataclass(frozen=True)
class GOIEstimate:
    """Monte Carlo estimate of an expectation."""

    mean: float
    stderr: float
    n_samples: int

    def scaled(self, factor: float) -> "GOIEstimate":
        return GOIEstimate(self.mean * factor, self.stderr * abs(factor), self.n_samples)

    def to_dict(self) -> dict:
        return {"mean": self.mean, "stderr": self.stderr, "n": self.n_samples}


@dataclass(frozen=True)
class IndexSelector:
    """Selects the event lambda_i < shift < lambda_{i+1} on sorted eigenvalues."""

    i: int
    shift: float = 0.0

    def validate(self, d: int) -> None:
        if not 0 <= self.i <= d:
            raise ArgumentError(f"index {self.i} outside [0, {d}]")


@dataclass(frozen=True)
class DepthSpectralParams:
    """Depth-L quantities entering the Kac-Rice formulas."""

    L: int
    d: int
    eta_L: float
    xi_L: float
    gamma_L: float

    @property
    def k_L(self) -> float:
        """Threshold shift scale sqrt(xi_L)."""
        return math.sqrt(self.xi_L)


@dataclass(frozen=True)
class CritCountPrediction:
    """Expected number of critical points of a given index."""

    value: float
    stderr: float
    index: int
    depth: int
    d: int
    threshold: Optional[float] = None

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "stderr": self.stderr,
            "i": self.index,
            "L": self.depth,
            "d": self.d,
            "u": self.threshold,
        }


@dataclass(eq=False)
class SphereGrid:
    """Pixel centers on S^2 with a symmetric neighbor relation stored as CSR arrays."""

    scheme: GridScheme
    resolution: int
    centers: np.ndarray
    neighbor_indptr: np.ndarray
    neighbor_indices: np.ndarray
    _table: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def npix(self) -> int:
        return len(self.centers)

    @property
    def nside(self) -> int:
        if self.scheme is not GridScheme.HEALPIX:
            raise ArgumentError("nside is only defined for HEALPix grids")
        return 2**self.resolution

    def neighbors(self, pixel: int) -> np.ndarray:
        return self.neighbor_indices[self.neighbor_indptr[pixel] : self.neighbor_indptr[pixel + 1]]

    def degrees(self) -> np.ndarray:
        return np.diff(self.neighbor_indptr)

    @property
    def neighbor_table(self) -> np.ndarray:
        """Neighbors padded with -1 into an (npix, max_degree) array."""
        if self._table is None:
            degrees = self.degrees()
            table = np.full((self.npix, int(degrees.max(initial=0))), -1, dtype=np.int64)
            rows = np.repeat(np.arange(self.npix), degrees)
            cols = np.arange(len(self.neighbor_indices)) - np.repeat(self.neighbor_indptr[:-1], degrees)
            table[rows, cols] = self.neighbor_indices
            self._table = table
        return self._table


@dataclass(frozen=True)
class NetworkConfig:
    """Architecture of a finite-width random network on S^d."""

    depth: int
    widths: tuple[int, ...]
    activation: Activation
    d: int = 2

    def __post_init__(self) -> None:
        if self.depth < 1:
            raise ArgumentError(f"depth must be >= 1, got {self.depth}")
        if len(self.widths) != self.depth or any(n < 1 for n in self.widths):
            raise ArgumentError(f"need {self.depth} positive widths, got {self.widths}")

    @classmethod
    def uniform(cls, depth: int, width: int, activation: Activation, d: int = 2) -> "NetworkConfig":
        return cls(depth, (width,) * depth, activation, d)

    def to_dict(self) -> dict:
        return {
            "depth": self.depth,
            "widths": list(self.widths),
            "activation": self.activation.to_dict(),
            "d": self.d,
        }


FieldSource = Union[NetworkConfig, AngularSpectrum]


@dataclass(eq=False)
class FieldSample:
    """One realization of a field on a grid."""

    values: np.ndarray
    source: FieldSource
    seed: int
    # real spherical-harmonic coefficients, kept for spectral samples
    coefficients: Optional[np.ndarray] = None

    @property
    def source_kind(self) -> str:
        return "finite_width" if isinstance(self.source, NetworkConfig) else "spectral"


@dataclass(frozen=True)
class ExtremaCount:
    """Local extrema of a pixelized field."""

    n_min: int
    n_max: int
    n_ties: int = 0

    def to_dict(self) -> dict:
        return {"n_min": self.n_min, "n_max": self.n_max, "n_ties": self.n_ties}


@dataclass(frozen=True)
class CovarianceEntry:
    """One empirical second moment next to its theoretical value."""

    estimate: float
    stderr: float
    target: float

    def to_dict(self) -> dict:
        return {"estimate": self.estimate, "stderr": self.stderr, "target": self.target}


@dataclass(frozen=True)
class FrameCovarianceReport:
    """Empirical covariances of a field and its frame derivatives at one pixel."""

    pixel: int
    step: float
    n_samples: int
    fd_bias: float
    entries: dict[str, CovarianceEntry]

    def to_dict(self) -> dict:
        return {
            "pixel": self.pixel,
            "step": self.step,
            "n": self.n_samples,
            "fd_bias": self.fd_bias,
            "entries": {name: entry.to_dict() for name, entry in self.entries.items()},
        }
