"""Random fields on S^2: finite-width networks and Gaussian spectral synthesis."""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import healpy as hp
import numpy as np

from critfield.core.constants import TRUNCATION_WARNING_LEVEL
from critfield.core.errors import ArgumentError
from critfield.core.models import (
    AngularSpectrum,
    FieldSample,
    GridScheme,
    NetworkConfig,
    SphereGrid,
)
from critfield.core.parallel import ParallelSampler, RNGLike, chunk_sizes, resolve_seed
from critfield.kernel.activations import evaluate_activation, lambda_w
from critfield.kernel.covariance import build_kernel, kappa_L_eval
from critfield.kernel.spectrum import variance_explained

logger = logging.getLogger(__name__)

# Pixels pushed through the network at once
_PIXEL_BATCH = 4096
# Weight draws per work chunk of network_correlation_check
_DRAW_CHUNK = 100


def _draw_weights(cfg: NetworkConfig, gen: np.random.Generator) -> list[tuple[np.ndarray, np.ndarray]]:
    """Layer weights and biases, first layer first, scalar output last."""
    lb = cfg.activation.lambda_b
    lw = lambda_w(cfg.activation)
    fan = (cfg.d + 1, *cfg.widths, 1)
    layers = []
    for s in range(len(fan) - 1):
        n_in, n_out = fan[s], fan[s + 1]
        std = math.sqrt(1.0 - lb) if s == 0 else math.sqrt(lw / n_in)
        weights = std * gen.standard_normal((n_out, n_in))
        bias = math.sqrt(lb) * gen.standard_normal(n_out)
        layers.append((weights, bias))
    return layers


def _forward(cfg: NetworkConfig, layers, points: np.ndarray) -> np.ndarray:
    values = np.empty(len(points))
    for start in range(0, len(points), _PIXEL_BATCH):
        stop = start + _PIXEL_BATCH
        weights, bias = layers[0]
        h = points[start:stop] @ weights.T + bias
        for weights, bias in layers[1:]:
            h = evaluate_activation(cfg.activation, h) @ weights.T + bias
        values[start:stop] = h[:, 0]
    return values


def evaluate_network(cfg: NetworkConfig, points: np.ndarray, rng: RNGLike = None) -> np.ndarray:
    """
    Output of one random network at the given unit vectors.

    All weights are drawn before any point is evaluated, so every point sees the
    same network.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[1] != cfg.d + 1:
        raise ArgumentError(f"points must have shape (n, {cfg.d + 1}), got {points.shape}")
    gen = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    return _forward(cfg, _draw_weights(cfg, gen), points)


def simulate_network_field(cfg: NetworkConfig, grid: SphereGrid, rng: RNGLike = None) -> FieldSample:
    """One finite-width network realization evaluated at every pixel of ``grid``."""
    if cfg.d != 2:
        raise ArgumentError(f"sphere grids live on S^2, network has d={cfg.d}")
    seed = resolve_seed(rng)
    values = evaluate_network(cfg, grid.centers, seed)
    return FieldSample(values=values, source=cfg, seed=seed)


def _network_draws(size: int, seed: int, cfg: NetworkConfig, points: np.ndarray) -> np.ndarray:
    gen = np.random.default_rng(seed)
    return np.stack([_forward(cfg, _draw_weights(cfg, gen), points) for _ in range(size)])


@dataclass(frozen=True)
class PairCorrelation:
    """Empirical correlation of a network at two pixels against the limit kernel."""

    pixel_a: int
    pixel_b: int
    inner: float
    empirical: float
    target: float


def network_correlation_check(
    cfg: NetworkConfig,
    grid: SphereGrid,
    pairs: Sequence[tuple[int, int]],
    n_draws: int = 10_000,
    rng: RNGLike = None,
    sampler: Optional[ParallelSampler] = None,
) -> list[PairCorrelation]:
    """
    Correlations of T_L at pixel pairs over independent weight draws.

    The target is kappa_L applied to the first-layer correlation
    (1 - Lambda_b) <x, y> + Lambda_b.
    """
    if n_draws < 2:
        raise ArgumentError(f"need at least 2 draws, got {n_draws}")
    pairs = [(int(a), int(b)) for a, b in pairs]
    pixels = sorted({p for pair in pairs for p in pair})
    column = {p: k for k, p in enumerate(pixels)}
    points = grid.centers[pixels]

    sampler = sampler or ParallelSampler()
    draws = np.concatenate(
        sampler.map_chunks(
            _network_draws, chunk_sizes(n_draws, _DRAW_CHUNK), resolve_seed(rng), cfg, points
        )
    )
    kernel = build_kernel(cfg.activation)
    lb = cfg.activation.lambda_b

    results = []
    for a, b in pairs:
        x, y = draws[:, column[a]], draws[:, column[b]]
        inner = float(np.clip(grid.centers[a] @ grid.centers[b], -1.0, 1.0))
        target = float(kappa_L_eval(kernel, cfg.depth, (1.0 - lb) * inner + lb))
        results.append(PairCorrelation(a, b, inner, float(np.corrcoef(x, y)[0, 1]), target))
    return results


def n_coefficients(lmax: int) -> int:
    return (lmax + 1) ** 2


def coefficient_index(ell, m):
    """Position of the real harmonic (ell, m), -ell <= m <= ell, in a coefficient vector."""
    return ell * ell + ell + m


def _legendre_by_order(lmax: int, z: np.ndarray):
    """
    Yield (m, rows) where rows[ell - m] is the orthonormal associated Legendre
    function of degree ell and order m at z, for ell = m..lmax.

    Includes the Condon-Shortley phase and the 1/sqrt(4 pi) normalization, so
    that Y_lm = rows * {1, sqrt(2) cos(m phi), sqrt(2) sin(|m| phi)}.
    """
    s = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    pmm = np.full_like(z, 1.0 / math.sqrt(4.0 * math.pi))
    for m in range(lmax + 1):
        if m > 0:
            pmm = -math.sqrt((2 * m + 1) / (2 * m)) * s * pmm
        rows = np.empty((lmax - m + 1, len(z)))
        rows[0] = pmm
        if m < lmax:
            rows[1] = math.sqrt(2 * m + 3) * z * pmm
        for ell in range(m + 2, lmax + 1):
            a = math.sqrt((4 * ell * ell - 1) / (ell * ell - m * m))
            b = math.sqrt(((ell - 1) ** 2 - m * m) / (4 * (ell - 1) ** 2 - 1))
            rows[ell - m] = a * (z * rows[ell - m - 1] - b * rows[ell - m - 2])
        yield m, rows


def evaluate_harmonics(coefficients: np.ndarray, lmax: int, points: np.ndarray) -> np.ndarray:
    """
    Real spherical-harmonic expansion sum_lm a_lm Y_lm(x) at arbitrary unit vectors.

    ``coefficients`` has shape (..., (lmax+1)^2); the result has shape (..., n_points).
    """
    coefficients = np.asarray(coefficients, dtype=float)
    if coefficients.shape[-1] != n_coefficients(lmax):
        raise ArgumentError(
            f"expected {n_coefficients(lmax)} coefficients for lmax={lmax}, "
            f"got {coefficients.shape[-1]}"
        )
    points = np.atleast_2d(np.asarray(points, dtype=float))
    z = np.clip(points[:, 2], -1.0, 1.0)
    phi = np.arctan2(points[:, 1], points[:, 0])

    values = np.zeros(coefficients.shape[:-1] + (len(points),))
    for m, rows in _legendre_by_order(lmax, z):
        ell = np.arange(m, lmax + 1)
        cos_part = coefficients[..., coefficient_index(ell, m)] @ rows
        if m == 0:
            values += cos_part
            continue
        sin_part = coefficients[..., coefficient_index(ell, -m)] @ rows
        values += math.sqrt(2.0) * (cos_part * np.cos(m * phi) + sin_part * np.sin(m * phi))
    return values


def _healpix_synthesis(coefficients: np.ndarray, lmax: int, nside: int) -> np.ndarray:
    ell, m = hp.Alm.getlm(lmax)
    cos_coef = coefficients[coefficient_index(ell, m)]
    sin_coef = coefficients[coefficient_index(ell, -m)]
    alm = np.where(m == 0, cos_coef, (cos_coef - 1j * sin_coef) / math.sqrt(2.0)).astype(np.complex128)
    return hp.alm2map(alm, nside, lmax=lmax, pol=False)


def draw_harmonic_coefficients(spec: AngularSpectrum, gen: np.random.Generator) -> np.ndarray:
    """Independent real coefficients with Var(a_lm) = 4 pi chat_l / (2l + 1)."""
    ell = np.repeat(np.arange(spec.lmax + 1), 2 * np.arange(spec.lmax + 1) + 1)
    std = np.sqrt(4.0 * math.pi * np.maximum(spec.chat, 0.0) / (2 * np.arange(spec.lmax + 1) + 1))
    return std[ell] * gen.standard_normal(n_coefficients(spec.lmax))


def synthesize_gaussian_field(
    spec: AngularSpectrum,
    grid: SphereGrid,
    rng: RNGLike = None,
    keep_coefficients: bool = False,
) -> FieldSample:
    """
    Exact sample of the isotropic Gaussian field whose covariance is the
    truncated Legendre sum of ``spec``.
    """
    explained = variance_explained(spec, spec.lmax)
    if explained < TRUNCATION_WARNING_LEVEL:
        logger.warning(
            "lmax=%d explains only %.4f of the variance of the depth-%d kernel",
            spec.lmax,
            explained,
            spec.depth,
        )
    seed = resolve_seed(rng)
    coefficients = draw_harmonic_coefficients(spec, np.random.default_rng(seed))

    if grid.scheme is GridScheme.HEALPIX:
        values = _healpix_synthesis(coefficients, spec.lmax, grid.nside)
    else:
        values = evaluate_harmonics(coefficients, spec.lmax, grid.centers)

    return FieldSample(
        values=np.asarray(values, dtype=float),
        source=spec,
        seed=seed,
        coefficients=coefficients if keep_coefficients else None,
    )
