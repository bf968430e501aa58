"""Finite-depth Kac-Rice predictions for the expected number of critical points."""

import logging
import math
from dataclasses import dataclass
from typing import Optional

from scipy.special import gammaln, ndtr

from critfield.core.constants import DEFAULT_MC_SAMPLES, THRESHOLD_MINUS_INF
from critfield.core.errors import (
    ArgumentError,
    DegeneracyError,
    NumericalError,
    UnsupportedKernelError,
)
from critfield.core.models import (
    CritCountPrediction,
    DepthSpectralParams,
    GOIParams,
    IndexSelector,
    Kernel,
)
from critfield.core.parallel import ParallelSampler, RNGLike, derive_seed, resolve_seed
from critfield.goi.estimators import goi_expectation_mc, goi_threshold_expectation_mc
from critfield.kernel.covariance import depth_derivs

logger = logging.getLogger(__name__)


def sphere_volume(d: int) -> float:
    """Surface measure of S^d, 2 pi^{(d+1)/2} / Gamma((d+1)/2)."""
    if d < 1:
        raise ArgumentError(f"dimension must be >= 1, got {d}")
    return 2.0 * math.exp(0.5 * (d + 1) * math.log(math.pi) - gammaln(0.5 * (d + 1)))


def kac_rice_prefactor(d: int, eta: float) -> float:
    """2 sqrt(pi) / (Gamma((d+1)/2) eta^{d/2})."""
    return 2.0 * math.sqrt(math.pi) * math.exp(-gammaln(0.5 * (d + 1)) - 0.5 * d * math.log(eta))


def spectral_params(kernel: Kernel, L: int, d: int) -> DepthSpectralParams:
    """eta_L, xi_L and gamma_L at depth L, validated against the nondegeneracy bound."""
    if d < 1:
        raise ArgumentError(f"dimension must be >= 1, got {d}")
    try:
        first, second = depth_derivs(kernel, L)
    except OverflowError as e:
        raise NumericalError(f"depth {L} overflows double precision for {kernel.activation.label}") from e
    if not second > 0.0:
        raise UnsupportedKernelError(
            f"{kernel.activation.label} has kappa_L''(1) = {second}; the Hessian law is degenerate"
        )
    if not math.isfinite(second) or not math.isfinite(first * first):
        raise NumericalError(f"depth {L} overflows double precision for {kernel.activation.label}")
    eta = first / second
    xi = first * first / second
    gamma = (first * first - first) / second
    if not gamma < (d + 2) / 2:
        raise DegeneracyError(f"gamma_L = {gamma:.6g} violates gamma_L < (d+2)/2 = {(d + 2) / 2}")
    return DepthSpectralParams(L=L, d=d, eta_L=eta, xi_L=xi, gamma_L=gamma)


def check_degeneracy(kernel: Kernel, L: int, d: int) -> float:
    """gamma_L; raises DegeneracyError if the nondegeneracy bound fails."""
    return spectral_params(kernel, L, d).gamma_L


def expected_crit_count(
    kernel: Kernel,
    L: int,
    d: int,
    i: int,
    mc_samples: int = DEFAULT_MC_SAMPLES,
    rng: RNGLike = None,
    sampler: Optional[ParallelSampler] = None,
) -> CritCountPrediction:
    """Expected number of index-i critical points of the depth-L limit field on S^d."""
    IndexSelector(i).validate(d)
    params = spectral_params(kernel, L, d)
    estimate = goi_expectation_mc(
        GOIParams(d, 0.5 * (1.0 + params.eta_L)),
        IndexSelector(i, 0.0),
        mc_samples,
        rng,
        sampler,
    ).scaled(kac_rice_prefactor(d, params.eta_L))
    return CritCountPrediction(estimate.mean, estimate.stderr, i, L, d)


def expected_crit_count_above(
    kernel: Kernel,
    L: int,
    d: int,
    i: int,
    u: float,
    mc_samples: int = DEFAULT_MC_SAMPLES,
    rng: RNGLike = None,
    sampler: Optional[ParallelSampler] = None,
) -> CritCountPrediction:
    """
    Expected number of index-i critical points at which the field exceeds u.

    The value integral over x >= u is sampled from the truncated normal and
    weighted by 1 - Phi(u); u = -inf is replaced by -12, u = +inf gives 0.
    """
    IndexSelector(i).validate(d)
    params = spectral_params(kernel, L, d)
    if u == math.inf:
        return CritCountPrediction(0.0, 0.0, i, L, d, threshold=u)
    lower = max(u, THRESHOLD_MINUS_INF)
    estimate = goi_threshold_expectation_mc(
        GOIParams(d, 0.5 * (1.0 + params.eta_L - params.xi_L)),
        i,
        params.k_L / math.sqrt(2.0),
        lower,
        mc_samples,
        rng,
        sampler,
    ).scaled(kac_rice_prefactor(d, params.eta_L) * float(ndtr(-lower)))
    return CritCountPrediction(estimate.mean, estimate.stderr, i, L, d, threshold=u)


@dataclass(frozen=True)
class PredictionTable:
    """Predictions for every index at one depth, with the Morse alternating sum."""

    predictions: tuple[CritCountPrediction, ...]
    morse_sum: float
    morse_stderr: float


def prediction_table(
    kernel: Kernel,
    L: int,
    d: int,
    mc_samples: int = DEFAULT_MC_SAMPLES,
    rng: RNGLike = None,
    threshold: Optional[float] = None,
    sampler: Optional[ParallelSampler] = None,
) -> PredictionTable:
    """All indices 0..d, each from an independent substream of the master seed."""
    master = resolve_seed(rng)
    predictions = []
    for i in range(d + 1):
        seed = derive_seed(master, i)
        if threshold is None:
            predictions.append(expected_crit_count(kernel, L, d, i, mc_samples, seed, sampler))
        else:
            predictions.append(
                expected_crit_count_above(kernel, L, d, i, threshold, mc_samples, seed, sampler)
            )
    morse = sum((-1) ** p.index * p.value for p in predictions)
    morse_err = math.sqrt(sum(p.stderr**2 for p in predictions))
    return PredictionTable(tuple(predictions), morse, morse_err)
