"""Depth asymptotics of the expected number of critical points."""

import logging
import math
from typing import Optional

from critfield.core.constants import DEFAULT_MC_SAMPLES
from critfield.core.errors import ConvergenceError, RegimeError, UnsupportedKernelError
from critfield.core.models import (
    CRIKind,
    CritCountPrediction,
    GOIEstimate,
    GOIParams,
    IndexSelector,
    Kernel,
    RegimeTag,
)
from critfield.core.parallel import ParallelSampler, RNGLike, resolve_seed
from critfield.goi.estimators import goi_expectation_mc
from critfield.kacrice.predictions import expected_crit_count_above, kac_rice_prefactor
from critfield.kernel.covariance import classify_regime

logger = logging.getLogger(__name__)

DEFAULT_LIMIT_DEPTHS = (40, 60)


def constant_Ai(
    d: int,
    i: int,
    mc_samples: int = DEFAULT_MC_SAMPLES,
    rng: RNGLike = None,
    sampler: Optional[ParallelSampler] = None,
) -> GOIEstimate:
    """Leading constant of the sparse and high-disorder growth laws."""
    IndexSelector(i).validate(d)
    estimate = goi_expectation_mc(GOIParams(d, 0.5), IndexSelector(i), mc_samples, rng, sampler)
    return estimate.scaled(kac_rice_prefactor(d, 1.0))


def limiting_eta(kernel: Kernel) -> float:
    """Low-disorder limit of eta_L, kappa'(1)(1 - kappa'(1)) / kappa''(1)."""
    return kernel.dkappa1 * (1.0 - kernel.dkappa1) / kernel.ddkappa1


def bi_prefactor(kernel: Kernel, d: int) -> float:
    """Kac-Rice prefactor evaluated at the low-disorder limit of eta_L."""
    return kac_rice_prefactor(d, limiting_eta(kernel))


def constant_Bi(
    kernel: Kernel,
    d: int,
    i: int,
    mc_samples: int = DEFAULT_MC_SAMPLES,
    rng: RNGLike = None,
    sampler: Optional[ParallelSampler] = None,
) -> GOIEstimate:
    """Limit of the expected index-i count as depth grows, for kappa'(1) < 1."""
    IndexSelector(i).validate(d)
    if classify_regime(kernel).tag is not RegimeTag.LOW_DISORDER:
        raise RegimeError(f"B_i needs kappa'(1) < 1, got {kernel.dkappa1:.12g}")
    if not kernel.has_finite_ddkappa1:
        raise UnsupportedKernelError(f"{kernel.activation.label} has infinite kappa''(1)")
    eta = limiting_eta(kernel)
    estimate = goi_expectation_mc(
        GOIParams(d, 0.5 * (1.0 + eta)), IndexSelector(i), mc_samples, rng, sampler
    )
    return estimate.scaled(bi_prefactor(kernel, d))


def constant_Di(
    kernel: Kernel,
    d: int,
    i: int,
    u: float,
    mc_samples: int = DEFAULT_MC_SAMPLES,
    rng: RNGLike = None,
    depths: tuple[int, int] = DEFAULT_LIMIT_DEPTHS,
    rel_tol: float = 0.05,
    sampler: Optional[ParallelSampler] = None,
) -> GOIEstimate:
    """
    lim_L E[C_i(T_L, u)] / kappa'(1)^{Ld/2} for kappa'(1) > 1.

    Evaluated at two depths with common random numbers; the two values must
    agree within 3 joint stderr plus ``rel_tol`` of the deeper one.
    """
    if classify_regime(kernel).tag is not RegimeTag.HIGH_DISORDER:
        raise RegimeError(f"D_i needs kappa'(1) > 1, got {kernel.dkappa1:.12g}")
    seed = resolve_seed(rng)
    estimates = []
    for L in depths:
        prediction = expected_crit_count_above(kernel, L, d, i, u, mc_samples, seed, sampler)
        growth = math.exp(0.5 * L * d * math.log(kernel.dkappa1))
        estimates.append(GOIEstimate(prediction.value / growth, prediction.stderr / growth, mc_samples))

    shallow, deep = estimates
    gap = abs(shallow.mean - deep.mean)
    allowed = 3.0 * math.hypot(shallow.stderr, deep.stderr) + rel_tol * abs(deep.mean)
    if gap > allowed:
        raise ConvergenceError(
            f"D_{i} not converged: {shallow.mean:.6g} at L={depths[0]} vs "
            f"{deep.mean:.6g} at L={depths[1]}"
        )
    return deep


def asymptotic_crit_count(
    kernel: Kernel,
    L: int,
    d: int,
    i: int,
    mc_samples: int = DEFAULT_MC_SAMPLES,
    rng: RNGLike = None,
    sampler: Optional[ParallelSampler] = None,
) -> CritCountPrediction:
    """Leading-order expected index-i count at depth L for the kernel's regime."""
    if kernel.cri.kind is not CRIKind.GREATER_THAN_TWO:
        raise UnsupportedKernelError(
            f"{kernel.activation.label} has CRI {kernel.cri.kind.value}; "
            "the depth asymptotics need CRI > 2"
        )
    k1, k2 = kernel.dkappa1, kernel.ddkappa1
    eta = k1 / k2

    match classify_regime(kernel).tag:
        case RegimeTag.LOW_DISORDER:
            estimate = constant_Bi(kernel, d, i, mc_samples, rng, sampler)
        case RegimeTag.SPARSE:
            estimate = constant_Ai(d, i, mc_samples, rng, sampler).scaled((L / eta) ** (0.5 * d))
        case RegimeTag.HIGH_DISORDER:
            growth = math.exp(0.5 * d * (L * math.log(k1) - math.log(eta * (k1 - 1.0))))
            estimate = constant_Ai(d, i, mc_samples, rng, sampler).scaled(growth)
    return CritCountPrediction(estimate.mean, estimate.stderr, i, L, d)
