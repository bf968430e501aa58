"""Monte Carlo expectations over GOI(c) eigenvalues."""

import logging
import math
from typing import Optional

import numpy as np
from scipy.special import gammaln
from scipy.stats import truncnorm

from critfield.core.constants import DEFAULT_MC_SAMPLES, MC_CHUNK_SIZE, MIN_MC_SAMPLES
from critfield.core.errors import ArgumentError, NumericalError, ParameterError
from critfield.core.models import GOIEstimate, GOIParams, IndexSelector
from critfield.core.parallel import (
    MomentAccumulator,
    ParallelSampler,
    RNGLike,
    chunk_sizes,
    derive_seed,
    resolve_seed,
)
from critfield.goi.density import goi_normalization, vandermonde

logger = logging.getLogger(__name__)


def _as_generator(rng: RNGLike) -> np.random.Generator:
    return rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)


def sample_goi_matrices(params: GOIParams, n: int, rng: RNGLike = None) -> np.ndarray:
    """n independent GOI(c) matrices, shape (n, d, d)."""
    if params.c < 0:
        raise ParameterError(f"matrix construction needs c >= 0, got {params.c}")
    gen = _as_generator(rng)
    d = params.d
    g = gen.standard_normal((n, d, d))
    xi = gen.standard_normal(n)
    # diagonal variance 1, off-diagonal variance 1/2, plus sqrt(c) xi I
    matrices = 0.5 * (g + np.swapaxes(g, 1, 2))
    matrices += math.sqrt(params.c) * xi[:, None, None] * np.eye(d)
    return matrices


def sample_goi_matrix(params: GOIParams, rng: RNGLike = None) -> np.ndarray:
    return sample_goi_matrices(params, 1, rng)[0]


def change_of_variables_factor(d: int) -> float:
    """(2 pi)^{d/2} / (K_d d!)."""
    return math.exp(0.5 * d * math.log(2.0 * math.pi) - gammaln(d + 1)) / goi_normalization(d)


def shifted_index_weight(lam_sorted: np.ndarray, i: int, shift) -> np.ndarray:
    """prod_j |lam_j - shift| on the event lam_i < shift < lam_{i+1}, zero elsewhere."""
    shift = np.asarray(shift, dtype=float)
    centered = lam_sorted - shift[..., None] if shift.ndim else lam_sorted - shift
    below = np.sum(centered < 0, axis=-1)
    on_event = (below == i) & np.all(centered != 0, axis=-1)
    return np.where(on_event, np.prod(np.abs(centered), axis=-1), 0.0)


def _check_run(params: GOIParams, sel: IndexSelector, n: int) -> None:
    sel.validate(params.d)
    if n < MIN_MC_SAMPLES:
        raise ArgumentError(f"need at least {MIN_MC_SAMPLES} samples, got {n}")


def _theta_cholesky(d: int, c: float) -> np.ndarray:
    return np.linalg.cholesky(np.eye(d) + c * np.ones((d, d)))


def _change_of_variables_values(size: int, seed: int, d: int, c: float, i: int, shift: float) -> np.ndarray:
    gen = np.random.default_rng(seed)
    z = np.sort(gen.standard_normal((size, d)) @ _theta_cholesky(d, c).T, axis=1)
    return change_of_variables_factor(d) * vandermonde(z) * shifted_index_weight(z, i, shift)


def _change_of_variables_chunk(size: int, seed: int, d: int, c: float, i: int, shift: float) -> MomentAccumulator:
    return MomentAccumulator.of(_change_of_variables_values(size, seed, d, c, i, shift))


def _eigenvalue_chunk(size: int, seed: int, d: int, c: float, i: int, shift: float) -> MomentAccumulator:
    gen = np.random.default_rng(seed)
    matrices = sample_goi_matrices(GOIParams(d, c), size, gen)
    try:
        lam = np.linalg.eigvalsh(matrices)
    except np.linalg.LinAlgError as e:
        raise NumericalError(f"symmetric eigensolver failed: {e}") from e
    return MomentAccumulator.of(shifted_index_weight(lam, i, shift))


def _threshold_chunk(
    size: int, seed: int, d: int, c: float, i: int, scale: float, lower: float
) -> MomentAccumulator:
    gen = np.random.default_rng(seed)
    x = truncnorm.rvs(lower, np.inf, size=size, random_state=gen)
    z = np.sort(gen.standard_normal((size, d)) @ _theta_cholesky(d, c).T, axis=1)
    values = change_of_variables_factor(d) * vandermonde(z) * shifted_index_weight(z, i, scale * x)
    return MomentAccumulator.of(values)


def goi_expectation_mc(
    params: GOIParams,
    sel: IndexSelector,
    n: int = DEFAULT_MC_SAMPLES,
    rng: RNGLike = None,
    sampler: Optional[ParallelSampler] = None,
) -> GOIEstimate:
    """
    E_GOI(c)[prod |lam - s| 1{lam_i < s < lam_{i+1}}] by the Gaussian change of variables.

    Z ~ N(0, I + c 11^T) is sorted; the ordered-region indicator becomes a 1/d!
    factor because the law of Z is exchangeable.
    """
    _check_run(params, sel, n)
    sampler = sampler or ParallelSampler()
    return sampler.estimate(
        _change_of_variables_chunk, n, MC_CHUNK_SIZE, resolve_seed(rng),
        params.d, params.c, sel.i, sel.shift,
    )


def goi_expectation_oracle(
    params: GOIParams,
    sel: IndexSelector,
    n: int = DEFAULT_MC_SAMPLES,
    rng: RNGLike = None,
    sampler: Optional[ParallelSampler] = None,
) -> GOIEstimate:
    """Same expectation from exact eigenvalues of sampled GOI matrices."""
    _check_run(params, sel, n)
    if params.c < 0:
        raise ParameterError(f"matrix construction needs c >= 0, got {params.c}")
    sampler = sampler or ParallelSampler()
    return sampler.estimate(
        _eigenvalue_chunk, n, MC_CHUNK_SIZE, resolve_seed(rng),
        params.d, params.c, sel.i, sel.shift,
    )


def goi_threshold_expectation_mc(
    params: GOIParams,
    i: int,
    scale: float,
    lower: float,
    n: int = DEFAULT_MC_SAMPLES,
    rng: RNGLike = None,
    sampler: Optional[ParallelSampler] = None,
) -> GOIEstimate:
    """
    E_x E_GOI(c)[prod |lam - scale x| 1{lam_i < scale x < lam_{i+1}}] with x ~ N(0,1) | x >= lower.

    One x is drawn per eigenvalue vector, so outer and inner averages share a
    single Monte Carlo error.
    """
    _check_run(params, IndexSelector(i), n)
    sampler = sampler or ParallelSampler()
    return sampler.estimate(
        _threshold_chunk, n, MC_CHUNK_SIZE, resolve_seed(rng),
        params.d, params.c, i, scale, lower,
    )


def goi_running_estimate(
    params: GOIParams,
    sel: IndexSelector,
    checkpoints: list[int],
    rng: RNGLike = None,
) -> list[GOIEstimate]:
    """Running change-of-variables estimates after each checkpoint sample count."""
    checkpoints = sorted(set(int(n) for n in checkpoints))
    if not checkpoints:
        raise ArgumentError("no checkpoints given")
    _check_run(params, sel, checkpoints[0])
    master = resolve_seed(rng)
    acc = MomentAccumulator()
    results: list[GOIEstimate] = []
    pending = iter(checkpoints)
    target = next(pending)
    drawn = 0
    # chunks follow goi_expectation_mc's partition of the largest checkpoint
    for k, size in enumerate(chunk_sizes(checkpoints[-1], MC_CHUNK_SIZE)):
        values = _change_of_variables_values(
            size, derive_seed(master, k), params.d, params.c, sel.i, sel.shift
        )
        while target is not None and drawn + size >= target:
            head = values[: target - drawn]
            results.append(acc.merge(MomentAccumulator.of(head)).estimate())
            target = next(pending, None)
        acc = acc.merge(MomentAccumulator.of(values))
        drawn += size
    return results
