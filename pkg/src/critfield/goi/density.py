"""Ordered-eigenvalue density of GOI(c) matrices."""

import math

import numpy as np
from scipy.special import gammaln

from critfield.core.errors import ArgumentError
from critfield.core.models import GOIParams


def goi_normalization(d: int) -> float:
    """K_d = 2^{d/2} prod_{j=1..d} Gamma(j/2)."""
    if d < 1:
        raise ArgumentError(f"dimension must be >= 1, got {d}")
    return math.exp(0.5 * d * math.log(2.0) + sum(gammaln(j / 2.0) for j in range(1, d + 1)))


def vandermonde(lam: np.ndarray) -> np.ndarray:
    """prod_{i<j} |lam_j - lam_i| along the last axis."""
    lam = np.asarray(lam, dtype=float)
    d = lam.shape[-1]
    out = np.ones(lam.shape[:-1])
    for i in range(d):
        for j in range(i + 1, d):
            out = out * np.abs(lam[..., j] - lam[..., i])
    return out


def goi_density(lam, params: GOIParams) -> float:
    """Joint density of the ordered eigenvalues; zero off the ordered region."""
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    d, c = params.d, params.c
    if lam.shape != (d,):
        raise ArgumentError(f"expected {d} eigenvalues, got shape {lam.shape}")
    if np.any(np.diff(lam) < 0):
        return 0.0
    spread = 1.0 + d * c
    exponent = -0.5 * lam @ lam + c * lam.sum() ** 2 / (2.0 * spread)
    return float(vandermonde(lam) * math.exp(exponent) / (goi_normalization(d) * math.sqrt(spread)))
