"""Empirical covariances of a field and its derivatives in an orthonormal tangent frame."""

import logging
import math
from typing import Sequence

import numpy as np

from critfield.core.constants import FRAME_STEP, MIN_FRAME_SAMPLES
from critfield.core.errors import ArgumentError
from critfield.core.models import (
    AngularSpectrum,
    CovarianceEntry,
    FieldSample,
    FrameCovarianceReport,
    SphereGrid,
)
from critfield.core.parallel import MomentAccumulator
from critfield.kernel.spectrum import gradient_variance
from critfield.sphere.fields import evaluate_harmonics

logger = logging.getLogger(__name__)


def tangent_frame(p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Two orthonormal tangent vectors at the unit vector p."""
    axis = np.array([0.0, 0.0, 1.0]) if abs(p[2]) < 0.9 else np.array([1.0, 0.0, 0.0])
    e1 = np.cross(axis, p)
    e1 /= np.linalg.norm(e1)
    return e1, np.cross(p, e1)


def _second_derivative_at_one(spec: AngularSpectrum) -> float:
    """sum_l chat_l P_l''(1) with P_l''(1) = (l-1) l (l+1) (l+2) / 8."""
    ell = np.arange(spec.lmax + 1)
    return float(spec.chat @ ((ell - 1) * ell * (ell + 1) * (ell + 2) / 8.0))


def _entry(x: np.ndarray, y: np.ndarray, target: float) -> CovarianceEntry:
    estimate = MomentAccumulator.of(x * y).estimate()
    return CovarianceEntry(estimate.mean, estimate.stderr, target)


def empirical_frame_covariances(
    samples: Sequence[FieldSample],
    grid: SphereGrid,
    pixel: int,
    h: float = FRAME_STEP,
) -> FrameCovarianceReport:
    """
    Second moments of T and its frame derivatives E_1 T, E_2 T at one pixel.

    Derivatives are central differences along the two great circles through the
    pixel, with the field re-evaluated off-grid from each sample's harmonic
    coefficients. ``fd_bias`` is h^2 kappa_L''(1), a bound on the bias of the
    derivative variances.
    """
    if len(samples) < MIN_FRAME_SAMPLES:
        raise ArgumentError(f"need at least {MIN_FRAME_SAMPLES} samples, got {len(samples)}")
    if not 0 <= pixel < grid.npix:
        raise ArgumentError(f"pixel {pixel} outside grid of {grid.npix} pixels")
    spec = samples[0].source
    for s in samples:
        if not isinstance(s.source, AngularSpectrum) or s.coefficients is None:
            raise ArgumentError("frame covariances need spectral samples that kept their coefficients")
        if s.source.lmax != spec.lmax:
            raise ArgumentError("all samples must share the same lmax")

    p = grid.centers[pixel]
    e1, e2 = tangent_frame(p)
    points = np.stack(
        [
            p,
            math.cos(h) * p + math.sin(h) * e1,
            math.cos(h) * p - math.sin(h) * e1,
            math.cos(h) * p + math.sin(h) * e2,
            math.cos(h) * p - math.sin(h) * e2,
        ]
    )
    coefficients = np.stack([s.coefficients for s in samples])
    values = evaluate_harmonics(coefficients, spec.lmax, points)

    t = values[:, 0]
    d1 = (values[:, 1] - values[:, 2]) / (2.0 * h)
    d2 = (values[:, 3] - values[:, 4]) / (2.0 * h)
    gradient = gradient_variance(spec)

    entries = {
        "var_T": _entry(t, t, spec.total),
        "cov_T_E1T": _entry(t, d1, 0.0),
        "cov_T_E2T": _entry(t, d2, 0.0),
        "var_E1T": _entry(d1, d1, gradient),
        "var_E2T": _entry(d2, d2, gradient),
        "cov_E1T_E2T": _entry(d1, d2, 0.0),
    }
    logger.info("frame covariances at pixel %d from %d samples", pixel, len(samples))
    return FrameCovarianceReport(
        pixel=pixel,
        step=h,
        n_samples=len(samples),
        fd_bias=h * h * _second_derivative_at_one(spec),
        entries=entries,
    )
