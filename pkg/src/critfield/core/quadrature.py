"""Gauss quadrature rules shared by the kernel and spectrum code."""

from functools import lru_cache

import numpy as np
from scipy.special import roots_hermitenorm

from critfield.core.errors import ConvergenceError


@lru_cache(maxsize=16)
def gauss_hermite(n: int) -> tuple[np.ndarray, np.ndarray]:
    """
    Gauss-Hermite rule for the standard normal weight.

    Parameters
    ----------
    n : int
        Number of nodes.

    Returns
    -------
    knots, weights : ndarray
        ``sum(weights * f(knots))`` approximates ``E[f(Z)]`` for ``Z ~ N(0, 1)``.
    """
    knots, weights = roots_hermitenorm(n)
    if not (np.all(np.isfinite(knots)) and np.all(np.isfinite(weights))):
        raise ConvergenceError(f"Gauss-Hermite rule with {n} nodes is not finite")
    weights = weights / np.sqrt(2.0 * np.pi)
    knots.setflags(write=False)
    weights.setflags(write=False)
    return knots, weights


@lru_cache(maxsize=16)
def gauss_legendre(n: int, a: float = -1.0, b: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre rule on ``[a, b]``."""
    knots, weights = np.polynomial.legendre.leggauss(n)
    knots = 0.5 * (b - a) * knots + 0.5 * (b + a)
    weights = 0.5 * (b - a) * weights
    knots.setflags(write=False)
    weights.setflags(write=False)
    return knots, weights


def composite_gauss_legendre(breakpoints: np.ndarray, nodes_per_panel: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre rule applied on every panel between consecutive breakpoints."""
    ref_x, ref_w = gauss_legendre(nodes_per_panel)
    lo = np.asarray(breakpoints[:-1], dtype=float)[:, None]
    hi = np.asarray(breakpoints[1:], dtype=float)[:, None]
    knots = 0.5 * (hi - lo) * ref_x[None, :] + 0.5 * (hi + lo)
    weights = 0.5 * (hi - lo) * ref_w[None, :]
    return knots.ravel(), weights.ravel()
