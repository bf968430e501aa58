"""Angular power spectrum of kappa_L on S^2."""

import math

import numpy as np

from critfield.core.constants import (
    SPECTRUM_EPS,
    SPECTRUM_MIN_NODES,
    SPECTRUM_PANEL_NODES,
    SPECTRUM_POLAR_LEVELS,
    SPECTRUM_QUAD_TOL,
)
from critfield.core.errors import ArgumentError, ConvergenceError
from critfield.core.models import AngularSpectrum, Kernel
from critfield.core.quadrature import composite_gauss_legendre
from critfield.kernel.covariance import kappa_L_eval


def polar_graded_rule(
    n_nodes: int,
    lmax: int,
    edge_nodes: int = SPECTRUM_PANEL_NODES,
    levels: int = SPECTRUM_POLAR_LEVELS,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Nodes t = cos(theta) and weights for integrals over [-1, 1] in dt.

    Gauss-Legendre panels in theta: ``n_nodes`` nodes on uniform panels away from
    the poles, and panels halving in width toward theta = 0 and theta = pi, where
    kappa_L of a deep network concentrates.
    """
    theta_edge = min(math.pi / 4, 8 * math.pi / max(lmax, 1))
    n_panels = max(1, math.ceil(n_nodes / SPECTRUM_PANEL_NODES))
    bulk = np.linspace(theta_edge, math.pi - theta_edge, n_panels + 1)
    polar = np.concatenate([[0.0], theta_edge * 2.0 ** -np.arange(levels, -1, -1.0)])

    bulk_theta, bulk_w = composite_gauss_legendre(bulk, SPECTRUM_PANEL_NODES)
    polar_theta, polar_w = composite_gauss_legendre(polar, edge_nodes)
    theta = np.concatenate([polar_theta, bulk_theta, math.pi - polar_theta])
    weights = np.concatenate([polar_w, bulk_w, polar_w])
    return np.cos(theta), weights * np.sin(theta)


def legendre_project(values: np.ndarray, t: np.ndarray, w: np.ndarray, lmax: int) -> np.ndarray:
    """(2l+1)/2 * integral of f P_l for l = 0..lmax, by three-term recursion."""
    fw = values * w
    chat = np.empty(lmax + 1)
    p_prev, p = np.ones_like(t), t.copy()
    chat[0] = 0.5 * fw.sum()
    if lmax >= 1:
        chat[1] = 1.5 * (fw @ p)
    for ell in range(1, lmax):
        p_prev, p = p, ((2 * ell + 1) * t * p - ell * p_prev) / (ell + 1)
        chat[ell + 1] = (2 * ell + 3) / 2 * (fw @ p)
    return chat


def legendre_sum(spec: AngularSpectrum, t) -> np.ndarray:
    """sum_l chat_l P_l(t): the covariance represented by a spectrum."""
    return np.polynomial.legendre.legval(np.asarray(t, dtype=float), spec.chat)


def angular_spectrum(kernel: Kernel, L: int, lmax: int, quad_nodes: int | None = None) -> AngularSpectrum:
    """
    Legendre coefficients chat_0..chat_lmax of kappa_L.

    The projection is repeated with twice the nodes; a change above the tolerance
    in any coefficient raises ConvergenceError.
    """
    if L < 1:
        raise ArgumentError(f"depth must be >= 1, got {L}")
    if lmax < 0:
        raise ArgumentError(f"lmax must be >= 0, got {lmax}")
    if quad_nodes is None:
        quad_nodes = max(SPECTRUM_MIN_NODES, 4 * lmax)
    if quad_nodes < 2 * lmax:
        raise ArgumentError(f"need at least 2*lmax = {2 * lmax} nodes, got {quad_nodes}")

    def project(n_nodes: int, edge_nodes: int) -> np.ndarray:
        t, w = polar_graded_rule(n_nodes, lmax, edge_nodes)
        return legendre_project(kappa_L_eval(kernel, L, t), t, w, lmax)

    coarse = project(quad_nodes, SPECTRUM_PANEL_NODES)
    chat = project(2 * quad_nodes, 2 * SPECTRUM_PANEL_NODES)
    change = float(np.max(np.abs(chat - coarse)))
    if change > SPECTRUM_QUAD_TOL:
        raise ConvergenceError(
            f"angular spectrum of depth {L} changed by {change:.2e} when doubling "
            f"{quad_nodes} quadrature nodes"
        )
    if chat.min() < -SPECTRUM_EPS or chat.sum() > 1.0 + SPECTRUM_EPS:
        raise ConvergenceError(
            f"angular spectrum of depth {L} is not a variance decomposition "
            f"(min {chat.min():.2e}, sum {chat.sum():.12f})"
        )
    chat.setflags(write=False)
    return AngularSpectrum(lmax=lmax, chat=chat, depth=L, quad_nodes=quad_nodes)


def variance_explained(spec: AngularSpectrum, lcut: int) -> float:
    """Share of the unit variance carried by multipoles l <= lcut."""
    if lcut > spec.lmax:
        raise ArgumentError(f"lcut {lcut} exceeds lmax {spec.lmax}")
    if lcut < 0:
        raise ArgumentError(f"lcut must be >= 0, got {lcut}")
    return float(np.clip(np.sum(spec.chat[: lcut + 1]), 0.0, 1.0))


def gradient_variance(spec: AngularSpectrum) -> float:
    """Variance of a unit-speed directional derivative, sum_l chat_l l(l+1)/2."""
    ell = np.arange(spec.lmax + 1)
    return float(spec.chat @ (ell * (ell + 1) / 2.0))
