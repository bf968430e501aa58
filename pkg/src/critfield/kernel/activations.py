"""Activation functions and their Gaussian (Hermite) moments."""

import logging
import math
from functools import lru_cache

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.special import gammaln

from critfield.core.constants import (
    DEFAULT_HERMITE_NODES,
    HERMITE_RELATIVE_TOL,
    MAX_HERMITE_NODES,
    SECOND_MOMENT_RELATIVE_TOL,
)
from critfield.core.errors import ArgumentError, ConvergenceError
from critfield.core.models import Activation, ActivationKind
from critfield.core.quadrature import gauss_hermite

logger = logging.getLogger(__name__)


@lru_cache(maxsize=32)
def _table_spline(act: Activation) -> CubicSpline:
    return CubicSpline(np.asarray(act.table_x), np.asarray(act.table_y), extrapolate=True)


def evaluate_activation(act: Activation, x) -> np.ndarray:
    """Apply the activation elementwise."""
    x = np.asarray(x, dtype=float)
    match act.kind:
        case ActivationKind.GAUSSIAN_RBF:
            return np.exp(-0.5 * act.a**2 * x * x)
        case ActivationKind.RELU:
            return np.maximum(x, 0.0)
        case ActivationKind.TANH:
            return np.tanh(x)
        case ActivationKind.NUMERIC_TABLE:
            return _table_spline(act)(x)


def activation_kinks(act: Activation) -> tuple[float, ...]:
    """Points where the activation is not smooth."""
    return (0.0,) if act.kind is ActivationKind.RELU else ()


def second_moment(act: Activation) -> float:
    """E[sigma(Z)^2] for a standard normal Z."""
    match act.kind:
        case ActivationKind.GAUSSIAN_RBF:
            return 1.0 / math.sqrt(1.0 + 2.0 * act.a**2)
        case ActivationKind.RELU:
            return 0.5

    n = DEFAULT_HERMITE_NODES
    previous = None
    while n <= MAX_HERMITE_NODES:
        x, w = gauss_hermite(n)
        value = float(w @ evaluate_activation(act, x) ** 2)
        if previous is not None and abs(value - previous) <= SECOND_MOMENT_RELATIVE_TOL * abs(value):
            break
        previous = value
        n *= 2
    else:
        raise ConvergenceError(
            f"E[sigma(Z)^2] for {act.label} did not converge with {MAX_HERMITE_NODES} nodes"
        )
    if not value > 0.0 or not math.isfinite(value):
        raise ArgumentError(f"activation {act.label} has E[sigma(Z)^2] = {value}")
    return value


def lambda_w(act: Activation) -> float:
    """Weight variance (1 - Lambda_b) / E[sigma(Z)^2] giving the field unit variance."""
    return (1.0 - act.lambda_b) / second_moment(act)


def _relu_moments(order: int) -> np.ndarray:
    """Normalized Hermite moments E[relu(Z) He_q(Z)] / sqrt(q!), in closed form."""
    moments = np.zeros(order + 1)
    moments[0] = 1.0 / math.sqrt(2.0 * math.pi)
    moments[1] = 0.5
    # E[relu(Z) He_q(Z)] = phi(0) He_{q-2}(0), and He_{2m}(0) = (-1)^m (2m-1)!!
    q = np.arange(2, order + 1, 2)
    m = (q - 2) // 2
    log_abs = (
        -0.5 * math.log(2.0 * math.pi)
        + gammaln(2 * m + 1)
        - m * math.log(2.0)
        - gammaln(m + 1)
        - 0.5 * gammaln(q + 1)
    )
    moments[q] = np.where(m % 2 == 0, 1.0, -1.0) * np.exp(log_abs)
    return moments


def _gaussian_moments(a2: float, order: int) -> np.ndarray:
    """Normalized Hermite moments of exp(-a^2 x^2 / 2), in closed form.

    E[exp(-a^2 Z^2/2) exp(tZ - t^2/2)] = exp(-s t^2 / 2) / sqrt(1 + a^2) with
    s = a^2 / (1 + a^2), so only even orders survive.
    """
    moments = np.zeros(order + 1)
    m = np.arange(order // 2 + 1)
    q = 2 * m
    s = a2 / (1.0 + a2)
    log_abs = 0.5 * gammaln(q + 1) - gammaln(m + 1) + m * math.log(0.5 * s) - 0.5 * math.log1p(a2)
    moments[q] = np.where(m % 2 == 0, 1.0, -1.0) * np.exp(log_abs)
    return moments


def _quadrature_moments(act: Activation, order: int, n_nodes: int) -> np.ndarray:
    """Normalized Hermite moments by Gauss-Hermite quadrature.

    The recursion runs on Hermite functions h_q(x) exp(-x^2/4), which stay bounded
    where the polynomials themselves overflow.
    """
    x, w = gauss_hermite(n_nodes)
    # w exp(x^2/4) in log form; weights that underflow to zero stay zero
    with np.errstate(divide="ignore"):
        weighted = np.exp(np.log(w) + 0.25 * x * x) * evaluate_activation(act, x)

    moments = np.empty(order + 1)
    g_prev = np.exp(-0.25 * x * x)
    g = x * g_prev
    moments[0] = weighted @ g_prev
    moments[1] = weighted @ g
    for q in range(1, order):
        g_prev, g = g, (x * g - math.sqrt(q) * g_prev) / math.sqrt(q + 1)
        moments[q + 1] = weighted @ g
    if not np.all(np.isfinite(moments)):
        raise ConvergenceError(
            f"Hermite moments of {act.label} are not finite with {n_nodes} quadrature nodes"
        )
    return moments


def _series_sums(moments: np.ndarray) -> np.ndarray:
    q = np.arange(len(moments))
    sq = moments * moments
    return np.array([sq.sum(), (q * sq).sum(), (q * (q - 1) * sq).sum()])


def hermite_moments(act: Activation, order: int) -> tuple[np.ndarray, int]:
    """
    Normalized Hermite moments J_q(sigma) / sqrt(q!) for q = 0..order.

    Returns the moments and the number of quadrature nodes used (0 for closed forms).
    Gaussian RBF and ReLU moments are exact.
    The node count doubles until the sums that feed kappa(1), kappa'(1) and
    kappa''(1) change by less than the relative tolerance.
    """
    match act.kind:
        case ActivationKind.RELU:
            return _relu_moments(order), 0
        case ActivationKind.GAUSSIAN_RBF:
            return _gaussian_moments(act.a**2, order), 0

    n = max(DEFAULT_HERMITE_NODES, 2 * order)
    moments = _quadrature_moments(act, order, n)
    while True:
        if 2 * n > MAX_HERMITE_NODES:
            raise ConvergenceError(
                f"Hermite moments of {act.label} up to order {order} did not converge "
                f"with {MAX_HERMITE_NODES} nodes"
            )
        refined = _quadrature_moments(act, order, 2 * n)
        old, new = _series_sums(moments), _series_sums(refined)
        scale = np.maximum(np.abs(new), abs(new[0]))
        n *= 2
        moments = refined
        if np.all(np.abs(new - old) <= HERMITE_RELATIVE_TOL * scale):
            return moments, n


def hermite_coefficients(act: Activation, Q: int) -> np.ndarray:
    """
    Power-series coefficients b_0..b_Q of the one-layer kernel.

    b_q = Lambda_W J_q^2 / q! with probabilists' Hermite polynomials, and the bias
    variance added to b_0.
    """
    if Q < 2:
        raise ArgumentError(f"series order must be >= 2, got {Q}")
    moments, _ = hermite_moments(act, Q)
    coeffs = lambda_w(act) * moments * moments
    coeffs[0] += act.lambda_b
    return coeffs
