"""The covariance kernel kappa, its depth-L composition and regime classification."""

import json
import logging
import math
from functools import lru_cache
from typing import Union

import numpy as np
from numpy.polynomial import polynomial as P
from scipy import integrate
from scipy.stats import norm

from critfield.core.constants import (
    DEFAULT_HERMITE_ORDER,
    KERNEL_IDENTITY_TOL,
    MAX_HERMITE_ORDER,
    REGIME_TOLERANCE,
    SERIES_TAIL_TOL,
)
from critfield.core.errors import ArgumentError, ConvergenceError, UnsupportedKernelError
from critfield.core.models import (
    CRI,
    Activation,
    ActivationKind,
    CRIKind,
    Kernel,
    Regime,
    RegimeTag,
)
from critfield.core.quadrature import gauss_hermite
from critfield.kernel.activations import (
    activation_kinks,
    evaluate_activation,
    hermite_moments,
    lambda_w,
)

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

# Slack on |u| <= 1 for arguments produced by cos() and earlier compositions
_UNIT_SLACK = 1e-12


def _series_tail(coeffs: np.ndarray) -> float:
    """Largest q(q-1) b_q over the last tenth of the series (at least 10 terms)."""
    q = np.arange(len(coeffs))
    width = max(10, len(coeffs) // 10)
    return float(np.max((q * np.maximum(q - 1, 1) * coeffs)[-width:]))


def _cri_annotation(act: Activation) -> CRI:
    match act.kind:
        case ActivationKind.GAUSSIAN_RBF | ActivationKind.TANH:
            return CRI(CRIKind.GREATER_THAN_TWO)
        case ActivationKind.RELU:
            return CRI(CRIKind.KNOWN, 1.5)
        case _:
            return CRI(CRIKind.UNKNOWN)


@lru_cache(maxsize=64)
def build_kernel(act: Activation, order: int = DEFAULT_HERMITE_ORDER) -> Kernel:
    """
    Build the one-layer kernel of an activation.

    Args:
        act: Activation with its bias variance.
        order: Initial series truncation Q. For activations with finite kappa''(1)
            it doubles until the tail of q(q-1) b_q falls below the tolerance.

    Returns:
        An immutable Kernel.
    """
    if order < 2:
        raise ArgumentError(f"series order must be >= 2, got {order}")
    weight = lambda_w(act)

    while True:
        moments, nodes = hermite_moments(act, order)
        coeffs = weight * moments * moments
        coeffs[0] += act.lambda_b
        if act.kind is ActivationKind.RELU or _series_tail(coeffs) < SERIES_TAIL_TOL:
            break
        if order >= MAX_HERMITE_ORDER:
            raise ConvergenceError(
                f"Hermite series of {act.label} has tail {_series_tail(coeffs):.3e} "
                f"at order {order}; kappa''(1) cannot be resolved"
            )
        order = min(2 * order, MAX_HERMITE_ORDER)
        logger.info("extending Hermite series of %s to order %d", act.label, order)

    q = np.arange(len(coeffs))
    if act.kind is ActivationKind.RELU:
        # kappa'(u) = (1 - Lambda_b)(pi - arccos u)/pi; kappa'' ~ (1 - u)^(-1/2)
        dkappa1, ddkappa1 = 1.0 - act.lambda_b, math.inf
    else:
        dkappa1, ddkappa1 = float(q @ coeffs), float((q * (q - 1)) @ coeffs)

    coeffs.setflags(write=False)
    kernel = Kernel(
        activation=act,
        lambda_w=weight,
        coeffs=coeffs,
        dkappa1=dkappa1,
        ddkappa1=ddkappa1,
        cri=_cri_annotation(act),
        quad_nodes=nodes,
    )
    _check_series(kernel)
    return kernel


def _close(value: float, target: float, tol: float = KERNEL_IDENTITY_TOL) -> bool:
    return abs(value - target) <= tol * max(1.0, abs(target))


def _check_series(kernel: Kernel) -> None:
    """Unit variance, the convexity bound and closed-form derivatives of a built series."""
    label = kernel.activation.label
    coeffs = kernel.coeffs
    total = float(coeffs.sum())
    if not np.all(np.isfinite(coeffs)) or not total > 0.0:
        raise ConvergenceError(f"Hermite series of {label} is degenerate (sum {total:.6g})")

    if not kernel.has_finite_ddkappa1:
        # a truncated series of a kernel with infinite kappa''(1) only approaches 1 from below
        if total > 1.0 + KERNEL_IDENTITY_TOL:
            raise ConvergenceError(f"Hermite series of {label} sums to {total:.12g} > 1")
        return

    if not _close(total, 1.0):
        raise ConvergenceError(f"Hermite series of {label} sums to {total:.12g}, expected 1")
    k1, k2 = kernel.dkappa1, kernel.ddkappa1
    if not k1 >= 0.0 or k2 < k1 * (k1 - 1.0) - KERNEL_IDENTITY_TOL * max(1.0, k2):
        raise ConvergenceError(
            f"Hermite series of {label} violates kappa''(1) >= kappa'(1)(kappa'(1) - 1): "
            f"kappa'(1) = {k1:.12g}, kappa''(1) = {k2:.12g}"
        )
    if kernel.activation.kind is ActivationKind.GAUSSIAN_RBF:
        _, first, second = kappa_derivs_at(kernel, 1.0)
        if not (_close(k1, float(first)) and _close(k2, float(second))):
            raise ConvergenceError(
                f"Hermite series of {label} gives kappa'(1) = {k1:.12g}, kappa''(1) = {k2:.12g}; "
                f"closed form {float(first):.12g}, {float(second):.12g}"
            )


def _check_unit_interval(u: np.ndarray) -> np.ndarray:
    if np.any(np.abs(u) > 1.0 + _UNIT_SLACK):
        raise ArgumentError("kappa is defined on [-1, 1] only")
    return np.clip(u, -1.0, 1.0)


def kappa_eval(kernel: Kernel, u: ArrayLike) -> ArrayLike:
    """kappa(u) = Lambda_W E[sigma(Z1) sigma(u Z1 + sqrt(1 - u^2) Z2)] + Lambda_b."""
    u = _check_unit_interval(np.asarray(u, dtype=float))
    act = kernel.activation
    match act.kind:
        case ActivationKind.GAUSSIAN_RBF:
            a2 = act.a**2
            value = kernel.lambda_w / np.sqrt((1.0 + a2) ** 2 - a2 * a2 * u * u) + act.lambda_b
        case ActivationKind.RELU:
            value = (1.0 - act.lambda_b) * (
                np.sqrt(1.0 - u * u) + u * (np.pi - np.arccos(u))
            ) / np.pi + act.lambda_b
        case _:
            value = P.polyval(u, kernel.coeffs)
    return value if value.ndim else float(value)


def kappa_derivs_at(kernel: Kernel, u: ArrayLike) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """kappa, kappa' and kappa'' at u (closed forms where available)."""
    u = _check_unit_interval(np.asarray(u, dtype=float))
    act = kernel.activation
    match act.kind:
        case ActivationKind.GAUSSIAN_RBF:
            a2 = act.a**2
            base = (1.0 + a2) ** 2 - a2 * a2 * u * u
            value = kernel.lambda_w * base**-0.5 + act.lambda_b
            first = kernel.lambda_w * a2 * a2 * u * base**-1.5
            second = kernel.lambda_w * a2 * a2 * (base**-1.5 + 3.0 * a2 * a2 * u * u * base**-2.5)
        case ActivationKind.RELU:
            scale = 1.0 - act.lambda_b
            value = kappa_eval(kernel, u)
            first = scale * (np.pi - np.arccos(u)) / np.pi
            with np.errstate(divide="ignore"):
                second = scale / (np.pi * np.sqrt(1.0 - u * u))
        case _:
            d1 = P.polyder(kernel.coeffs)
            value = P.polyval(u, kernel.coeffs)
            first = P.polyval(u, d1)
            second = P.polyval(u, P.polyder(d1))
    return np.asarray(value), np.asarray(first), np.asarray(second)


def kappa_derivs_at_one(kernel: Kernel) -> tuple[float, float]:
    """(kappa'(1), kappa''(1)); kappa''(1) is +inf for ReLU (see ``has_finite_ddkappa1``)."""
    return kernel.dkappa1, kernel.ddkappa1


def kappa_L_eval(kernel: Kernel, L: int, u: ArrayLike) -> ArrayLike:
    """L-fold composition kappa(kappa(...kappa(u)))."""
    if L < 1:
        raise ArgumentError(f"depth must be >= 1, got {L}")
    value = kappa_eval(kernel, u)
    for _ in range(L - 1):
        value = kappa_eval(kernel, np.clip(value, -1.0, 1.0))
    return value


def kappa_L_derivs(kernel: Kernel, L: int, u: ArrayLike) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """kappa_L and its first two derivatives at u by the chain rule."""
    if L < 1:
        raise ArgumentError(f"depth must be >= 1, got {L}")
    value = np.asarray(u, dtype=float)
    first = np.ones_like(value)
    second = np.zeros_like(value)
    for _ in range(L):
        k0, k1, k2 = kappa_derivs_at(kernel, np.clip(value, -1.0, 1.0))
        second = k2 * first * first + k1 * second
        first = k1 * first
        value = k0
    return value, first, second


def kappa_L_derivs_fd(kernel: Kernel, L: int, h: float = 1e-4) -> tuple[float, float]:
    """One-sided five-point finite differences of kappa_L at u = 1."""
    f = [float(kappa_L_eval(kernel, L, 1.0 - k * h)) for k in range(5)]
    first = (25 * f[0] - 48 * f[1] + 36 * f[2] - 16 * f[3] + 3 * f[4]) / (12 * h)
    second = (35 * f[0] - 104 * f[1] + 114 * f[2] - 56 * f[3] + 11 * f[4]) / (12 * h * h)
    return first, second


def depth_derivs(kernel: Kernel, L: int, tolerance: float = REGIME_TOLERANCE) -> tuple[float, float]:
    """
    (kappa_L'(1), kappa_L''(1)) from kappa'(1) and kappa''(1).

    Within the sparse tolerance kappa'(1) is taken as exactly 1, so that
    kappa_L'(1) = 1 and kappa_L''(1) = L kappa''(1).
    """
    if L < 1:
        raise ArgumentError(f"depth must be >= 1, got {L}")
    if not kernel.has_finite_ddkappa1:
        raise UnsupportedKernelError(
            f"{kernel.activation.label} has infinite kappa''(1); the depth recursion "
            "needs a twice differentiable kernel"
        )
    k1, k2 = kernel.dkappa1, kernel.ddkappa1
    if abs(k1 - 1.0) <= tolerance:
        return 1.0, L * k2
    if k1 == 0.0:
        return 0.0, k2 if L == 1 else 0.0
    # (k1^L - 1)/(k1 - 1) without cancellation near k1 = 1
    geometric = math.expm1(L * math.log(k1)) / (k1 - 1.0)
    return k1**L, k2 * k1 ** (L - 1) * geometric


def classify_regime(kernel: Kernel, tolerance: float = REGIME_TOLERANCE) -> Regime:
    """Low-disorder, sparse or high-disorder according to kappa'(1)."""
    k1 = kernel.dkappa1
    if k1 < 1.0 - tolerance:
        tag = RegimeTag.LOW_DISORDER
    elif k1 > 1.0 + tolerance:
        tag = RegimeTag.HIGH_DISORDER
    else:
        tag = RegimeTag.SPARSE
    return Regime(tag=tag, dkappa1=k1, tolerance=tolerance)


def kappa_quadrature(act: Activation, u: float, n_nodes: int = 300) -> float:
    """
    kappa(u) evaluated directly from its Gaussian-integral definition.

    Smooth activations use a tensor Gauss-Hermite rule; activations with kinks use
    adaptive quadrature split at the kinks.
    """
    if abs(u) > 1.0:
        raise ArgumentError("kappa is defined on [-1, 1] only")
    s = math.sqrt(max(1.0 - u * u, 0.0))
    kinks = activation_kinks(act)

    if not kinks:
        x, w = gauss_hermite(n_nodes)
        outer = evaluate_activation(act, x)
        inner = evaluate_activation(act, u * x[:, None] + s * x[None, :])
        expectation = float((w * outer) @ inner @ w)
        return lambda_w(act) * expectation + act.lambda_b

    def sigma(z: float) -> float:
        return float(evaluate_activation(act, z))

    def split_quad(func, points) -> float:
        edges = [-np.inf, *sorted(points), np.inf]
        return sum(
            integrate.quad(func, lo, hi, epsabs=1e-13, epsrel=1e-12, limit=200)[0]
            for lo, hi in zip(edges, edges[1:])
        )

    def inner_mean(z1: float) -> float:
        if s == 0.0:
            return sigma(u * z1)
        return split_quad(
            lambda z2: sigma(u * z1 + s * z2) * norm.pdf(z2),
            [(k - u * z1) / s for k in kinks],
        )

    expectation = split_quad(lambda z1: sigma(z1) * norm.pdf(z1) * inner_mean(z1), kinks)
    return lambda_w(act) * expectation + act.lambda_b


def kernel_to_json(kernel: Kernel) -> str:
    return json.dumps(kernel.to_dict(), indent=2)


def kernel_from_json(text: str) -> Kernel:
    """Restore a kernel written by :func:`kernel_to_json` without recomputing it."""
    data = json.loads(text)
    try:
        act = Activation.from_dict(data["activation"])
        cri = data["cri"]
        coeffs = np.asarray(data["coeffs"], dtype=float)
        coeffs.setflags(write=False)
        ddkappa1 = data["ddkappa1"]
        return Kernel(
            activation=act,
            lambda_w=float(data["lambda_w"]),
            coeffs=coeffs,
            dkappa1=float(data["dkappa1"]),
            ddkappa1=math.inf if ddkappa1 == "inf" else float(ddkappa1),
            cri=CRI(CRIKind(cri["kind"]), cri.get("value")),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise ArgumentError(f"malformed kernel JSON: {e}") from e
