"""Tests for the covariance kernel, its depth composition and the angular spectrum."""

import math

import numpy as np
import pytest
from numpy.polynomial import hermite_e
from scipy.special import eval_legendre

from critfield.core.errors import ArgumentError, ConvergenceError, UnsupportedKernelError
from critfield.core.models import Activation, CRIKind, RegimeTag
from critfield.core.quadrature import gauss_hermite, gauss_legendre
from critfield.kernel import (
    angular_spectrum,
    build_kernel,
    classify_regime,
    depth_derivs,
    kappa_derivs_at,
    kappa_eval,
    kappa_L_derivs,
    kappa_L_derivs_fd,
    kappa_L_eval,
    kappa_quadrature,
    kernel_from_json,
    kernel_to_json,
    legendre_sum,
    variance_explained,
)
from critfield.kernel import covariance
from critfield.kernel.activations import evaluate_activation, hermite_moments, lambda_w
from critfield.kernel.spectrum import legendre_project


@pytest.mark.parametrize("name", ["low_kernel", "sparse_kernel", "high_kernel", "relu_kernel", "tanh_kernel"])
def test_unit_variance(name, request):
    kernel = request.getfixturevalue(name)
    assert kappa_eval(kernel, 1.0) == pytest.approx(1.0, abs=1e-9)
    assert float(kappa_L_eval(kernel, 5, 1.0)) == pytest.approx(1.0, abs=1e-9)


def test_unit_variance_with_bias():
    kernel = build_kernel(Activation.gaussian(a2=2.0, lambda_b=0.3))
    assert kappa_eval(kernel, 1.0) == pytest.approx(1.0, abs=1e-9)
    assert kernel.coeffs.sum() == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("lambda_b", [0.0, 0.1])
@pytest.mark.parametrize(
    "act",
    [
        lambda b: Activation.gaussian(a2=0.5, lambda_b=b),
        lambda b: Activation.gaussian(a2=9.0, lambda_b=b),
        lambda b: Activation.relu(lambda_b=b),
        lambda b: Activation.tanh(lambda_b=b),
    ],
    ids=["gaussian-low", "gaussian-high", "relu", "tanh"],
)
def test_unit_variance_for_every_family(act, lambda_b):
    kernel = build_kernel(act(lambda_b))
    if kernel.has_finite_ddkappa1:
        assert kernel.coeffs.sum() == pytest.approx(1.0, abs=1e-8)
    else:
        assert 1.0 - 1e-2 < kernel.coeffs.sum() <= 1.0 + 1e-12
    assert kappa_eval(kernel, 1.0) == pytest.approx(1.0, abs=1e-9)
    assert kernel.dkappa1 > 0.0


@pytest.mark.parametrize("n", [100, 400, 1600, 3200])
def test_gauss_hermite_is_finite_at_large_n(n):
    x, w = gauss_hermite(n)
    assert np.all(np.isfinite(x)) and np.all(np.isfinite(w))
    assert np.all(w >= 0.0)
    assert w.sum() == pytest.approx(1.0, abs=1e-10)
    assert w @ x**2 == pytest.approx(1.0, abs=1e-10)
    assert w @ x**4 == pytest.approx(3.0, abs=1e-9)


@pytest.mark.parametrize("a2", [0.5, 1.0, 9.0])
def test_gaussian_moments_match_direct_projection(a2):
    act = Activation.gaussian(a2=a2)
    moments, nodes = hermite_moments(act, 20)
    assert nodes == 0
    x, w = gauss_hermite(200)
    sigma = evaluate_activation(act, x)
    for q in range(21):
        basis = np.zeros(q + 1)
        basis[q] = 1.0
        direct = (w * sigma) @ hermite_e.hermeval(x, basis) / math.sqrt(math.factorial(q))
        assert moments[q] == pytest.approx(direct, abs=1e-10)


def test_tanh_slope_matches_derivative_moment(tanh_kernel):
    # kappa'(1) = Lambda_W E[sigma'(Z)^2] and tanh' = sech^2
    x, w = gauss_hermite(400)
    expected = lambda_w(tanh_kernel.activation) * (w @ np.cosh(x) ** -4)
    assert tanh_kernel.dkappa1 == pytest.approx(expected, rel=1e-8)
    assert tanh_kernel.quad_nodes > 0


def test_gaussian_series_derivatives_match_closed_form(low_kernel, high_kernel):
    for kernel in (low_kernel, high_kernel):
        _, first, second = kappa_derivs_at(kernel, 1.0)
        assert kernel.dkappa1 == pytest.approx(float(first), rel=1e-10)
        assert kernel.ddkappa1 == pytest.approx(float(second), rel=1e-10)


def test_zeroed_series_is_rejected(monkeypatch):
    monkeypatch.setattr(covariance, "hermite_moments", lambda act, order: (np.zeros(order + 1), 400))
    with pytest.raises(ConvergenceError, match="sums to"):
        build_kernel(Activation.tanh(lambda_b=0.0123))


def test_wrong_series_is_rejected(monkeypatch):
    other = Activation.gaussian(a2=0.5)
    monkeypatch.setattr(covariance, "hermite_moments", lambda act, order: hermite_moments(other, order))
    with pytest.raises(ConvergenceError):
        build_kernel(Activation.gaussian(a2=1.7))


def test_dkappa1_of_gaussian_regimes(low_kernel, sparse_kernel, high_kernel):
    assert low_kernel.dkappa1 == pytest.approx(1.0 / 3.0, rel=1e-9)
    assert sparse_kernel.dkappa1 == pytest.approx(1.0, abs=1e-9)
    assert high_kernel.dkappa1 == pytest.approx(81.0 / 19.0, rel=1e-9)


def test_ddkappa1_matches_closed_form(low_kernel, sparse_kernel):
    # a^4/(1+2a^2) + 3 a^8/(1+2a^2)^2
    assert low_kernel.ddkappa1 == pytest.approx(2.0 / 3.0, rel=1e-8)
    assert sparse_kernel.ddkappa1 == pytest.approx(4.0, rel=1e-8)


def test_relu_kernel(relu_kernel):
    assert relu_kernel.dkappa1 == 1.0
    assert math.isinf(relu_kernel.ddkappa1)
    assert not relu_kernel.has_finite_ddkappa1
    assert relu_kernel.cri.kind is CRIKind.KNOWN
    assert relu_kernel.cri.value == 1.5
    assert kappa_eval(relu_kernel, 0.0) == pytest.approx(1.0 / math.pi, abs=1e-15)
    # odd coefficients beyond the linear term vanish
    assert np.all(np.abs(relu_kernel.coeffs[3::2]) < 1e-15)


def test_series_coefficients(low_kernel, tanh_kernel):
    for kernel in (low_kernel, tanh_kernel):
        assert np.all(kernel.coeffs >= -1e-15)
        assert kernel.coeffs.sum() == pytest.approx(1.0, abs=1e-8)
    # even activation: only even powers survive
    assert np.all(np.abs(low_kernel.coeffs[1::2]) < 1e-14)


@pytest.mark.parametrize("name", ["low_kernel", "high_kernel", "relu_kernel"])
def test_closed_forms_match_quadrature(name, request):
    kernel = request.getfixturevalue(name)
    for u in np.linspace(-1.0, 1.0, 41):
        assert kappa_eval(kernel, u) == pytest.approx(kappa_quadrature(kernel.activation, u), abs=1e-8)


def test_series_matches_quadrature_for_tanh(tanh_kernel):
    for u in (-0.5, 0.2, 0.8):
        assert kappa_eval(tanh_kernel, u) == pytest.approx(kappa_quadrature(tanh_kernel.activation, u), abs=1e-8)


@pytest.mark.parametrize("name", ["low_kernel", "sparse_kernel", "high_kernel", "tanh_kernel"])
def test_kernel_bounds(name, request):
    kernel = request.getfixturevalue(name)
    u = np.linspace(-1.0, 1.0, 41)
    values = kappa_eval(kernel, u)
    assert np.all(np.abs(values) <= 1.0 + 1e-12)
    assert np.all(np.diff(values[20:]) >= -1e-12)
    # convexity of x -> x(x - 1)
    assert kernel.ddkappa1 >= kernel.dkappa1 * (kernel.dkappa1 - 1.0) - 1e-12


def test_kappa_outside_unit_interval(low_kernel):
    with pytest.raises(ArgumentError):
        kappa_eval(low_kernel, 1.5)


def test_depth_derivs_base_case(high_kernel):
    assert depth_derivs(high_kernel, 1) == pytest.approx((high_kernel.dkappa1, high_kernel.ddkappa1))


def test_depth_derivs_sparse(sparse_kernel):
    first, second = depth_derivs(sparse_kernel, 7)
    assert first == 1.0
    assert second == pytest.approx(7.0 * sparse_kernel.ddkappa1, rel=1e-12)


@pytest.mark.parametrize("name", ["low_kernel", "high_kernel"])
@pytest.mark.parametrize("L", [1, 3, 6])
def test_depth_derivs_match_chain_rule(name, L, request):
    kernel = request.getfixturevalue(name)
    _, first, second = kappa_L_derivs(kernel, L, 1.0)
    assert depth_derivs(kernel, L) == pytest.approx((float(first), float(second)), rel=1e-8)


@pytest.mark.parametrize("name", ["low_kernel", "high_kernel"])
def test_depth_derivs_match_finite_differences(name, request):
    kernel = request.getfixturevalue(name)
    first, second = depth_derivs(kernel, 3)
    fd_first, fd_second = kappa_L_derivs_fd(kernel, 3)
    assert fd_first == pytest.approx(first, rel=1e-6)
    assert fd_second == pytest.approx(second, rel=1e-5)


def test_depth_derivs_relu_unsupported(relu_kernel):
    with pytest.raises(UnsupportedKernelError):
        depth_derivs(relu_kernel, 2)


@pytest.mark.parametrize("name", ["low_kernel", "sparse_kernel", "high_kernel"])
def test_gamma_is_depth_invariant(name, request):
    kernel = request.getfixturevalue(name)
    gammas = []
    for L in range(1, 7):
        first, second = depth_derivs(kernel, L)
        gammas.append((first * first - first) / second)
    expected = kernel.dkappa1 * (kernel.dkappa1 - 1.0) / kernel.ddkappa1
    assert gammas == pytest.approx([expected] * 6, rel=1e-9, abs=1e-9)


def test_classify_regime(low_kernel, sparse_kernel, high_kernel, relu_kernel):
    assert classify_regime(low_kernel).tag is RegimeTag.LOW_DISORDER
    assert classify_regime(sparse_kernel).tag is RegimeTag.SPARSE
    assert classify_regime(high_kernel).tag is RegimeTag.HIGH_DISORDER
    assert classify_regime(relu_kernel).tag is RegimeTag.SPARSE


def test_regime_with_bias_is_low_disorder():
    kernel = build_kernel(Activation.relu(lambda_b=0.2))
    assert kernel.dkappa1 == pytest.approx(0.8)
    assert classify_regime(kernel).tag is RegimeTag.LOW_DISORDER


def test_kernel_json(high_kernel, relu_kernel):
    for kernel in (high_kernel, relu_kernel):
        restored = kernel_from_json(kernel_to_json(kernel))
        assert restored.activation == kernel.activation
        assert restored.dkappa1 == kernel.dkappa1
        assert restored.ddkappa1 == kernel.ddkappa1
        np.testing.assert_array_equal(restored.coeffs, kernel.coeffs)


def test_kernel_json_malformed():
    with pytest.raises(ArgumentError):
        kernel_from_json('{"activation": {"kind": "relu"}}')


def test_spectrum_of_identity_kernel(identity_kernel):
    spec = angular_spectrum(identity_kernel, 4, 6)
    expected = np.zeros(7)
    expected[1] = 1.0
    np.testing.assert_allclose(spec.chat, expected, atol=1e-10)
    assert variance_explained(spec, 1) == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("name", ["low_kernel", "sparse_kernel", "high_kernel", "relu_kernel"])
def test_spectrum_is_variance_decomposition(name, request):
    kernel = request.getfixturevalue(name)
    spec = angular_spectrum(kernel, 2, 64)
    assert np.all(spec.chat >= -1e-8)
    assert 0.0 < spec.total <= 1.0 + 1e-8
    assert variance_explained(spec, spec.lmax) == pytest.approx(min(spec.total, 1.0))


def test_spectrum_resums_to_kernel(low_kernel):
    spec = angular_spectrum(low_kernel, 3, 48)
    t = np.linspace(-1.0, 1.0, 21)
    np.testing.assert_allclose(legendre_sum(spec, t), kappa_L_eval(low_kernel, 3, t), atol=1e-8)


def test_variance_explained_rejects_large_cut(low_kernel):
    spec = angular_spectrum(low_kernel, 1, 8)
    with pytest.raises(ArgumentError):
        variance_explained(spec, 9)


def test_spectrum_needs_enough_nodes(low_kernel):
    with pytest.raises(ArgumentError):
        angular_spectrum(low_kernel, 1, 100, quad_nodes=150)


@pytest.mark.slow
def test_variance_explained_decreases_with_depth(high_kernel):
    values = [variance_explained(angular_spectrum(high_kernel, L, 1536), 1536) for L in (40, 50, 60)]
    assert values[0] < 1.0
    assert values[0] > values[1] > values[2]


def test_legendre_projection_recovers_coefficients():
    lmax = 40
    coeffs = np.random.default_rng(4).standard_normal(lmax + 1)
    t, w = gauss_legendre(64)
    values = sum(c * eval_legendre(ell, t) for ell, c in enumerate(coeffs))
    np.testing.assert_allclose(legendre_project(values, t, w, lmax), coeffs, atol=1e-11)
