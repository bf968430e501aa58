"""Covariance kernels of infinite-width networks."""

from critfield.kernel.activations import (
    evaluate_activation,
    hermite_coefficients,
    hermite_moments,
    lambda_w,
    second_moment,
)
from critfield.kernel.covariance import (
    build_kernel,
    classify_regime,
    depth_derivs,
    kappa_derivs_at,
    kappa_derivs_at_one,
    kappa_eval,
    kappa_L_derivs,
    kappa_L_derivs_fd,
    kappa_L_eval,
    kappa_quadrature,
    kernel_from_json,
    kernel_to_json,
)
from critfield.kernel.spectrum import (
    angular_spectrum,
    gradient_variance,
    legendre_sum,
    variance_explained,
)

__all__ = [
    "evaluate_activation",
    "hermite_coefficients",
    "hermite_moments",
    "lambda_w",
    "second_moment",
    "build_kernel",
    "classify_regime",
    "depth_derivs",
    "kappa_derivs_at",
    "kappa_derivs_at_one",
    "kappa_eval",
    "kappa_L_derivs",
    "kappa_L_derivs_fd",
    "kappa_L_eval",
    "kappa_quadrature",
    "kernel_from_json",
    "kernel_to_json",
    "angular_spectrum",
    "gradient_variance",
    "legendre_sum",
    "variance_explained",
]
