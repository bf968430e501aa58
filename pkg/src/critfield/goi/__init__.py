"""Gaussian Orthogonally Invariant random matrices."""

from critfield.goi.density import goi_density, goi_normalization, vandermonde
from critfield.goi.estimators import (
    change_of_variables_factor,
    goi_expectation_mc,
    goi_expectation_oracle,
    goi_running_estimate,
    goi_threshold_expectation_mc,
    sample_goi_matrices,
    sample_goi_matrix,
    shifted_index_weight,
)

__all__ = [
    "goi_density",
    "goi_normalization",
    "vandermonde",
    "change_of_variables_factor",
    "goi_expectation_mc",
    "goi_expectation_oracle",
    "goi_running_estimate",
    "goi_threshold_expectation_mc",
    "sample_goi_matrices",
    "sample_goi_matrix",
    "shifted_index_weight",
]
