"""Pixelized-sphere simulation."""

from critfield.sphere.export import (
    read_field_binary,
    write_adjacency_csv,
    write_field_binary,
    write_field_csv,
)
from critfield.sphere.extrema import count_extrema, count_extrema_above
from critfield.sphere.fields import (
    PairCorrelation,
    evaluate_harmonics,
    evaluate_network,
    network_correlation_check,
    simulate_network_field,
    synthesize_gaussian_field,
)
from critfield.sphere.frames import empirical_frame_covariances, tangent_frame
from critfield.sphere.grids import build_grid

__all__ = [
    "read_field_binary",
    "write_adjacency_csv",
    "write_field_binary",
    "write_field_csv",
    "count_extrema",
    "count_extrema_above",
    "PairCorrelation",
    "evaluate_harmonics",
    "evaluate_network",
    "network_correlation_check",
    "simulate_network_field",
    "synthesize_gaussian_field",
    "empirical_frame_covariances",
    "tangent_frame",
    "build_grid",
]
