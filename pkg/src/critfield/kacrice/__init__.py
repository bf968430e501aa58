"""Kac-Rice predictions for the expected number of critical points."""

from critfield.kacrice.asymptotics import (
    asymptotic_crit_count,
    bi_prefactor,
    constant_Ai,
    constant_Bi,
    constant_Di,
    limiting_eta,
)
from critfield.kacrice.predictions import (
    PredictionTable,
    check_degeneracy,
    expected_crit_count,
    expected_crit_count_above,
    kac_rice_prefactor,
    prediction_table,
    spectral_params,
    sphere_volume,
)

__all__ = [
    "asymptotic_crit_count",
    "bi_prefactor",
    "constant_Ai",
    "constant_Bi",
    "constant_Di",
    "limiting_eta",
    "PredictionTable",
    "check_degeneracy",
    "expected_crit_count",
    "expected_crit_count_above",
    "kac_rice_prefactor",
    "prediction_table",
    "spectral_params",
    "sphere_volume",
]
