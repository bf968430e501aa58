"""
critfield

Expected numbers of critical points of infinite-width random neural networks
on the sphere, and their verification by simulation on pixelized spheres.
"""

from critfield.core import (
    Activation,
    ActivationKind,
    AngularSpectrum,
    CritCountPrediction,
    CritFieldError,
    GOIEstimate,
    GOIParams,
    IndexSelector,
    Kernel,
    NetworkConfig,
    RegimeTag,
    SphereGrid,
)
from critfield.kacrice import (
    asymptotic_crit_count,
    expected_crit_count,
    expected_crit_count_above,
)
from critfield.kernel import angular_spectrum, build_kernel, classify_regime

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "Activation",
    "ActivationKind",
    "AngularSpectrum",
    "CritCountPrediction",
    "CritFieldError",
    "GOIEstimate",
    "GOIParams",
    "IndexSelector",
    "Kernel",
    "NetworkConfig",
    "RegimeTag",
    "SphereGrid",
    "asymptotic_crit_count",
    "expected_crit_count",
    "expected_crit_count_above",
    "angular_spectrum",
    "build_kernel",
    "classify_regime",
]
