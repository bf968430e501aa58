"""Core modules for critfield."""

from critfield.core.errors import (
    ArgumentError,
    ConfigError,
    ConvergenceError,
    CritFieldError,
    DegeneracyError,
    NumericalError,
    ParameterError,
    RegimeError,
    UnsupportedKernelError,
)
from critfield.core.models import (
    CRI,
    Activation,
    ActivationKind,
    AngularSpectrum,
    CRIKind,
    CritCountPrediction,
    DepthSpectralParams,
    ExtremaCount,
    FieldSample,
    GOIEstimate,
    GOIParams,
    GridScheme,
    IndexSelector,
    Kernel,
    NetworkConfig,
    Regime,
    RegimeTag,
    SphereGrid,
)
from critfield.core.parallel import ParallelSampler, set_default_workers

__all__ = [
    "ArgumentError",
    "ConfigError",
    "ConvergenceError",
    "CritFieldError",
    "DegeneracyError",
    "NumericalError",
    "ParameterError",
    "RegimeError",
    "UnsupportedKernelError",
    "CRI",
    "Activation",
    "ActivationKind",
    "AngularSpectrum",
    "CRIKind",
    "CritCountPrediction",
    "DepthSpectralParams",
    "ExtremaCount",
    "FieldSample",
    "GOIEstimate",
    "GOIParams",
    "GridScheme",
    "IndexSelector",
    "Kernel",
    "NetworkConfig",
    "Regime",
    "RegimeTag",
    "SphereGrid",
    "ParallelSampler",
    "set_default_workers",
]
