"""Exception hierarchy for critfield.

Callers can catch :class:`CritFieldError` for anything raised on purpose by the
package. The CLI maps :class:`ArgumentError` (and subclasses) to exit code 2
and every other :class:`CritFieldError` to exit code 3.
"""


class CritFieldError(Exception):
    """Base class for all errors raised by critfield."""


class ArgumentError(CritFieldError, ValueError):
    """An argument violates the precondition of an operation."""


class ConfigError(ArgumentError):
    """An experiment configuration is invalid."""


class ParameterError(ArgumentError):
    """A model parameter lies outside its admissible domain."""


class NumericalError(CritFieldError, ArithmeticError):
    """A numerical routine failed (eigensolver, overflow, ...)."""


class ConvergenceError(NumericalError):
    """A quadrature, series or limit did not converge to the requested tolerance."""


class DegeneracyError(NumericalError):
    """The nondegeneracy condition gamma_L < (d+2)/2 does not hold."""


class UnsupportedKernelError(CritFieldError):
    """The kernel lies outside the scope of the Kac-Rice predictions."""


class RegimeError(CritFieldError):
    """An operation was requested for the wrong disorder regime."""
