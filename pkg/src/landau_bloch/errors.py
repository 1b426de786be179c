"""Exception hierarchy.

The CLI maps the three top-level families onto exit codes:
configuration/input problems -> 1, numerical failures -> 2,
failed verification inequalities -> 3.
"""


class LandauBlochError(Exception):
    """Base class for all package errors."""

    exit_code = 2


class ConfigError(LandauBlochError, ValueError):
    exit_code = 1


class GeometryError(ConfigError):
    """Degenerate or otherwise unusable lattice input."""


class PotentialFormatError(ConfigError):
    """Malformed coefficient file or Hermitian-inconsistent coefficients."""


class OffLatticeError(ConfigError):
    """A vector that should lie on 2*pi*Lambda^* does not."""


class NumericalError(LandauBlochError):
    exit_code = 2


class QuadratureError(NumericalError):
    """Quadrature did not reach the requested tolerance.

    Attributes
    ----------
    estimate : float
        Last Richardson error estimate.
    """

    def __init__(self, message, estimate):
        super().__init__(message)
        self.estimate = estimate


class TruncationError(NumericalError):
    """Basis or matrix truncation too small for the requested accuracy."""


class InadmissibleShellError(NumericalError):
    """Shell index m fails the admissibility inequality for the given delta."""


class VerificationError(LandauBlochError):
    exit_code = 3
