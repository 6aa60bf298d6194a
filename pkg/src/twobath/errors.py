"""Exception and warning types.

Every error raised on purpose by the package derives from :class:`TwoBathError`.
Input problems derive from :class:`InvalidParameter` (CLI exit code 2); numerical
breakdowns derive from :class:`NumericalError` (CLI exit code 3).
"""


class TwoBathError(Exception):
    """Base class for all package errors."""


class InvalidParameter(TwoBathError, ValueError):
    """A parameter or configuration value is outside its documented domain."""


class UnstableSystem(InvalidParameter):
    """The coupled potential is not bounded below (|kappa| >= m omega0^2)."""


class NumericalError(TwoBathError, ArithmeticError):
    """A computation could not be completed to the required accuracy."""


class DegenerateSpectrum(NumericalError):
    """The characteristic matrix has (nearly) coincident eigenvalues."""


class SingularNormalization(NumericalError):
    """The closed-form eigenvector normalization divides by (nearly) zero."""


class ImaginaryResidue(NumericalError):
    """A quantity that must be real carries a significant imaginary part."""


class UnpairedSpectrum(NumericalError):
    """Eigenvalues of -sigma G sigma G failed to come in degenerate pairs."""


class NonPositive(NumericalError):
    """Eigenvalues of -sigma G sigma G are not positive reals."""


class NonPhysical(NumericalError):
    """A symplectic eigenvalue is below 1: the matrix is not a quantum state."""


class NotHurwitz(NumericalError):
    """The drift matrix has an eigenvalue with non-negative real part."""


class StepSizeUnderflow(NumericalError):
    """The integrator would need a step below the minimum allowed size."""


class ClosedFormMismatch(NumericalError):
    """Printed steady-state moments disagree with the Lyapunov solution."""

    def __init__(self, message, mismatches=None):
        super().__init__(message)
        self.mismatches = dict(mismatches or {})


class RegimeWarning(UserWarning):
    """Parameters are outside the validity range of the chosen master equation."""
