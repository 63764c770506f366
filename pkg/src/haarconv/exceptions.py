"""Exception types raised across the package."""


class HaarconvError(Exception):
    """Base class for all package errors."""


class DomainError(HaarconvError, ValueError):
    """Operands live on different groups, spaces or carriers."""


class UnsupportedError(HaarconvError, ValueError):
    """Input is outside the sizes or parameter ranges this implementation handles."""


class InvarianceError(HaarconvError, ValueError):
    """A measure fails a required invariance precondition.

    The measured deviation is kept on ``deviation``.
    """

    def __init__(self, message, deviation=float("nan")):
        super().__init__(f"{message} (deviation={deviation:.3e})")
        self.deviation = deviation


class StructureError(HaarconvError, ValueError):
    """A family does not have the algebraic structure of a convolution semigroup."""


class PreconditionError(InvarianceError):
    """A checked precondition on a family failed."""
