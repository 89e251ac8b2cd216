"""Exception hierarchy shared by all nblfit modules."""


class NblfitError(Exception):
    """Base class for every error raised by this package."""


class DomainError(NblfitError, ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class NonConvergence(NblfitError, RuntimeError):
    """An iterative procedure exhausted its budget before reaching its target."""


class Overflow(NblfitError, OverflowError):
    """A result exceeds the representable floating-point range."""


class NumericalInstability(NblfitError, RuntimeError):
    """An intermediate quantity violates a sign/size sanity bound."""


class NoRoot(NblfitError, RuntimeError):
    """A bracketed root-finder found no sign change (data incompatible with model)."""


class DegenerateData(NblfitError, ValueError):
    """The sample carries no information for the requested estimator."""


class SingularHessian(NblfitError, RuntimeError):
    """The numerical Hessian is not positive definite; no standard errors."""


class SeverityMassAtZero(NblfitError, ValueError):
    """A severity distribution places probability mass at zero."""


class UnnormalizedSeverity(NblfitError, ValueError):
    """A severity distribution does not sum/integrate to one."""


class MeshTooCoarse(NblfitError, RuntimeError):
    """Mesh refinement did not stabilise the continuous compound solution."""


class InsufficientCells(NblfitError, ValueError):
    """Too few cells remain after pooling to run the chi-square test."""


class OutOfRange(NblfitError, ValueError):
    """A query point lies outside the computed grid."""


class ParseError(NblfitError, ValueError):
    """A dataset file could not be parsed."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
