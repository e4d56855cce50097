"""Exception hierarchy shared by all modules."""


class ApxnumError(Exception):
    """Base class for library errors."""


class DomainError(ApxnumError, ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class PreconditionError(ApxnumError, ValueError):
    """Input violates a documented precondition (e.g. nonzero low coefficients)."""


class DegenerateInputError(ApxnumError, ValueError):
    pass


class NumericalError(ApxnumError, ArithmeticError):
    """A numerical procedure failed its own consistency check.

    ``estimates`` carries the disagreeing values when there are any.
    """

    def __init__(self, message, estimates=None):
        super().__init__(message)
        self.estimates = estimates


class ConsistencyError(ApxnumError, AssertionError):
    """An internal identity that should hold by construction did not."""


class ConfigurationError(ApxnumError, ValueError):
    pass


class InsufficientDataError(ApxnumError, ValueError):
    pass


class BoundViolation(ApxnumError, AssertionError):
    """A proved inequality failed numerically; this indicts the implementation."""
