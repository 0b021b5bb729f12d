"""Exception hierarchy shared by every zml module."""


class ZmlError(Exception):
    """Base class for all library errors."""


class DomainError(ZmlError, ValueError):
    """An argument lies outside the operation's mathematical domain."""


class SpecError(DomainError):
    """A moment specification violates the admissibility constraints."""


class TableTooSmallError(DomainError):
    """A prime table does not reach the requested bound."""


class ResourceError(ZmlError):
    """A request exceeds a configured memory or work cap."""


class AccuracyError(ZmlError):
    """The requested evaluation lies outside the accuracy budget."""


class ConvergenceError(ZmlError):
    """Refinement stopped before reaching the tolerance.

    The best available estimate is kept on ``best``.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class InvariantViolation(ZmlError, AssertionError):
    """An internal invariant failed; always a bug."""
