"""Shared exception and warning types."""


class DomainError(ValueError):
    """Input outside the documented domain of an operation."""


class UnsupportedError(ValueError):
    """Requested a variant/order combination that is deliberately not provided."""


class NotFoundError(RuntimeError):
    """A bracketing or search operation found nothing."""


class AccuracyError(RuntimeError):
    """A quadrature or refinement failed to meet its tolerance.

    The best available estimate is attached as ``best``.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class RegimeWarning(UserWarning):
    """An asymptotic formula was evaluated outside its intended regime."""


class NearPoleWarning(UserWarning):
    """Evaluation close to an analytically cancelling pole pair."""
