"""Exception hierarchy shared by all modules."""


class PwTrainsError(Exception):
    """Base class for every error raised by this package."""


class DomainError(PwTrainsError, ValueError):
    """Evaluation point outside [0, +inf) or not finite."""


class ParameterError(PwTrainsError, ValueError):
    """An argument violates a documented precondition."""


class UnsupportedOperationError(PwTrainsError, TypeError):
    """The operation is not closed-form for the given inputs."""


class TailBoundError(PwTrainsError):
    """A required analytic tail bound is missing or not summable."""


class QuadratureError(PwTrainsError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class KnotBudgetError(PwTrainsError):
    """Polygonal refinement needed more knots than allowed."""

    def __init__(self, message, best_error=None):
        super().__init__(message)
        self.best_error = best_error


class CertificateError(PwTrainsError):
    """A constructed approximant failed its own a-posteriori check."""
