"""Exception hierarchy shared by every trendlab module."""


class TrendlabError(Exception):
    """Base class for all trendlab errors."""

    #: Short machine-readable tag used in CLI error JSON.
    kind = "error"


class ConstraintViolation(TrendlabError, ValueError):
    """Model parameters violate one of the admissibility constraints."""

    kind = "constraint_violation"

    def __init__(self, constraint, message=None):
        self.constraint = constraint
        super().__init__(message or constraint)


class DomainError(TrendlabError, ValueError):
    kind = "domain_error"


class RegimeMismatch(TrendlabError):
    """An operation was requested outside the regime where it is defined."""

    kind = "regime_mismatch"


class DegenerateSpectrum(TrendlabError, ArithmeticError):
    kind = "degenerate_spectrum"


class QuadratureFailure(TrendlabError, ArithmeticError):
    kind = "quadrature_failure"


class ResourceLimit(TrendlabError):
    """A requested computation exceeds a configured size cap."""

    kind = "resource_limit"
