"""Exception types shared across the package."""


class GdzError(Exception):
    """Base class for all package errors."""


class ValidationError(GdzError):
    """A matrix pair or graph object violates a structural requirement."""


class SingularMatrixError(GdzError):
    """A matrix required to be invertible is singular to working precision."""

    def __init__(self, message, cond_estimate=None):
        super().__init__(message)
        self.cond_estimate = cond_estimate


class StripError(GdzError):
    """An evaluation point lies outside the validity strip of a representation."""


class QuadratureError(GdzError):
    """A quadrature failed to converge to the requested tolerance."""


class RootFindingError(GdzError):
    """Root search in an interval could not be verified against the winding count."""


class ConfigError(GdzError):
    """A configuration file is malformed or inconsistent."""
