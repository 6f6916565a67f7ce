"""Exception types shared across the package."""


class RelfixError(Exception):
    """Base class for all package errors."""


class ShapeError(RelfixError):
    """Mismatched point kinds, grids, or array shapes."""


class DomainError(RelfixError):
    """Argument outside the mathematical domain of an operation."""


class SamplingError(RelfixError):
    """A sampling request was malformed or produced no points."""


class PreconditionError(RelfixError):
    """A documented precondition was violated by the caller."""


class EstimationError(RelfixError):
    """Contraction estimation could not be carried out."""


class ConfigError(RelfixError):
    """A run configuration is missing or has an invalid field."""


class DivergenceError(RelfixError):
    """Picard iteration left the finite range.

    The partially recorded orbit, when available, is attached as ``trace``.
    """

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class ContractionWarning(UserWarning):
    """Iteration attempted although the contraction bound is not below 1."""
