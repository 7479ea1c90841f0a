"""Exception types shared across the package."""


class TransmcError(Exception):
    """Base class for all package errors."""


class NotInTube(TransmcError):
    """Point lies outside the validity tube of the oblique projections."""


class TangentField(TransmcError):
    """Projection field is numerically tangent to the interface."""


class NoConvergence(TransmcError):
    """An iterative geometric solve exceeded its iteration budget."""


class NotPositiveDefinite(TransmcError):
    """A coefficient matrix failed a positive-definiteness check."""


class UnstableConfig(TransmcError):
    """A numerical run produced non-finite values or an unsolvable system."""


class InsufficientResolution(TransmcError):
    """All convergence-study errors are noise dominated."""

    def __init__(self, message, rows=None):
        super().__init__(message)
        self.rows = rows if rows is not None else []


class ConfigError(TransmcError):
    """Experiment configuration failed validation."""
