"""Exception types shared across the package."""


class CcboError(Exception):
    """Base class for all package errors."""


class DomainError(CcboError, ValueError):
    """An input violates a documented precondition or bound."""


class FittingError(CcboError, RuntimeError):
    """Model fitting failed (e.g. singular covariance after jitter escalation)."""


class NumericError(CcboError, RuntimeError):
    """A numerical routine failed beyond recoverable jitter repair."""


class StateError(CcboError, RuntimeError):
    """An operation is not valid in the current campaign/game state."""


class UnknownFixtureError(CcboError, KeyError):
    """Requested bundled dataset does not exist."""
