"""Exception hierarchy shared across the package.

ConfigurationError covers bad pairings, parameters, and CLI keys (exit
code 2 in the CLI); NumericError and its subclasses cover runtime
numerical failures (exit code 3).
"""


class SymproxError(Exception):
    """Base class for all package errors."""


class ConfigurationError(SymproxError):
    """Unsupported kernel pairing, invalid parameter, or bad config key."""


class NumericError(SymproxError):
    """Numerical failure at runtime."""


class DomainError(NumericError):
    """Argument outside the domain of the requested operation."""


class ConditioningError(NumericError):
    """Matrix too close to singular for the requested operation."""

    def __init__(self, message, smallest_eigenvalue=None):
        super().__init__(message)
        self.smallest_eigenvalue = smallest_eigenvalue


class BracketingError(NumericError):
    """Root solver called with an invalid sign bracket."""


class InvalidInputError(NumericError):
    """Malformed input value (non-finite entries, dimension mismatch)."""
