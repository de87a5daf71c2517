"""Exception hierarchy."""


class ChebsysError(Exception):
    """Base class for all package errors."""


class DomainError(ChebsysError, ValueError):
    """A point, parameter or interval lies outside what the object allows."""


class SmoothnessError(ChebsysError, ValueError):
    """A derivative was requested beyond the declared smoothness."""


class SingularSystemError(ChebsysError, ArithmeticError):
    """A linear system that must be uniquely solvable is numerically singular.

    In this package that is a mathematical negative: the function system is not
    unisolvent for the given knots/data (not a T/ET/DT system there).
    """

    def __init__(self, message, ratio=None):
        super().__init__(message)
        self.ratio = ratio


class MomentError(ChebsysError, ValueError):
    """Moments are not those of a positive measure with enough support."""


class ConfigError(ChebsysError, ValueError):
    """Malformed CLI configuration."""
