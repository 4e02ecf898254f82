"""Exception types shared across the package."""

from __future__ import annotations


class CayleyMengerError(Exception):
    """Base class for every error raised by this package."""


class MissingVariable(CayleyMengerError, KeyError):
    def __init__(self, var):
        super().__init__(var)
        self.var = var

    def __str__(self):
        return f"no value supplied for variable {self.var}"


class NotDivisible(CayleyMengerError, ArithmeticError):
    """Raised when an exact polynomial quotient does not exist.

    ``remainder`` holds the partially reduced dividend at the point where
    division got stuck; it is a nonzero witness of the failure.
    """

    def __init__(self, message, remainder=None):
        super().__init__(message)
        self.remainder = remainder


class TargetTooSmall(CayleyMengerError, ValueError):
    pass


class ParseError(CayleyMengerError, ValueError):
    pass


class InvalidDimension(CayleyMengerError, ValueError):
    pass


class CapExceeded(CayleyMengerError, ValueError):
    pass


class TooFewPoints(CayleyMengerError, ValueError):
    pass


class DegenerateSimplex(CayleyMengerError, ArithmeticError):
    pass


class NonPositiveTau(CayleyMengerError, ValueError):
    pass


class InvalidDistance(CayleyMengerError, ValueError):
    pass
