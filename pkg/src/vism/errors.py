"""Exception hierarchy shared by every vism module."""

from __future__ import annotations


class VismError(Exception):
    """Base class for all library errors."""


class NonConvergence(VismError):
    """An iterative procedure hit its refinement or sweep limit."""

    def __init__(self, message, entry=None):
        super().__init__(message)
        self.entry = entry


# eigen solver wording; same failure class
NoConvergence = NonConvergence


class IndexOutOfRange(VismError, IndexError):
    pass


class OutOfDomain(VismError, ValueError):
    pass


class UnsupportedExponent(VismError, ValueError):
    pass


class NotSymmetric(VismError, ValueError):
    pass


class NotBlockDiagonal(VismError, ValueError):
    pass


class BracketInvalid(VismError, ValueError):
    pass


class ReferenceRequired(VismError, ValueError):
    pass


class ReferenceUnavailable(VismError, LookupError):
    pass


class InsufficientAnchors(VismError, ValueError):
    pass


class NonMonotoneAnchors(VismError, ValueError):
    pass


class DivisionByZero(VismError, ZeroDivisionError):
    pass


class ZeroReference(VismError, ZeroDivisionError):
    pass


class UnsupportedOrder(VismError, ValueError):
    pass


class PotentialSyntaxError(VismError, ValueError):
    pass
