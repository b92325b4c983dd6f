"""Exception hierarchy shared by every tidykit module."""

from __future__ import annotations


class TidyKitError(Exception):
    """Base class for all library errors."""


class NotAGroup(TidyKitError):
    """A multiplication table violates a group axiom.

    ``triple`` carries the offending indices (a pair for Latin-square,
    identity and inverse failures, a triple for associativity).
    """

    def __init__(self, message: str, triple: tuple[int, ...] | None = None):
        super().__init__(message)
        self.triple = triple


class ClosureTooLarge(TidyKitError):
    pass


class InvalidPermutation(TidyKitError):
    pass


class GroupMismatch(TidyKitError):
    """Element sets from two different groups were combined."""


class EmptySet(TidyKitError):
    pass


class NotNormal(TidyKitError):
    pass


class NotSubgroup(TidyKitError):
    pass


class NotAnAutomorphism(TidyKitError):
    pass


class NotAnAction(TidyKitError):
    pass


class OrderBoundExceeded(TidyKitError):
    pass


class BadParameter(TidyKitError):
    pass


class BadPrime(BadParameter):
    pass


class SamePrime(BadParameter):
    pass


class NotSolvable(TidyKitError):
    pass


class NotFound(TidyKitError):
    """A search that must succeed for solvable inputs came back empty."""


class IndexOutOfRange(TidyKitError, IndexError):
    pass


class NotAPGroup(TidyKitError):
    pass


class NotPqGroup(TidyKitError):
    pass


class PreconditionError(TidyKitError):
    pass


class NoMatch(TidyKitError):
    """No clause of a classification statement matched.

    On a group meeting the preconditions this means the classification
    itself is wrong, so callers should let it propagate.
    """


class UnknownSuite(TidyKitError):
    pass


class UnknownFamily(BadParameter):
    pass
