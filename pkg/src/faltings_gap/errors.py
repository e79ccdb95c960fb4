"""Exception hierarchy.

Every error raised by the package derives from :class:`FaltingsGapError`.
The three intermediate classes decide the CLI exit code: usage problems (1),
numerical failures (2) and violated mathematical preconditions (3).
"""


class FaltingsGapError(Exception):
    """Base class for all package errors."""


class UsageError(FaltingsGapError):
    """Malformed user input (bad polynomial text, unknown lemma, bad flag)."""


class NumericError(FaltingsGapError):
    """A numerical procedure could not deliver the requested accuracy."""


class PreconditionError(FaltingsGapError, ValueError):
    """An input violates a mathematical hypothesis of the operation."""


# -- usage ------------------------------------------------------------------

class ParseError(UsageError):
    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class NonIntegerCoefficient(ParseError):
    pass


class ZeroPolynomial(ParseError):
    pass


class UnknownLemma(UsageError):
    pass


# -- numerics ---------------------------------------------------------------

class PrecisionExhausted(NumericError):
    pass


class NoConvergence(NumericError):
    pass


class InsufficientPrecision(NumericError):
    pass


class NotUnimodal(NumericError):
    pass


# -- preconditions ----------------------------------------------------------

class UnsupportedArgument(PreconditionError):
    pass


class OutOfRange(PreconditionError):
    pass


class NegativeInput(PreconditionError):
    pass


class DomainTooLow(PreconditionError):
    pass


class NotSquarefree(PreconditionError):
    pass


class Reducible(PreconditionError):
    pass


class NotPrime(PreconditionError):
    pass


class BadCongruence(PreconditionError):
    pass
