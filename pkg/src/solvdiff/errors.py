"""Exception hierarchy shared by every module.

Two roots matter to the CLI: ``DomainError`` (exit status 1) and
``NonConvergence`` (exit status 2).
"""


class SolvDiffError(Exception):
    """Base class for all package errors."""


class DomainError(SolvDiffError, ValueError):
    """An argument lies outside the set where the operation is defined."""


class InvalidParameter(DomainError):
    pass


class Pole(DomainError):
    pass


class OutOfDomain(DomainError):
    pass


class NoSpectrum(DomainError):
    pass


class Unsupported(DomainError):
    pass


class InvalidCoefficients(DomainError):
    pass


class NonPositiveH(DomainError):
    pass


class HypothesisViolated(DomainError):
    pass


class BaseMismatch(DomainError):
    pass


class DegenerateDerivative(DomainError):
    pass


class InvalidR(DomainError):
    pass


class TooFewSamples(DomainError):
    pass


class ParseError(DomainError):
    pass


class NonConvergence(SolvDiffError, ArithmeticError):
    """An iterative or series computation exhausted its budget."""


class InconclusiveIntegrability(NonConvergence):
    pass


class NumericBlowup(NonConvergence):
    pass


class TruncationWarning(UserWarning):
    """A truncated expansion's last retained term is not negligible."""
