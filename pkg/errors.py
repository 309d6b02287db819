# errors.py

from typing import Any, Optional


class OkounkovLabError(Exception):
    """Base exception for okounkov-lab errors."""
    exit_code = 1

    def __init__(self, message: str, subject: Optional[Any] = None):
        super().__init__(message)
        self.subject = subject


class ValidationError(OkounkovLabError):
    """Input that does not parse or does not match a schema."""
    exit_code = 2


class PreconditionError(OkounkovLabError):
    """Well-formed input violating a mathematical precondition."""
    exit_code = 3


class DimensionMismatchError(ValidationError):
    pass


class InvalidParameterError(ValidationError):
    pass


class FiltrationTableError(ValidationError):
    pass


class UnboundedPolytopeError(PreconditionError):
    pass


class DegeneratePolytopeError(PreconditionError):
    pass


class EmptyGradingError(PreconditionError):
    pass


class ZeroSectionError(PreconditionError):
    pass


class DegreeOutOfRangeError(PreconditionError):
    pass


class NegativeRoofError(PreconditionError):
    pass


class NormalConeDatumError(PreconditionError):
    pass


class ParameterRangeError(PreconditionError):
    pass


class NonIntegralPolytopeError(PreconditionError):
    pass
