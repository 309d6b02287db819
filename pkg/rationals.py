# rationals.py

from fractions import Fraction
from numbers import Rational
from typing import Any, Iterable, Sequence, Tuple

import sympy as sp

from errors import ValidationError
from settings import get_csv_digits

Vector = Tuple[Fraction, ...]


def to_fraction(value: Any) -> Fraction:
    """Parse an int, Fraction, sympy rational or "p/q" string exactly."""
    if isinstance(value, bool):
        raise ValidationError(f"Expected a rational, got boolean {value!r}", subject=value)
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, sp.Basic):
        if not value.is_Rational:
            raise ValidationError(f"Expected a rational, got {value}", subject=value)
        return Fraction(int(value.p), int(value.q))
    if isinstance(value, Rational):
        return Fraction(value.numerator, value.denominator)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise ValidationError(f"Cannot parse rational {value!r}: {str(e)}", subject=value)
    # Floats are rejected: every input must be exact
    raise ValidationError(f"Expected a rational as int or 'p/q' string, got {value!r}", subject=value)


def to_vector(values: Iterable[Any]) -> Vector:
    return tuple(to_fraction(v) for v in values)


def to_int_vector(values: Iterable[Any]) -> Tuple[int, ...]:
    result = []
    for v in values:
        q = to_fraction(v)
        if q.denominator != 1:
            raise ValidationError(f"Expected an integer, got {q}", subject=v)
        result.append(int(q))
    return tuple(result)


def fraction_to_str(value: Fraction) -> str:
    """Lowest terms with positive denominator; integers print without '/1'."""
    return str(Fraction(value))


def vector_to_str(values: Sequence[Fraction]) -> list:
    return [fraction_to_str(v) for v in values]


def decimal_approx(value: Any, digits: int = None) -> str:
    """Approximate decimal rendering for plot columns only."""
    digits = digits or get_csv_digits()
    if isinstance(value, sp.Basic):
        return f"{float(value.evalf(digits + 5)):.{digits}g}"
    return f"{float(value):.{digits}g}"


def to_sympy(value: Fraction) -> sp.Rational:
    value = Fraction(value)
    return sp.Rational(value.numerator, value.denominator)


def from_sympy(value: Any) -> Fraction:
    value = sp.sympify(value)
    if not value.is_Rational:
        raise ValidationError(f"Value {value} is not rational")
    return Fraction(int(value.p), int(value.q))


def dot(a: Sequence[Fraction], x: Sequence[Any]) -> Fraction:
    return sum((ai * xi for ai, xi in zip(a, x)), Fraction(0))
