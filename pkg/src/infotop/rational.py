"""Exact scalars: parsing and rendering of rationals in [0, 1]."""
from __future__ import annotations

from fractions import Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


def scalar(value) -> Fraction:
    """Coerce to an exact rational.

    Strings may be ``"p/q"`` or decimals (``"0.95"`` becomes ``19/20``
    exactly).  Floats go through their shortest repr so ``0.1`` means 1/10.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot convert {type(value).__name__} to a rational")


def unit_scalar(value) -> Fraction:
    x = scalar(value)
    if not ZERO <= x <= ONE:
        raise ValueError(f"{x} is outside [0, 1]")
    return x


def render(x: Fraction) -> str:
    """Exact textual form: ``"3/4"``, ``"0"``, ``"1"``."""
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def decimal(x, digits: int = 12) -> str:
    """Fixed decimal rendering with ``digits`` significant digits."""
    return format(float(x), f".{digits}g")
