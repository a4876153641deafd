"""Parsing and canonical formatting of exact rationals ("p/q" strings)."""

from __future__ import annotations

from fractions import Fraction


def parse_rational(value: str | int | Fraction) -> Fraction:
    """Parse an exact rational from a "p/q" or "k" string, or an integer.

    Decimal strings such as "1.25" are accepted (they are exact).  Python
    floats are rejected: a binary float has already lost exactness by the
    time it reaches us.
    """
    if isinstance(value, bool):
        raise ValueError(f"not a rational: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        raise ValueError("floating point input rejected; pass a 'p/q' string")
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational: {value!r}") from exc
    raise ValueError(f"not a rational: {value!r}")


def format_rational(value: Fraction) -> str:
    """Canonical lowest-terms string: "p/q", or plain "k" for integers."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"
