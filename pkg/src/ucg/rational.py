"""Exact scalar conversion and formatting.

Every number in the toolkit is a :class:`fractions.Fraction`. Floats are
rejected on purpose: a verdict computed from a rounded input is not a verdict.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Union

from .errors import InputError

RationalLike = Union[int, Fraction, str]


def to_rational(value: RationalLike, field: str = "value") -> Fraction:
    """Convert ``value`` to a Fraction.

    Accepts ints, Fractions and strings of the form ``"p"`` or ``"p/q"``.
    ``field`` names the offending input in error messages.
    """
    if isinstance(value, bool):
        raise InputError(f"{field}: booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if not text:
            raise InputError(f"{field}: empty rational")
        num, sep, den = text.partition("/")
        try:
            p = int(num)
            q = int(den) if sep else 1
        except ValueError:
            raise InputError(f"{field}: cannot parse rational {value!r}") from None
        if q == 0:
            raise InputError(f"{field}: zero denominator in {value!r}")
        return Fraction(p, q)
    raise InputError(f"{field}: expected int or 'p/q' string, got {type(value).__name__}")


def to_vector(values: Iterable[RationalLike], field: str = "vector") -> tuple[Fraction, ...]:
    return tuple(to_rational(v, f"{field}[{k}]") for k, v in enumerate(values))


def fmt(q: Fraction | int) -> str:
    """Canonical text form: ``"3"`` or ``"-1/2"``."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def fmt_vector(values: Iterable[Fraction | int]) -> str:
    return ", ".join(fmt(v) for v in values)
