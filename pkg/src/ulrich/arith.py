"""Exact rationals and the falling-factorial binomial used by every formula."""

from __future__ import annotations

from fractions import Fraction
from math import factorial

Rational = Fraction


def as_rational(x) -> Fraction:
    """Coerce ints, Fractions and "p/q" strings to a reduced Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, (int, str)):
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def gen_binomial(x, m: int) -> Fraction:
    """Return x(x-1)...(x-m+1)/m! for rational x and integer m >= 0."""
    if m < 0:
        raise ValueError(f"m must be nonnegative, got {m}")
    x = as_rational(x)
    num = Fraction(1)
    for i in range(m):
        num *= x - i
    return num / factorial(m)


def rational_to_json(x) -> str:
    # str(Fraction) already drops a unit denominator and puts the sign up top
    return str(as_rational(x))


def rational_from_json(s: str) -> Fraction:
    if not isinstance(s, str):
        raise TypeError(f"rationals are serialized as strings, got {s!r}")
    return Fraction(s)
