"""Small helpers for exact rationals and their "p/q" string form."""

from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence


def to_fraction(value) -> Fraction:
    """Coerce ints, Fractions and "p/q" strings to a Fraction.

    Floats are accepted only when they are finite; they are converted exactly.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if not text:
            raise ValueError("empty rational string")
        return Fraction(text)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite value {value!r}")
        return Fraction(value)
    raise TypeError(f"cannot interpret {value!r} as a rational")


def fraction_str(q: Fraction) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def parse_vector(text: str) -> tuple[Fraction, ...]:
    """Parse "1/5,2/5" into a tuple of Fractions."""
    parts = [p for p in text.replace(" ", "").split(",") if p]
    if not parts:
        raise ValueError(f"empty vector {text!r}")
    return tuple(to_fraction(p) for p in parts)


def lcm_all(values: Iterable[int]) -> int:
    return reduce(lambda a, b: a * b // math.gcd(a, b), values, 1)


def common_denominator(points: Iterable[Sequence[Fraction]]) -> int:
    return lcm_all(Fraction(c).denominator for p in points for c in p)


def frac_mod1(q: Fraction) -> Fraction:
    return q - (q.numerator // q.denominator)


def max_norm(v: Sequence) -> object:
    return max(abs(x) for x in v) if len(v) else 0
