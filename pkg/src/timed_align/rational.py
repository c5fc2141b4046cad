"""Exact time values.

Times are :class:`fractions.Fraction`; an unbounded latest firing time is the
float ``math.inf``, which compares correctly against fractions.
"""

from __future__ import annotations

import math
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from typing import Union

INF = math.inf

Time = Fraction
Bound = Union[Fraction, float]  # float only for INF


def to_time(value: object) -> Fraction:
    """Convert ints, fractions, ``"p/q"`` and decimal strings to a Fraction exactly."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not times")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"not a finite time: {value!r}")
        # floats given in code are almost always meant as their decimal repr
        return Fraction(Decimal(repr(value)))
    if isinstance(value, str):
        text = value.strip()
        if "/" in text:
            num, _, den = text.partition("/")
            try:
                return Fraction(int(num), int(den))
            except (ValueError, ZeroDivisionError) as exc:
                raise ValueError(f"bad rational {value!r}") from exc
        try:
            return Fraction(Decimal(text))
        except (InvalidOperation, ValueError) as exc:
            raise ValueError(f"bad rational {value!r}") from exc
    raise TypeError(f"cannot interpret {value!r} as a time")


def to_bound(value: object) -> Bound:
    """Like :func:`to_time` but also accepts ``inf``/``math.inf``."""
    if isinstance(value, float) and value == INF:
        return INF
    if isinstance(value, str) and value.strip().lower() in {"inf", "+inf", "infinity", "oo"}:
        return INF
    return to_time(value)


def format_time(value: Bound) -> str:
    """``p/q`` for non-integers, plain integer otherwise, ``inf`` for infinity."""
    if isinstance(value, float):
        if value == INF:
            return "inf"
        value = to_time(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def clamp(x: Fraction, lo: Fraction, hi: Bound) -> Fraction:
    """Median of ``lo``, ``x``, ``hi``: the point of ``[lo, hi]`` nearest to ``x``."""
    if lo > hi:
        raise ValueError(f"empty interval [{format_time(lo)}, {format_time(hi)}]")
    if x < lo:
        return lo
    if x > hi:
        return hi  # type: ignore[return-value]  # hi finite here
    return x
