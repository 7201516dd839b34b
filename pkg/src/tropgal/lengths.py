"""Exact edge lengths: positive rationals plus a single absorbing infinity."""

from __future__ import annotations

import functools
import re
from fractions import Fraction
from typing import Union


@functools.total_ordering
class _Infinity:
    """The length of an infinite leaf edge.

    Absorbs addition with finite lengths and multiplication by positive
    integers. Compares greater than every rational.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "inf"

    def __reduce__(self):
        return (_Infinity, ())

    def __hash__(self):
        return hash("tropgal-infinity")

    def __eq__(self, other):
        return other is self

    def __lt__(self, other):
        return False

    def __gt__(self, other):
        return other is not self

    def __add__(self, other):
        if isinstance(other, (int, Fraction, _Infinity)):
            return self
        return NotImplemented

    __radd__ = __add__

    def __mul__(self, other):
        if isinstance(other, _Infinity):
            return self
        if isinstance(other, (int, Fraction)):
            if other <= 0:
                raise ValueError("infinity may only be scaled by a positive number")
            return self
        return NotImplemented

    __rmul__ = __mul__


INF = _Infinity()

Length = Union[Fraction, _Infinity]

_RATIONAL = re.compile(r"^[+-]?\d+(/\d+)?$")


def is_infinite(value) -> bool:
    return value is INF


def as_length(value) -> Length:
    """Coerce ints, Fractions, rational strings and ``"inf"`` to a Length.

    Floats are rejected: every quantity in the package is exact.
    """
    if value is INF:
        return INF
    if isinstance(value, bool):
        raise TypeError("booleans are not lengths")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return parse_length(value)
    raise TypeError(f"cannot use {value!r} as an exact length")


def parse_length(text: str) -> Length:
    token = text.strip()
    if token.lower() in ("inf", "infinity", "oo"):
        return INF
    if not _RATIONAL.match(token):
        raise ValueError(f"not an exact rational: {text!r}")
    try:
        return Fraction(token)
    except ZeroDivisionError:
        raise ValueError(f"zero denominator: {text!r}") from None


def format_length(value: Length) -> str:
    if value is INF:
        return "inf"
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def total_length(values) -> Length:
    total: Length = Fraction(0)
    for v in values:
        total = total + v if total is not INF else INF
    return total
