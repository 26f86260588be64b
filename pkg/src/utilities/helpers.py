"""
Helper functions shared across the SQCLP engine.
"""

import os
import sys
from fractions import Fraction
from typing import Union


def get_resource_path(relative_path: str) -> str:
    """Get absolute path to a bundled resource, works for dev and for frozen builds

    Args:
        relative_path: Path relative to the ``src`` package directory

    Returns:
        str: Absolute path to the resource
    """
    base_path = getattr(sys, '_MEIPASS', None)
    if base_path is None:
        base_path = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    else:
        base_path = os.path.join(base_path, 'src')
    return os.path.join(base_path, relative_path)


def to_fraction(value: Union[int, str, float, Fraction]) -> Fraction:
    """Exact rational from a literal.

    Floats go through their shortest repr so that ``0.1`` becomes ``1/10``.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(value)


def _decimal_digits(denominator: int) -> int:
    """Number of decimal digits needed for 1/denominator, or -1 if it repeats."""
    twos = fives = 0
    while denominator % 2 == 0:
        denominator //= 2
        twos += 1
    while denominator % 5 == 0:
        denominator //= 5
        fives += 1
    if denominator != 1:
        return -1
    return max(twos, fives)


def format_rational(value: Fraction) -> str:
    """Canonical text of an exact rational.

    Integers print bare (``3``), finite decimals print as decimals (``0.75``)
    and everything else as a fraction (``1/3``).
    """
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    digits = _decimal_digits(value.denominator)
    if digits < 0:
        return f"{value.numerator}/{value.denominator}"
    scaled = abs(value.numerator) * 10 ** digits // value.denominator
    sign = "-" if value < 0 else ""
    whole, frac = divmod(scaled, 10 ** digits)
    return f"{sign}{whole}.{str(frac).rjust(digits, '0')}"
