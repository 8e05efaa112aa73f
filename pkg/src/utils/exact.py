"""
Exact rational comparisons used by every pass/fail decision.
"""
from fractions import Fraction
from typing import Union

Number = Union[int, Fraction]


def le_plus_sqrt(x: Number, a: Number, c: Number, r: Number) -> bool:
    """Decide ``x <= a + c * sqrt(r)`` exactly, for ``c >= 0`` and ``r >= 0``."""
    x, a, c, r = Fraction(x), Fraction(a), Fraction(c), Fraction(r)
    if c < 0 or r < 0:
        raise ValueError("c and r must be non-negative")
    gap = x - a
    if gap <= 0:
        return True
    return gap * gap <= c * c * r


def lt_plus_sqrt(x: Number, a: Number, c: Number, r: Number) -> bool:
    """Decide ``x < a + c * sqrt(r)`` exactly, for ``c >= 0`` and ``r >= 0``."""
    x, a, c, r = Fraction(x), Fraction(a), Fraction(c), Fraction(r)
    if c < 0 or r < 0:
        raise ValueError("c and r must be non-negative")
    gap = x - a
    if gap < 0:
        return True
    return gap * gap < c * c * r


def floor_plus_sqrt(a: Number, c: Number, r: Number) -> int:
    """The largest integer n with n <= a + c * sqrt(r)."""
    a, c, r = Fraction(a), Fraction(c), Fraction(r)
    if c < 0 or r < 0:
        raise ValueError("c and r must be non-negative")
    square = c * c * r
    n = a.numerator // a.denominator + floor_root(square.numerator, square.denominator, 2)
    while le_plus_sqrt(n + 1, a, c, r):
        n += 1
    while not le_plus_sqrt(n, a, c, r):
        n -= 1
    return n


def abs_le_sqrt(x: Number, c_squared: Number, r: Number) -> bool:
    """Decide ``|x| <= sqrt(c_squared * r)`` exactly."""
    x = Fraction(x)
    return x * x <= Fraction(c_squared) * Fraction(r)


def floor_root(num: int, den: int, r: int) -> int:
    """Largest integer s >= 0 with s**r <= num / den."""
    if num < 0 or den <= 0 or r < 1:
        raise ValueError("floor_root needs num >= 0, den > 0, r >= 1")
    guess = int((num / den) ** (1.0 / r)) if num else 0
    s = max(guess - 2, 0)
    while (s + 1) ** r * den <= num:
        s += 1
    while s > 0 and s**r * den > num:
        s -= 1
    return s


def ceil_fraction(value: Number) -> int:
    value = Fraction(value)
    return -((-value.numerator) // value.denominator)


def as_ratio(lhs: Number, rhs: Number) -> Fraction:
    """lhs / rhs as an exact ratio; zero denominators give 0 when lhs is 0."""
    rhs = Fraction(rhs)
    if rhs == 0:
        return Fraction(0) if Fraction(lhs) == 0 else Fraction(-1)
    return Fraction(lhs) / rhs
