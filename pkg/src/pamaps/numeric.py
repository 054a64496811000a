"""Exact rational helpers.

All coordinates and slopes are :class:`fractions.Fraction`.  A dyadic
number is a fraction whose reduced denominator is a power of two.
"""

from fractions import Fraction
from numbers import Rational as _RationalABC

Rational = Fraction

__all__ = [
    "Rational",
    "Q",
    "is_dyadic",
    "log2_exact",
    "dyadic_exponent",
    "format_rational",
    "parse_rational",
    "floor_log2",
    "pow2",
]


def Q(value):
    """Coerce ints, strings and fractions into a :class:`Fraction`.

    Floats are refused so that no binary rounding leaks into a
    computation by accident.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, (int, _RationalABC)):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise TypeError(f"cannot convert {type(value).__name__} to an exact rational")


def is_dyadic(a) -> bool:
    d = Q(a).denominator
    return d & (d - 1) == 0


def dyadic_exponent(a) -> int:
    """Smallest k with ``a * 2**k`` an integer; raises if ``a`` is not dyadic."""
    d = Q(a).denominator
    if d & (d - 1):
        raise ValueError(f"{a} is not dyadic")
    return d.bit_length() - 1


def log2_exact(a):
    """Return ``k`` when ``a == 2**k`` exactly, otherwise ``None``."""
    a = Q(a)
    if a <= 0:
        raise ValueError("log2_exact needs a positive argument")
    n, d = a.numerator, a.denominator
    if n & (n - 1) or d & (d - 1):
        return None
    return (n.bit_length() - 1) - (d.bit_length() - 1)


def floor_log2(a) -> int:
    """Largest integer k with ``2**k <= a`` for positive rational ``a``."""
    a = Q(a)
    if a <= 0:
        raise ValueError("floor_log2 needs a positive argument")
    k = a.numerator.bit_length() - a.denominator.bit_length()
    if pow2(k) > a:
        k -= 1
    elif pow2(k + 1) <= a:
        k += 1
    return k


def pow2(k: int) -> Fraction:
    return Fraction(1 << k) if k >= 0 else Fraction(1, 1 << -k)


def format_rational(a) -> str:
    a = Q(a)
    if a.denominator == 1:
        return str(a.numerator)
    return f"{a.numerator}/{a.denominator}"


def parse_rational(text: str) -> Fraction:
    """Parse ``p``, ``p/q`` or ``p/2^k``.  Whitespace around tokens is ignored."""
    s = text.strip()
    if not s:
        raise ValueError("empty rational")
    if "/" in s:
        num, den = s.split("/", 1)
        num, den = num.strip(), den.strip()
        if den.startswith("2^"):
            exp = int(den[2:])
            if exp < 0:
                raise ValueError(f"negative exponent in {text!r}")
            q = 1 << exp
        else:
            q = int(den)
        if q == 0:
            raise ZeroDivisionError(f"zero denominator in {text!r}")
        return Fraction(int(num), q)
    return Fraction(int(s))
