from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pamaps.numeric import (
    Q, dyadic_exponent, floor_log2, format_rational, is_dyadic, log2_exact,
    parse_rational, pow2,
)

from conftest import dyadics, rationals


def test_is_dyadic_examples():
    assert is_dyadic(Fraction(3, 8))
    assert not is_dyadic(Fraction(1, 3))
    assert is_dyadic(0)


def test_log2_exact_examples():
    assert log2_exact(Fraction(4)) == 2
    assert log2_exact(Fraction(1, 8)) == -3
    assert log2_exact(Fraction(3, 2)) is None


def test_log2_exact_rejects_non_positive():
    with pytest.raises(ValueError):
        log2_exact(Fraction(0))


def test_canonical_text():
    assert format_rational(Fraction(6, 4)) == "3/2"
    assert format_rational(Fraction(5)) == "5"
    assert parse_rational("3/2^3") == Fraction(3, 8)
    assert parse_rational(" -1/2 ") == Fraction(-1, 2)


@pytest.mark.parametrize("bad", ["", "1/0", "a/b", "1/2^-1"])
def test_parse_errors(bad):
    with pytest.raises((ValueError, ZeroDivisionError)):
        parse_rational(bad)


def test_pow2_and_exponents():
    assert pow2(-3) == Fraction(1, 8)
    assert pow2(4) == 16
    assert dyadic_exponent(Fraction(3, 8)) == 3
    assert floor_log2(Fraction(3)) == 1
    assert floor_log2(Fraction(1, 3)) == -2


@given(rationals(), rationals())
def test_field_round_trip(a, b):
    assert a + b == b + a
    if a != 0:
        assert a * (b / a) == b


@given(rationals())
def test_parse_print_identity(a):
    s = format_rational(a)
    assert format_rational(parse_rational(s)) == s
    assert parse_rational(s) == a


@given(dyadics(), dyadics(), st.integers(-6, 6))
def test_dyadic_closure(a, b, k):
    assert is_dyadic(a + b) and is_dyadic(a - b) and is_dyadic(a * b)
    assert is_dyadic(a * pow2(k))


def test_Q_accepts_strings_and_ints():
    assert Q("1/4") == Fraction(1, 4)
    assert Q(3) == 3
