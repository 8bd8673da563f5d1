"""Exact radical scalar arithmetic."""

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from omegadec.scalars import ONE, ScaledScalar, integer_root


@given(st.integers(min_value=0, max_value=10**24), st.integers(min_value=1, max_value=7))
@settings(deadline=None)
def test_integer_root_bracket(x, k):
    r, exact = integer_root(x, k)
    assert r**k <= x < (r + 1) ** k
    assert exact == (r**k == x)


def test_integer_root_huge():
    x = 7**50
    r, exact = integer_root(x, 5)
    assert exact and r == 7**10


def test_normalization_reduces_perfect_powers():
    assert ScaledScalar(Fraction(225, 64), 2) == ScaledScalar(Fraction(15, 8))
    assert ScaledScalar(16, 4) == ScaledScalar(2)
    s = ScaledScalar(4, 4)
    assert (s.num, s.den, s.k) == (2, 1, 2)
    s = ScaledScalar(8, 2)  # sqrt 8 is not a perfect power: stays as is
    assert (s.num, s.den, s.k) == (8, 1, 2)


def test_multiplication_and_folding():
    sqrt_15_8 = ScaledScalar(Fraction(15, 8), 2)
    assert (sqrt_15_8 * sqrt_15_8) == ScaledScalar(Fraction(15, 8))
    fourth = ScaledScalar(2, 4)
    assert fourth * fourth == ScaledScalar(2, 2)
    assert ScaledScalar(2, 2) * ScaledScalar(2, 2) == ScaledScalar(2)
    assert fourth * ScaledScalar(Fraction(1, 2), 4) == ONE


def test_powers_and_roots():
    s = ScaledScalar(Fraction(1, 2), 3)
    assert s**3 == ScaledScalar(Fraction(1, 2))
    assert s**0 == ONE
    assert (s**-3) == ScaledScalar(2)
    assert ScaledScalar(5).root(2) ** 2 == ScaledScalar(5)


def test_ratio_to():
    assert ScaledScalar(8, 2).ratio_to(ScaledScalar(2, 2)) == Fraction(2)
    assert ScaledScalar(2, 2).ratio_to(ScaledScalar(3, 2)) is None
    assert ScaledScalar(2, 2).ratio_to(ScaledScalar(2, 4)) is None


def test_float_value():
    assert math.isclose(float(ScaledScalar(Fraction(15, 8), 2)), math.sqrt(15 / 8))
    assert math.isclose(float(ScaledScalar(2, 4)), 2 ** 0.25)


def test_rejects_nonpositive_and_bad_root():
    with pytest.raises(ValueError):
        ScaledScalar(0)
    with pytest.raises(ValueError):
        ScaledScalar(Fraction(-1, 2))
    with pytest.raises(ValueError):
        ScaledScalar(2, 0)


def test_as_fraction():
    assert ScaledScalar(Fraction(9, 4), 2).as_fraction() == Fraction(3, 2)
    with pytest.raises(ValueError):
        ScaledScalar(2, 2).as_fraction()


@given(st.fractions(min_value=Fraction(1, 50), max_value=50),
       st.fractions(min_value=Fraction(1, 50), max_value=50),
       st.integers(min_value=1, max_value=4), st.integers(min_value=1, max_value=4))
@settings(deadline=None, max_examples=60)
def test_product_value_consistency(r1, r2, k1, k2):
    a, b = ScaledScalar(r1, k1), ScaledScalar(r2, k2)
    assert math.isclose(float(a * b), float(a) * float(b), rel_tol=1e-12)
    assert a * b == b * a


def test_serialization_round_trip():
    s = ScaledScalar(Fraction(15, 8), 2)
    assert ScaledScalar.from_obj(s.to_obj()) == s
