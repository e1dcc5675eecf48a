"""Bit-level successor, predecessor and exact decomposition."""

import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from intervalis import InvalidFloat, decompose, decompose_bits, next_down, next_up
from intervalis.errors import NonFiniteDecompose
from intervalis.floatbits import MAX_FINITE, MIN_SUBNORMAL, bits64, float_from_bits, ulp

finite = st.floats(allow_nan=False, allow_infinity=False)


def test_next_up_examples():
    assert next_up(1.0) == 1.0 + 2.0**-52
    assert next_up(0.0) == 5e-324
    assert next_up(-0.0) == 5e-324
    assert next_up(-5e-324) == 0.0
    assert next_up(MAX_FINITE) == math.inf
    assert next_up(math.inf) == math.inf
    assert next_up(-math.inf) == -MAX_FINITE


def test_next_down_examples():
    assert next_down(1.0) == 1.0 - 2.0**-53
    assert next_down(0.0) == -5e-324
    assert next_down(-0.0) == -5e-324
    assert next_down(5e-324) == 0.0
    assert next_down(math.inf) == MAX_FINITE
    assert next_down(-math.inf) == -math.inf
    assert next_down(-MAX_FINITE) == -math.inf


def test_nan_rejected():
    with pytest.raises(InvalidFloat):
        next_up(math.nan)
    with pytest.raises(InvalidFloat):
        next_down(math.nan)
    with pytest.raises(InvalidFloat):
        decompose(math.nan)


def test_decompose_examples():
    assert decompose(1.5) == Fraction(3, 2)
    assert decompose(-0.0) == 0
    assert decompose(0.0) == 0
    assert decompose(0.1) == Fraction(3602879701896397, 2**55)
    assert decompose(-2.5) == Fraction(-5, 2)
    assert decompose(MIN_SUBNORMAL) == Fraction(1, 2**1074)


def test_decompose_nonfinite():
    for bad in (math.inf, -math.inf):
        with pytest.raises(NonFiniteDecompose):
            decompose(bad)
    # NonFiniteDecompose is an InvalidFloat, so callers can catch either.
    assert issubclass(NonFiniteDecompose, InvalidFloat)


def test_bits_roundtrip_constants():
    assert float_from_bits(bits64(math.pi)) == math.pi
    assert bits64(0.0) == 0
    assert float_from_bits(1) == MIN_SUBNORMAL


@given(finite)
def test_next_up_is_adjacent(x):
    # C99 nextafter already steps from either zero straight to the first
    # subnormal, matching the collapsed-zero kernel semantics.
    y = next_up(x)
    assert y > x
    assert y == math.nextafter(x, math.inf)


@given(finite)
def test_next_down_is_adjacent(x):
    y = next_down(x)
    assert y < x
    assert y == math.nextafter(x, -math.inf)


@given(finite)
def test_successor_predecessor_inverse(x):
    up = next_up(x)
    if math.isfinite(up):
        assert next_down(up) == x or (x == 0.0 and next_down(up) == 0.0)
    down = next_down(x)
    if math.isfinite(down):
        assert next_up(down) == x or (x == 0.0 and next_up(down) == 0.0)


@given(finite)
def test_decompose_is_exact(x):
    # Fraction(float) is CPython's own exact conversion.
    assert decompose(x) == Fraction(x)


@given(finite)
def test_decompose_bits_reconstructs(x):
    d = decompose_bits(x)
    assert d.sign in (-1, 1)
    assert 0 <= d.mantissa < 2**53
    assert Fraction(d.sign) * d.mantissa * Fraction(2) ** d.exponent == Fraction(x)


@given(st.floats(allow_nan=False, allow_infinity=False, min_value=-1e300, max_value=1e300))
def test_ulp_matches_math_ulp(x):
    assert ulp(x) == math.ulp(x)


def test_ordering_over_sample():
    xs = [-math.inf, -1e300, -1.0, -5e-324, 0.0, 5e-324, 2.0**-1022, 1.0, MAX_FINITE]
    ups = [next_up(x) for x in xs]
    assert all(a < b for a, b in zip(xs, ups[:-1] + [math.inf]))
    assert ups == sorted(ups)
