"""Bit-level IEEE 754 binary64 kernel.

Successor/predecessor walk the total order of finite doubles with both
zeros collapsed to a single point, saturating at the infinities.  Exact
decomposition turns any finite double into the rational it denotes.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass

from gmpy2 import mpq

from .errors import InvalidFloat, NonFiniteDecompose

Rational = mpq

MIN_SUBNORMAL = 5e-324
MAX_FINITE = 1.7976931348623157e308
_INF = math.inf


def bits64(x: float) -> int:
    """Raw bit pattern of a double as an unsigned 64-bit integer."""
    return struct.unpack("<Q", struct.pack("<d", x))[0]


def float_from_bits(u: int) -> float:
    """Inverse of bits64."""
    return struct.unpack("<d", struct.pack("<Q", u))[0]


def next_up(x: float) -> float:
    """Smallest double strictly greater than x; +inf maps to itself.

    Both zeros are one point: next_up(0.0) == next_up(-0.0) == 5e-324 and
    next_up(-5e-324) == 0.0.
    """
    if math.isnan(x):
        raise InvalidFloat("next_up of NaN")
    if x == _INF:
        return _INF
    if x == 0.0:
        return MIN_SUBNORMAL
    y = math.nextafter(x, _INF)
    # nextafter(-5e-324, inf) is -0.0; keep zeros canonical.
    return y + 0.0 if y == 0.0 else y


def next_down(x: float) -> float:
    """Largest double strictly less than x; -inf maps to itself."""
    if math.isnan(x):
        raise InvalidFloat("next_down of NaN")
    if x == -_INF:
        return -_INF
    if x == 0.0:
        return -MIN_SUBNORMAL
    y = math.nextafter(x, -_INF)
    return y + 0.0 if y == 0.0 else y


@dataclass(frozen=True, slots=True)
class FloatDecomposition:
    """Sign/mantissa/exponent triple with value sign * mantissa * 2**exponent.

    mantissa is the full integer significand (<= 2**53 - 1); it is zero only
    for the two zeros, which both decompose with sign +1.
    """

    sign: int
    mantissa: int
    exponent: int

    def __post_init__(self) -> None:
        if self.sign not in (-1, 1):
            raise InvalidFloat(f"sign must be +-1, got {self.sign}")
        if not 0 <= self.mantissa < 1 << 53:
            raise InvalidFloat(f"mantissa out of range: {self.mantissa}")


def decompose_bits(x: float) -> FloatDecomposition:
    """Exact sign/mantissa/exponent of a finite double."""
    if math.isnan(x) or math.isinf(x):
        raise NonFiniteDecompose(f"cannot decompose {x!r}")
    u = bits64(x)
    raw_exp = (u >> 52) & 0x7FF
    frac = u & ((1 << 52) - 1)
    if raw_exp == 0:
        mantissa, exponent = frac, -1074
    else:
        mantissa, exponent = frac | (1 << 52), raw_exp - 1075
    sign = -1 if (u >> 63) and mantissa else 1
    return FloatDecomposition(sign, mantissa, exponent)


def decompose(x: float) -> Rational:
    """Exact rational value of a finite double (e.g. 0.1 -> 3602879701896397/2**55)."""
    d = decompose_bits(x)
    n = d.sign * d.mantissa
    if d.exponent >= 0:
        return mpq(n << d.exponent)
    return mpq(n, 1 << -d.exponent)


def ulp(x: float) -> float:
    """Spacing between |x| and the next larger double (math.ulp semantics)."""
    return math.ulp(x)
