"""Outward-rounded interval arithmetic over binary64.

All arithmetic is computed with round-to-nearest and then widened outward
by a pluggable strategy, so the library never relies on switching the
hardware rounding mode:

* ``pred-succ`` steps each endpoint to its neighbouring float.  One step
  covers the half-ulp round-to-nearest error with a half-ulp to spare.
* ``multiplicative`` scales an endpoint beta to beta*(1 -+ eps) with
  1 -+ eps exactly representable, adding +-eta once the magnitude falls
  into the subnormal range where relative scaling stops moving.

Square root, exp, sin and cos are strategy-independent: libm sqrt is
correctly rounded (one-ulp widening suffices) and the other three get a
fixed two-ulp widening per side on top of endpoint evaluation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from gmpy2 import mpq

from .errors import (
    DivisorContainsZero,
    InvalidFloat,
    NegativeDomain,
    UnboundedArgument,
)
from .floatbits import MAX_FINITE, decompose, next_down, next_up

_INF = math.inf
_MIN_NORMAL = 2.2250738585072014e-308

DEFAULT_EPS = 2.0**-52
DEFAULT_ETA = 2.0**-1073

PRED_SUCC = "pred-succ"
MULTIPLICATIVE = "multiplicative"
UNWIDENED = "unwidened-test"

# Below-pi / above-pi double pair used for quadrant reduction.
PI_LO = math.pi
PI_HI = next_up(math.pi)
_HALF_PI_LO = PI_LO / 2.0
_TWO_PI_LO = 2.0 * PI_LO
_PI_LO_Q = decompose(PI_LO)
_PI_HI_Q = decompose(PI_HI)


@dataclass(frozen=True, slots=True)
class Strategy:
    """Outward widening strategy. Use the factory classmethods."""

    kind: str
    eps: float = 0.0
    eta: float = 0.0

    @classmethod
    def pred_succ(cls) -> "Strategy":
        """Widen every endpoint to its predecessor/successor float."""
        return cls(PRED_SUCC)

    @classmethod
    def multiplicative(
        cls, eps: float = DEFAULT_EPS, eta: float = DEFAULT_ETA
    ) -> "Strategy":
        """Relative widening by eps with additive floor eta near zero."""
        if not (0.0 < eps < 1.0) or math.isnan(eps):
            raise InvalidFloat(f"eps must be in (0, 1), got {eps!r}")
        if not (0.0 < eta < _INF):
            raise InvalidFloat(f"eta must be positive and finite, got {eta!r}")
        # 1 -+ eps must be exact or the scaling itself would round.
        if decompose(1.0 - eps) != 1 - decompose(eps):
            raise InvalidFloat(f"1 - eps is not exactly representable for eps={eps!r}")
        if decompose(1.0 + eps) != 1 + decompose(eps):
            raise InvalidFloat(f"1 + eps is not exactly representable for eps={eps!r}")
        return cls(MULTIPLICATIVE, eps, eta)

    @classmethod
    def unwidened(cls) -> "Strategy":
        """No widening at all. Intentionally unsound; exists so harness
        mutation checks can prove the verification pipeline reacts."""
        return cls(UNWIDENED)

    @property
    def name(self) -> str:
        return self.kind


def _make_mult_rounders(eps: float, eta: float):
    one_minus = 1.0 - eps
    one_plus = 1.0 + eps

    def down(v: float) -> float:
        if v == _INF:
            return MAX_FINITE
        if v == -_INF:
            return -_INF
        if v > 0.0:
            w = v * one_minus
        elif v < 0.0:
            w = v * one_plus
        else:
            return -eta
        if -_MIN_NORMAL < v < _MIN_NORMAL:
            w -= eta
        return w

    def up(v: float) -> float:
        if v == _INF:
            return _INF
        if v == -_INF:
            return -MAX_FINITE
        if v > 0.0:
            w = v * one_plus
        elif v < 0.0:
            w = v * one_minus
        else:
            return eta
        if -_MIN_NORMAL < v < _MIN_NORMAL:
            w += eta
        return w

    return down, up


def _unwidened_down(v: float) -> float:
    return MAX_FINITE if v == _INF else v


def _unwidened_up(v: float) -> float:
    return -MAX_FINITE if v == -_INF else v


_MULT_CACHE: dict[tuple[float, float], tuple[Callable, Callable]] = {}


def rounders(s: Strategy) -> tuple[Callable[[float], float], Callable[[float], float]]:
    """(round_down, round_up) endpoint functions for a strategy."""
    if s.kind == PRED_SUCC:
        return next_down, next_up
    if s.kind == MULTIPLICATIVE:
        key = (s.eps, s.eta)
        pair = _MULT_CACHE.get(key)
        if pair is None:
            pair = _MULT_CACHE[key] = _make_mult_rounders(s.eps, s.eta)
        return pair
    if s.kind == UNWIDENED:
        return _unwidened_down, _unwidened_up
    raise InvalidFloat(f"unknown strategy kind {s.kind!r}")


def round_down(beta: float, s: Strategy) -> float:
    """Widen a round-to-nearest lower endpoint downward."""
    return rounders(s)[0](beta)


def round_up(beta: float, s: Strategy) -> float:
    """Widen a round-to-nearest upper endpoint upward."""
    return rounders(s)[1](beta)


@dataclass(frozen=True, slots=True)
class Interval:
    """Closed interval [lo, hi] of doubles; NaN-free, never empty,
    lo < +inf and hi > -inf. Negative zeros are canonicalised."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        lo, hi = self.lo, self.hi
        if lo == 0.0:
            object.__setattr__(self, "lo", 0.0)
        if hi == 0.0:
            object.__setattr__(self, "hi", 0.0)
        if not lo <= hi:
            raise InvalidFloat(f"bad interval endpoints [{lo!r}, {hi!r}]")
        if lo == _INF or hi == -_INF:
            raise InvalidFloat(f"interval collapsed to infinity [{lo!r}, {hi!r}]")

    def __contains__(self, x: float) -> bool:
        return self.lo <= x <= self.hi


def make_point(x: float) -> Interval:
    """Degenerate interval [x, x] for a finite x."""
    if math.isnan(x) or math.isinf(x):
        raise InvalidFloat(f"make_point needs a finite value, got {x!r}")
    return Interval(x, x)


def add(a: Interval, b: Interval, s: Strategy) -> Interval:
    """Endpoint sums, widened outward unconditionally (even when exact)."""
    down, up = rounders(s)
    return Interval(down(a.lo + b.lo), up(a.hi + b.hi))


def sub(a: Interval, b: Interval, s: Strategy) -> Interval:
    down, up = rounders(s)
    return Interval(down(a.lo - b.hi), up(a.hi - b.lo))


def neg(a: Interval, s: Strategy) -> Interval:
    down, up = rounders(s)
    return Interval(down(-a.hi), up(-a.lo))


def mul(a: Interval, b: Interval, s: Strategy) -> Interval:
    """Min/max over the four endpoint products, widened outward.

    A 0 * inf product (NaN) is replaced by 0: the zero endpoint makes the
    exact product 0 for every finite selection, and the unbounded side is
    already covered by the other candidates.
    """
    down, up = rounders(s)
    p1 = a.lo * b.lo
    p2 = a.lo * b.hi
    p3 = a.hi * b.lo
    p4 = a.hi * b.hi
    if p1 != p1:
        p1 = 0.0
    if p2 != p2:
        p2 = 0.0
    if p3 != p3:
        p3 = 0.0
    if p4 != p4:
        p4 = 0.0
    return Interval(down(min(p1, p2, p3, p4)), up(max(p1, p2, p3, p4)))


def div(a: Interval, b: Interval, s: Strategy) -> Interval:
    """Quotient over a divisor interval that excludes zero.

    An inf/inf quotient (NaN) is replaced by 0; the finite/inf -> 0 and
    inf/finite -> inf candidates that bracket it are always present.
    """
    if not (b.lo > 0.0 or b.hi < 0.0):
        raise DivisorContainsZero(f"divisor {b} contains zero")
    down, up = rounders(s)
    q1 = a.lo / b.lo
    q2 = a.lo / b.hi
    q3 = a.hi / b.lo
    q4 = a.hi / b.hi
    if q1 != q1:
        q1 = 0.0
    if q2 != q2:
        q2 = 0.0
    if q3 != q3:
        q3 = 0.0
    if q4 != q4:
        q4 = 0.0
    return Interval(down(min(q1, q2, q3, q4)), up(max(q1, q2, q3, q4)))


# Strategy-independent transcendental cores on raw endpoints. The public
# wrappers below return Interval; the benchmark fast path calls these
# directly.

def sqrt_core(lo: float, hi: float) -> tuple[float, float]:
    if lo < 0.0:
        raise NegativeDomain(f"sqrt of interval reaching {lo!r}")
    return next_down(math.sqrt(lo)), next_up(math.sqrt(hi))


def exp_core(lo: float, hi: float) -> tuple[float, float]:
    try:
        el = math.exp(lo)
    except OverflowError:
        el = MAX_FINITE
    try:
        eh = math.exp(hi)
    except OverflowError:
        eh = _INF
    rl = next_down(next_down(el))
    if rl < 0.0:
        rl = 0.0
    return rl, next_up(next_up(eh))


def _quadrant_index(x: float) -> int | None:
    """floor(x / (pi/2)) when it is certain, else None.

    The float fast path is accepted only when the quotient is farther from
    the bracketing integers than the combined division / pi-pair error
    (< |q| * 2**-51), with a factor-8 margin.
    """
    q = x / _HALF_PI_LO
    f = math.floor(q)
    tol = abs(q) * 2.0**-48 + 2.0**-300
    if q - f > tol and (f + 1.0) - q > tol:
        return int(f)
    t = 2 * decompose(x)
    qa = t / _PI_HI_Q
    qb = t / _PI_LO_Q
    fa = qa // 1
    fb = qb // 1
    if fa == fb:
        return int(fa)
    return None


def _has_residue(n_excl: int, n_incl: int, r: int) -> bool:
    """True when some m in (n_excl, n_incl] has m % 4 == r."""
    if n_incl - n_excl >= 4:
        return True
    first = n_excl + 1 + ((r - (n_excl + 1)) % 4)
    return first <= n_incl


def _trig_core(
    lo: float, hi: float, fn: Callable[[float], float], top_r: int, bot_r: int
) -> tuple[float, float]:
    if math.isinf(lo) or math.isinf(hi):
        raise UnboundedArgument(f"periodic function over [{lo!r}, {hi!r}]")
    if hi - lo >= _TWO_PI_LO:
        return -1.0, 1.0
    nlo = _quadrant_index(lo)
    if nlo is None:
        return -1.0, 1.0
    nhi = _quadrant_index(hi)
    if nhi is None:
        return -1.0, 1.0
    vlo = fn(lo)
    vhi = fn(hi)
    rl = vlo if vlo <= vhi else vhi
    rh = vhi if vlo <= vhi else vlo
    rl = next_down(next_down(rl))
    rh = next_up(next_up(rh))
    if rl < -1.0:
        rl = -1.0
    if rh > 1.0:
        rh = 1.0
    # Quadrant boundaries m*pi/2 crossed inside (lo, hi] force the extremes.
    if _has_residue(nlo, nhi, top_r):
        rh = 1.0
    if _has_residue(nlo, nhi, bot_r):
        rl = -1.0
    return rl, rh


def sin_core(lo: float, hi: float) -> tuple[float, float]:
    return _trig_core(lo, hi, math.sin, 1, 3)


def cos_core(lo: float, hi: float) -> tuple[float, float]:
    return _trig_core(lo, hi, math.cos, 0, 2)


def sqrt_i(a: Interval) -> Interval:
    """Interval square root; one-ulp widening on top of correctly rounded sqrt."""
    return Interval(*sqrt_core(a.lo, a.hi))


def exp_i(a: Interval) -> Interval:
    """Interval exp; two-ulp widening per side, lower endpoint floored at 0,
    overflow saturates to +inf."""
    return Interval(*exp_core(a.lo, a.hi))


def sin_i(a: Interval) -> Interval:
    """Interval sine via quadrant analysis against the below/above-pi pair;
    falls back to [-1, 1] whenever a quadrant is ambiguous or the interval
    spans a period."""
    return Interval(*sin_core(a.lo, a.hi))


def cos_i(a: Interval) -> Interval:
    """Interval cosine; see sin_i."""
    return Interval(*cos_core(a.lo, a.hi))
