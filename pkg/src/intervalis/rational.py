"""Exact rational oracle.

Every routine here returns mathematically rigorous enclosures computed in
arbitrary-precision rational arithmetic (GMP mpq), with transcendental
cores evaluated in scaled-integer fixed point under explicit error
accounting:

* pi comes from Machin's formula 16*arctan(1/5) - 4*arctan(1/239) with
  tight consecutive-partial-sum enclosures, which nest as the term count
  grows, so pi_enclosure is monotone in the precision parameter.
* exp halves the argument into [-1/2, 1/2], sums the Taylor series with an
  alternating/geometric tail bound, and squares back up.
* sin/cos reduce modulo 2*pi against the pi enclosure and sum the Taylor
  series at the reduced argument; results are intersected with [-1, 1].

enclose() evaluates a whole expression tree this way and intersects the
result across a halving chain of precisions (p, p/2, ..., 16), which makes
refinement nesting enclose(e, env, 2p) <= enclose(e, env, p) hold by
construction.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Mapping, Union

from gmpy2 import isqrt, mpq, mpz

from .errors import (
    DivisionByZero,
    DomainError,
    IntervalisError,
    InvalidExpression,
    NotExact,
    UnboundedInterval,
)
from .expr import (
    Binary,
    Const,
    DELTA_DIV,
    DELTA_SQRT,
    Expr,
    Unary,
    Var,
    X_EXP_MAX,
    to_text,
)
from .floatbits import decompose

Rational = mpq

RationalLike = Union[int, float, mpq]

# Supported argument ranges for the transcendental cores.
EXP_ARG_CAP = 1024
TRIG_ARG_CAP = 1 << 64
# Beyond this magnitude the pi-pair cannot pin down quadrants anyway, so
# interval trig falls back to [-1, 1]; matches the float library behaviour.
_TRIG_WIDE_CAP = 1 << 60

_CHAIN_BASE = 16


def as_rational(x: RationalLike) -> mpq:
    """Exact rational from int, mpq, Fraction, or (exactly) float."""
    if isinstance(x, float):
        if math.isnan(x) or math.isinf(x):
            raise UnboundedInterval(f"no rational value for {x!r}")
        return mpq(x)
    return mpq(x)


@dataclass(frozen=True, slots=True)
class RationalInterval:
    """Closed interval with exact rational endpoints."""

    lo: Rational
    hi: Rational

    def __post_init__(self) -> None:
        object.__setattr__(self, "lo", mpq(self.lo))
        object.__setattr__(self, "hi", mpq(self.hi))
        if self.lo > self.hi:
            raise IntervalisError(f"empty rational interval [{self.lo}, {self.hi}]")

    def __contains__(self, x: RationalLike) -> bool:
        v = as_rational(x)
        return self.lo <= v <= self.hi

    @property
    def width(self) -> Rational:
        return self.hi - self.lo


class Verdict(enum.Enum):
    CONTAINED = "contained"
    VIOLATED = "violated"
    UNDECIDED = "undecided"


def rat_arith(a: RationalLike, b: RationalLike, op: str) -> Rational:
    """Exact +, -, *, / on rationals; division by zero raises."""
    x, y = as_rational(a), as_rational(b)
    if op == "+":
        return x + y
    if op == "-":
        return x - y
    if op == "*":
        return x * y
    if op == "/":
        if y == 0:
            raise DivisionByZero("exact division by zero")
        return x / y
    raise InvalidExpression(f"unknown rational operator {op!r}")


def eval_exact(e: Expr, env: Mapping[str, RationalLike]) -> Rational:
    """Exact rational evaluation; transcendental nodes raise NotExact."""
    if isinstance(e, Var):
        try:
            return as_rational(env[e.name])
        except KeyError:
            raise InvalidExpression(f"unbound variable {e.name!r}") from None
    if isinstance(e, Const):
        return mpq(e.value)
    if isinstance(e, Unary):
        if e.op == "neg":
            return -eval_exact(e.arg, env)
        raise NotExact(f"{e.op} has no exact rational value")
    a = eval_exact(e.left, env)
    b = eval_exact(e.right, env)
    return rat_arith(a, b, e.op)


# ---------------------------------------------------------------------------
# pi

_PI_CACHE: dict[int, tuple[Rational, Rational]] = {}


def _arctan_recip(x: int, tol: Rational) -> tuple[Rational, Rational]:
    """Tight enclosure of arctan(1/x) from consecutive partial sums of the
    alternating series; enclosures nest as tol shrinks."""
    s = mpq(0)
    k = 0
    sign = 1
    xpow = x
    x2 = x * x
    while True:
        t = mpq(1, (2 * k + 1) * xpow)
        if t <= tol:
            nxt = s + t if sign > 0 else s - t
            return (s, nxt) if s <= nxt else (nxt, s)
        s = s + t if sign > 0 else s - t
        sign = -sign
        k += 1
        xpow *= x2


def _pi_pair(p: int) -> tuple[Rational, Rational]:
    pair = _PI_CACHE.get(p)
    if pair is None:
        a_lo, a_hi = _arctan_recip(5, mpq(1, 1 << (p + 7)))
        b_lo, b_hi = _arctan_recip(239, mpq(1, 1 << (p + 5)))
        pair = _PI_CACHE[p] = (16 * a_lo - 4 * b_hi, 16 * a_hi - 4 * b_lo)
    return pair


def pi_enclosure(p: int) -> RationalInterval:
    """Enclosure of pi with width <= 2**-p, monotone in p."""
    if p < 8:
        raise DomainError(f"pi_enclosure needs p >= 8, got {p}")
    return RationalInterval(*_pi_pair(p))


# ---------------------------------------------------------------------------
# Scaled-integer transcendental cores.  Values are integers at scale 2**W;
# every floor division contributes < 1 unit of error, tracked in explicit
# per-term counters and summed into a total bound.

def _floor_scaled(q: Rational, w: int) -> int:
    return int((q.numerator << w) // q.denominator)


def _ceil_scaled(q: Rational, w: int) -> int:
    return -int(((-q.numerator) << w) // q.denominator)


def _exp_raw(x: Rational, p: int) -> tuple[Rational, Rational]:
    """Rigorous enclosure of exp(x) for |x| <= 1024 at precision ~2**-p."""
    if x == 0:
        one = mpq(1)
        return one, one
    if x < 0:
        # exp(-x) = 1/exp(x) exactly; the positive branch keeps the value
        # above 1 where the squaring chain preserves relative precision.
        lo, hi = _exp_raw(-x, p)
        return 1 / hi, 1 / lo
    m = 0
    ax = x
    half = mpq(1, 2)
    while ax > half:
        ax /= 2
        m += 1
    y = x / (1 << m)
    w = p + 2 * m + 48
    scale = 1 << w
    yi = _floor_scaled(y, w)  # yhat = yi/2**w, 0 <= y - yhat < 2**-w
    ayi = -yi if yi < 0 else yi
    s = scale
    t = scale
    e = 0
    err = 0
    k = 0
    while True:
        k += 1
        d = k << w
        t = (t * yi) // d
        e = (e * ayi) // d + 2
        s += t
        err += e
        if k >= 2 and -4 <= t <= 4:
            # |yhat| <= 1/2 keeps the term ratio <= 1/2, so the omitted
            # tail is below twice the next term: under 8 units.
            err += 8
            break
    lo = mpq(s - err, scale)
    # exp(y) <= exp(yhat) * (1 + 2**(1-w)) covers the argument floor bias.
    hi = mpq(s + err, scale) * (1 + mpq(2, scale))
    if lo < 0:
        lo = mpq(0)
    if m:
        # Square on scaled integers, rounding outward each step; exact mpq
        # squaring would double the bit size every iteration.
        li = _floor_scaled(lo, w)
        hi_i = _ceil_scaled(hi, w)
        for _ in range(m):
            li = (li * li) >> w
            hi_i = -((-(hi_i * hi_i)) >> w)
        lo, hi = mpq(li, scale), mpq(hi_i, scale)
    return lo, hi


def _sin_series(a: int, w: int) -> tuple[int, int]:
    """(sum, error_bound) at scale 2**w for sin(a/2**w), |a/2**w| <= 3.3."""
    if a == 0:
        return 0, 0
    a2 = a * a
    shift = 2 * w
    t = a
    s = a
    e = 0
    err = 0
    j = 0
    while True:
        j += 1
        d = ((2 * j) * (2 * j + 1)) << shift
        t = -((t * a2) // d)
        e = ((e + 1) * a2) // d + 2
        s += t
        err += e
        if j >= 4 and -4 <= t <= 4:
            # Term ratio is below 11/72 from j = 4 on, so the omitted tail
            # stays under 8 units.
            err += 8
            return s, err


def _cos_series(a: int, w: int) -> tuple[int, int]:
    """(sum, error_bound) at scale 2**w for cos(a/2**w), |a/2**w| <= 3.3."""
    a2 = a * a
    shift = 2 * w
    t = 1 << w
    s = t
    e = 0
    err = 0
    j = 0
    while True:
        j += 1
        d = ((2 * j - 1) * (2 * j)) << shift
        t = -((t * a2) // d)
        e = ((e + 1) * a2) // d + 2
        s += t
        err += e
        if j >= 4 and -4 <= t <= 4:
            err += 8
            return s, err


def _trig_raw(kind: str, x: Rational, p: int) -> tuple[Rational, Rational]:
    """Rigorous enclosure of sin(x) or cos(x), |x| <= 2**64."""
    if x == 0:
        v = mpq(0) if kind == "sin" else mpq(1)
        return v, v
    bl = int(abs(x)).bit_length()
    pl, ph = _pi_pair(p + bl + 32)
    k = int((x / (2 * pl) + mpq(1, 2)) // 1)
    if k == 0:
        r_lo = r_hi = x
    elif k > 0:
        r_lo, r_hi = x - 2 * k * ph, x - 2 * k * pl
    else:
        r_lo, r_hi = x - 2 * k * pl, x - 2 * k * ph
    w = p + 48
    scale = 1 << w
    a = _floor_scaled(r_lo, w)
    b = _ceil_scaled(r_hi, w)
    if not -4 * scale < a < 4 * scale:
        raise IntervalisError("argument reduction failed")  # pragma: no cover
    s, err = _sin_series(a, w) if kind == "sin" else _cos_series(a, w)
    # |f(r) - f(ahat)| <= r_hi - r_lo because |f'| <= 1.
    pad = b - a
    lo = mpq(s - err - pad, scale)
    hi = mpq(s + err + pad, scale)
    if lo < -1:
        lo = mpq(-1)
    if hi > 1:
        hi = mpq(1)
    return lo, hi


def _chain(raw, p: int) -> tuple[Rational, Rational]:
    """Intersect raw(q) over the halving chain q = p, p/2, ..., base, making
    the (p, 2p) nesting property structural."""
    qs = [p]
    while qs[-1] > _CHAIN_BASE:
        qs.append(qs[-1] // 2)
    lo, hi = raw(qs[-1])
    for q in reversed(qs[:-1]):
        l2, h2 = raw(q)
        if l2 > lo:
            lo = l2
        if h2 < hi:
            hi = h2
    if lo > hi:
        raise IntervalisError("inconsistent oracle refinements")  # pragma: no cover
    return lo, hi


def exp_enclosure(x: RationalLike, p: int) -> RationalInterval:
    """Enclosure of exp(x) with width <= 2**-p * max(1, exp(x)); enclosures
    at 2p nest inside enclosures at p."""
    xq = as_rational(x)
    if abs(xq) > EXP_ARG_CAP:
        raise DomainError(f"exp argument out of range: |{float(xq)}| > {EXP_ARG_CAP}")
    return RationalInterval(*_chain(lambda q: _exp_raw(xq, q), p))


def trig_enclosure(kind: str, x: RationalLike, p: int) -> RationalInterval:
    """Enclosure of sin(x) or cos(x) within [-1, 1]; nests from p to 2p."""
    if kind not in ("sin", "cos"):
        raise InvalidExpression(f"unknown trig kind {kind!r}")
    xq = as_rational(x)
    if abs(xq) > TRIG_ARG_CAP:
        raise DomainError(
            f"trig argument out of range: |{float(xq)}| > 2**64"
        )
    return RationalInterval(*_chain(lambda q: _trig_raw(kind, xq, q), p))


def sqrt_decide(l: RationalLike, a: RationalLike) -> bool:
    """Is l <= sqrt(a)? Decided by sign analysis and exact squaring."""
    lq, aq = as_rational(l), as_rational(a)
    if aq < 0:
        raise DomainError("sqrt_decide needs a >= 0")
    return lq <= 0 or lq * lq <= aq


def _sqrt_lo(a: Rational, p: int) -> Rational:
    """Largest s/2**p with s = floor(sqrt(a * 4**p)); satisfies lo**2 <= a."""
    s = isqrt((a.numerator << (2 * p)) // a.denominator)
    return mpq(s, 1 << p)


def _sqrt_hi(a: Rational, p: int) -> Rational:
    s = isqrt((a.numerator << (2 * p)) // a.denominator)
    if s * s * a.denominator == a.numerator << (2 * p):
        return mpq(s, 1 << p)
    return mpq(s + 1, 1 << p)


# ---------------------------------------------------------------------------
# Whole-expression enclosures.

@dataclass(frozen=True, slots=True)
class _Limits:
    """Validity thresholds checked during an enclosure pass."""

    div_min: Rational
    sqrt_min: Rational
    exp_max: Rational


class _ValidityFail(Exception):
    pass


_VALIDITY_LIMITS = _Limits(mpq(DELTA_DIV), mpq(DELTA_SQRT), mpq(X_EXP_MAX))


def _floor_over_pi_half(x2: Rational, pl: Rational, ph: Rational) -> tuple[int, int]:
    """Bounds for floor(x2 / pi) given pi in [pl, ph]; x2 is twice the
    argument, so this is the quadrant index floor(x / (pi/2))."""
    f1 = int((x2 / ph) // 1)
    f2 = int((x2 / pl) // 1)
    return (f1, f2) if f1 <= f2 else (f2, f1)


def _has_residue(n_excl: int, n_incl: int, r: int) -> bool:
    if n_incl - n_excl >= 4:
        return True
    first = n_excl + 1 + ((r - (n_excl + 1)) % 4)
    return first <= n_incl


def _trig_over_interval(
    kind: str, al: Rational, ah: Rational, p: int
) -> tuple[Rational, Rational]:
    """Enclosure of sin or cos over an argument interval via exact quadrant
    analysis; ambiguous quadrant floors widen conservatively."""
    if max(abs(al), abs(ah)) > _TRIG_WIDE_CAP:
        return mpq(-1), mpq(1)
    if ah - al > mpq(63, 10):  # wider than 2*pi: the range is exactly [-1, 1]
        return mpq(-1), mpq(1)
    bl = max(int(abs(al)).bit_length(), int(abs(ah)).bit_length())
    pl, ph = _pi_pair(p + bl + 32)
    n_lo = min(*_floor_over_pi_half(2 * al, pl, ph))
    n_hi = max(*_floor_over_pi_half(2 * ah, pl, ph))
    l1, h1 = _trig_raw(kind, al, p)
    l2, h2 = _trig_raw(kind, ah, p)
    lo = l1 if l1 <= l2 else l2
    hi = h1 if h1 >= h2 else h2
    top_r, bot_r = (1, 3) if kind == "sin" else (0, 2)
    if _has_residue(n_lo, n_hi, top_r):
        hi = mpq(1)
    if _has_residue(n_lo, n_hi, bot_r):
        lo = mpq(-1)
    return lo, hi


def _raw_enclose(
    e: Expr, env: Mapping[str, Rational], p: int, limits: _Limits | None
) -> tuple[Rational, Rational]:
    if isinstance(e, Var):
        try:
            v = env[e.name]
        except KeyError:
            raise InvalidExpression(f"unbound variable {e.name!r}") from None
        return v, v
    if isinstance(e, Const):
        q = mpq(e.value)
        return q, q
    if isinstance(e, Unary):
        al, ah = _raw_enclose(e.arg, env, p, limits)
        if e.op == "neg":
            return -ah, -al
        if e.op == "sqrt":
            if limits is not None and al < limits.sqrt_min:
                raise _ValidityFail
            if al < 0:
                raise DomainError(f"sqrt over negative values in {to_text(e)}")
            return _sqrt_lo(al, p), _sqrt_hi(ah, p)
        if e.op == "exp":
            if limits is not None and ah > limits.exp_max:
                raise _ValidityFail
            if ah > EXP_ARG_CAP:
                raise DomainError(f"exp argument too large in {to_text(e)}")
            lo = mpq(0) if al < -EXP_ARG_CAP else _exp_raw(al, p)[0]
            hi = _exp_raw(ah if ah >= -EXP_ARG_CAP else mpq(-EXP_ARG_CAP), p)[1]
            return lo, hi
        return _trig_over_interval(e.op, al, ah, p)
    bl_, bh_ = _raw_enclose(e.right, env, p, limits)
    al, ah = _raw_enclose(e.left, env, p, limits)
    if e.op == "+":
        return al + bl_, ah + bh_
    if e.op == "-":
        return al - bh_, ah - bl_
    if e.op == "*":
        c1, c2, c3, c4 = al * bl_, al * bh_, ah * bl_, ah * bh_
        return min(c1, c2, c3, c4), max(c1, c2, c3, c4)
    if limits is not None and not (
        bl_ >= limits.div_min or bh_ <= -limits.div_min
    ):
        raise _ValidityFail
    if bl_ <= 0 <= bh_:
        raise DomainError(f"division by an interval containing zero in {to_text(e)}")
    c1, c2, c3, c4 = al / bl_, al / bh_, ah / bl_, ah / bh_
    return min(c1, c2, c3, c4), max(c1, c2, c3, c4)


def enclose(e: Expr, env: Mapping[str, RationalLike], p: int) -> RationalInterval:
    """Rigorous rational enclosure of e over exact point inputs.

    Chained over halved precisions, so enclose(e, env, 2p) is always
    contained in enclose(e, env, p).
    """
    env_q = {k: as_rational(v) for k, v in env.items()}
    return RationalInterval(
        *_chain(lambda q: _raw_enclose(e, env_q, q, None), p)
    )


def validity_ok(e: Expr, env: Mapping[str, RationalLike], p: int = 64) -> bool:
    """Certify generated inputs: divisors clear DELTA_DIV, sqrt arguments
    clear DELTA_SQRT, exp arguments stay below X_EXP_MAX, all proven by a
    single enclosure pass (conservative: near-threshold inputs fail)."""
    env_q = {k: as_rational(v) for k, v in env.items()}
    try:
        _raw_enclose(e, env_q, p, _VALIDITY_LIMITS)
    except (_ValidityFail, DomainError):
        return False
    return True


_P_START = 64
_P_CAP = 4096


def check_containment(
    iv, e: Expr, env: Mapping[str, RationalLike], p_cap: int = _P_CAP
) -> Verdict:
    """Verdict on whether the true value of e at env lies inside iv.

    Runs the precision ladder 64, 128, ..., p_cap, intersecting enclosures
    as it refines; returns UNDECIDED only at the ladder cap. iv only needs
    lo/hi float attributes, so deliberately broken test intervals can be
    checked too (an empty one ends up VIOLATED once refinement separates
    the enclosure from it).
    """
    env_q = {k: as_rational(v) for k, v in env.items()}
    iv_lo = None if math.isinf(iv.lo) else decompose(iv.lo)
    iv_hi = None if math.isinf(iv.hi) else decompose(iv.hi)
    o_lo = o_hi = None
    p = _P_START
    while True:
        l2, h2 = _raw_enclose(e, env_q, p, None)
        if o_lo is None:
            o_lo, o_hi = l2, h2
        else:
            if l2 > o_lo:
                o_lo = l2
            if h2 < o_hi:
                o_hi = h2
        if (iv_lo is None or iv_lo <= o_lo) and (iv_hi is None or o_hi <= iv_hi):
            return Verdict.CONTAINED
        if (iv_lo is not None and o_hi < iv_lo) or (
            iv_hi is not None and o_lo > iv_hi
        ):
            return Verdict.VIOLATED
        if p >= p_cap:
            return Verdict.UNDECIDED
        p *= 2


def width_exact(iv) -> Rational:
    """Exact rational width hi - lo of a float interval."""
    if math.isinf(iv.lo) or math.isinf(iv.hi):
        raise UnboundedInterval(f"width of [{iv.lo!r}, {iv.hi!r}] is unbounded")
    return decompose(iv.hi) - decompose(iv.lo)


@dataclass(frozen=True)
class VerificationQuery:
    """One exportable containment claim: lower <= e(inputs) <= upper."""

    expr: Expr
    inputs: dict[str, Rational]
    lower: Rational
    upper: Rational


def _fmt_rational(r: Rational) -> str:
    q = mpq(r)
    return f"{q.numerator}/{q.denominator}"


def export_query(q: VerificationQuery) -> str:
    """Single-line exact text form, e.g.
    ``0/1 <= (+ a a) [a := 1/10] <= 1/1`` with the expression in the
    s-expression grammar so it round-trips through parse."""
    bindings = ", ".join(
        f"{name} := {_fmt_rational(value)}" for name, value in sorted(q.inputs.items())
    )
    return (
        f"{_fmt_rational(q.lower)} <= {to_text(q.expr)} "
        f"[{bindings}] <= {_fmt_rational(q.upper)}"
    )
