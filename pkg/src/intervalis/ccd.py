"""Continuous collision detection along linear trajectories.

Two interval root finders decide whether a moving vertex passes through a
moving triangle (vertex-face) or two moving edges cross (edge-edge) for
t in [0, 1]: a multivariate bisection over (t, u, v) boxes and a
univariate bisection over the coplanarity cubic.  Both are conservative:
they may report spurious contacts but never miss a real one.  Ground
truth comes from an exact rational decision procedure built on Sturm
sequences.

Boundary contact (a root with a zero barycentric or edge parameter)
counts as a collision throughout.
"""

from __future__ import annotations

import csv
import heapq
import math
import time
from dataclasses import dataclass
from typing import Iterable, Sequence

from gmpy2 import mpq

from .errors import DegenerateQuery, IdenticallyZeroCubic, UsageError
from .floatbits import Rational, decompose, next_down, next_up
from .interval import Interval, Strategy, add, make_point, mul, sub

VERTEX_FACE = "vertex-face"
EDGE_EDGE = "edge-edge"

Vec3 = tuple[float, float, float]

# Box-queue pop budget per query; exceeding it returns the conservative
# answer instead of running unbounded on adversarial tangencies.
_MAX_POPS = 1_000_000


@dataclass(frozen=True, slots=True)
class CcdQuery:
    """Four vertices moving linearly from start to end over t in [0, 1].

    Vertex order is (point, face v0, face v1, face v2) for vertex-face
    queries and (a0, a1, b0, b1) for edge-edge queries.
    """

    kind: str
    start: tuple[Vec3, Vec3, Vec3, Vec3]
    end: tuple[Vec3, Vec3, Vec3, Vec3]

    def __post_init__(self) -> None:
        if self.kind not in (VERTEX_FACE, EDGE_EDGE):
            raise ValueError(f"unknown query kind {self.kind!r}")
        for label in ("start", "end"):
            quad = getattr(self, label)
            if len(quad) != 4 or any(len(p) != 3 for p in quad):
                raise ValueError(f"{label} needs 4 coordinate triples")
            clean = tuple(tuple(float(c) for c in p) for p in quad)
            if any(not math.isfinite(c) for p in clean for c in p):
                raise ValueError(f"non-finite coordinate in {label}: {quad!r}")
            object.__setattr__(self, label, clean)


@dataclass(frozen=True, slots=True)
class ParamBox:
    """Search box for (t, u, v); every component inside [0, 1]."""

    t: Interval
    u: Interval
    v: Interval

    def __post_init__(self) -> None:
        for name in ("t", "u", "v"):
            iv = getattr(self, name)
            if not (0.0 <= iv.lo and iv.hi <= 1.0):
                raise ValueError(f"{name} = {iv} leaves [0, 1]")


@dataclass(frozen=True, slots=True)
class CubicPoly:
    """Exact coplanarity polynomial c3*t**3 + c2*t**2 + c1*t + c0."""

    c3: Rational
    c2: Rational
    c1: Rational
    c0: Rational

    def __post_init__(self) -> None:
        for f in ("c3", "c2", "c1", "c0"):
            object.__setattr__(self, f, mpq(getattr(self, f)))

    @property
    def is_zero(self) -> bool:
        return self.c3 == 0 and self.c2 == 0 and self.c1 == 0 and self.c0 == 0

    def coefficients(self) -> list[Rational]:
        """Ascending coefficient list [c0, c1, c2, c3]."""
        return [self.c0, self.c1, self.c2, self.c3]


@dataclass(frozen=True, slots=True)
class CcdResult:
    hit: bool
    t_box: Interval | None


@dataclass(frozen=True, slots=True)
class CcdFixture:
    """A query with its constructed ground truth."""

    name: str
    query: CcdQuery
    collides: bool


@dataclass(frozen=True, slots=True)
class CcdReportRow:
    """Benchmark outcome for one method under one strategy."""

    method: str
    strategy: str
    queries: int
    hits: int
    false_positives: int
    false_negatives: int
    total_ms: float


# ---------------------------------------------------------------------------
# Interval evaluation of the trajectory functions.
# ---------------------------------------------------------------------------


def _moving_points(q: CcdQuery, t: Interval, s: Strategy) -> list[tuple]:
    one = make_point(1.0)
    omt = sub(one, t, s)
    out = []
    for i in range(4):
        out.append(tuple(
            add(
                mul(omt, make_point(q.start[i][k]), s),
                mul(t, make_point(q.end[i][k]), s),
                s,
            )
            for k in range(3)
        ))
    return out


def f_vertex_face(
    box: ParamBox, q: CcdQuery, s: Strategy
) -> tuple[Interval, Interval, Interval]:
    """Enclosure of p(t) - ((1-u-v) v0(t) + u v1(t) + v v2(t))."""
    if q.kind != VERTEX_FACE:
        raise ValueError(f"vertex-face evaluation of a {q.kind} query")
    p, v0, v1, v2 = _moving_points(q, box.t, s)
    one = make_point(1.0)
    omuv = sub(sub(one, box.u, s), box.v, s)
    return tuple(
        sub(
            p[k],
            add(
                add(mul(omuv, v0[k], s), mul(box.u, v1[k], s), s),
                mul(box.v, v2[k], s),
                s,
            ),
            s,
        )
        for k in range(3)
    )


def f_edge_edge(
    box: ParamBox, q: CcdQuery, s: Strategy
) -> tuple[Interval, Interval, Interval]:
    """Enclosure of ((1-u) a0(t) + u a1(t)) - ((1-v) b0(t) + v b1(t))."""
    if q.kind != EDGE_EDGE:
        raise ValueError(f"edge-edge evaluation of a {q.kind} query")
    a0, a1, b0, b1 = _moving_points(q, box.t, s)
    one = make_point(1.0)
    omu = sub(one, box.u, s)
    omv = sub(one, box.v, s)
    return tuple(
        sub(
            add(mul(omu, a0[k], s), mul(box.u, a1[k], s), s),
            add(mul(omv, b0[k], s), mul(box.v, b1[k], s), s),
            s,
        )
        for k in range(3)
    )


def _excludes_zero(iv: Interval) -> bool:
    return iv.lo > 0.0 or iv.hi < 0.0


def multivariate_ccd(q: CcdQuery, s: Strategy, delta: float = 1e-6) -> CcdResult:
    """Bisection over (t, u, v) boxes, earliest t first.

    A box is discarded only when some F component excludes zero or, for
    vertex-face, u.lo + v.lo provably exceeds 1 (checked in exact
    rationals); a surviving box with all widths <= delta, or too small
    to split, is reported as a hit with its t interval.
    """
    if not delta > 0.0:
        raise ValueError(f"delta must be positive, got {delta!r}")
    f = f_vertex_face if q.kind == VERTEX_FACE else f_edge_edge
    unit = Interval(0.0, 1.0)
    heap = [(0.0, 0, ParamBox(unit, unit, unit))]
    seq = 1
    pops = 0
    while heap:
        _, _, box = heapq.heappop(heap)
        pops += 1
        fx, fy, fz = f(box, q, s)
        if _excludes_zero(fx) or _excludes_zero(fy) or _excludes_zero(fz):
            continue
        if q.kind == VERTEX_FACE and decompose(box.u.lo) + decompose(box.v.lo) > 1:
            continue
        dims = (box.t, box.u, box.v)
        widths = [iv.hi - iv.lo for iv in dims]
        if all(w <= delta for w in widths) or pops >= _MAX_POPS:
            return CcdResult(True, box.t)
        split = None
        # Widest dimension first; ties resolve toward t, then u.
        for i in sorted(range(3), key=lambda i: (-widths[i], i)):
            lo, hi = dims[i].lo, dims[i].hi
            mid = lo + (hi - lo) * 0.5
            if lo < mid < hi:
                split = (i, mid)
                break
        if split is None:
            return CcdResult(True, box.t)
        i, mid = split
        for piece in (Interval(dims[i].lo, mid), Interval(mid, dims[i].hi)):
            parts = list(dims)
            parts[i] = piece
            child = ParamBox(*parts)
            heapq.heappush(heap, (child.t.lo, seq, child))
            seq += 1
    return CcdResult(False, None)


# ---------------------------------------------------------------------------
# Exact polynomial arithmetic on ascending mpq coefficient lists.
# ---------------------------------------------------------------------------


def _trim(p: list) -> list:
    while p and p[-1] == 0:
        p.pop()
    return p


def _pat(p: list, i: int) -> Rational:
    return p[i] if i < len(p) else mpq(0)


def _padd(a: list, b: list) -> list:
    return _trim([_pat(a, i) + _pat(b, i) for i in range(max(len(a), len(b)))])


def _psub(a: list, b: list) -> list:
    return _trim([_pat(a, i) - _pat(b, i) for i in range(max(len(a), len(b)))])


def _pmul(a: list, b: list) -> list:
    if not a or not b:
        return []
    out = [mpq(0)] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    return _trim(out)


def _pderiv(a: list) -> list:
    return _trim([i * a[i] for i in range(1, len(a))])


def _peval(a: list, x: Rational) -> Rational:
    acc = mpq(0)
    for c in reversed(a):
        acc = acc * x + c
    return acc


def _pdivmod(a: list, b: list) -> tuple[list, list]:
    b = _trim(list(b))
    if not b:
        raise ZeroDivisionError("polynomial division by zero polynomial")
    rem = _trim(list(a))
    if len(rem) < len(b):
        return [], _trim(rem)
    quo = [mpq(0)] * (len(rem) - len(b) + 1)
    lead = b[-1]
    while len(rem) >= len(b):
        if rem[-1] == 0:
            rem.pop()
            continue
        k = len(rem) - len(b)
        f = rem[-1] / lead
        quo[k] = f
        for i in range(len(b) - 1):
            rem[k + i] -= f * b[i]
        rem.pop()
    return _trim(quo), _trim(rem)


def _pmonic(a: list) -> list:
    """Divide by the leading coefficient; only used where an overall
    scalar is irrelevant (gcd chains and root sets)."""
    if not a or a[-1] == 1:
        return a
    lead = a[-1]
    return [c / lead for c in a]


def _pgcd(a: list, b: list) -> list:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        _, r = _pdivmod(a, b)
        a, b = b, _pmonic(r)
    return _pmonic(a)


def _square_free(a: list) -> list:
    a = _trim(list(a))
    g = _pgcd(a, _pderiv(a))
    if len(g) <= 1:
        return a
    q, r = _pdivmod(a, g)
    assert not r
    return q


def _sturm_chain(a: list) -> list[list]:
    a = _trim(list(a))
    chain = [a, _pderiv(a)]
    while chain[-1]:
        _, r = _pdivmod(chain[-2], chain[-1])
        if not r:
            break
        # Rescaling by a positive scalar keeps every sign sequence intact.
        lead = abs(r[-1])
        chain.append([-c / lead for c in r])
    return chain


def _sign_changes(chain: list[list], x: Rational) -> int:
    signs = []
    for p in chain:
        v = _peval(p, x)
        if v != 0:
            signs.append(1 if v > 0 else -1)
    return sum(1 for i in range(len(signs) - 1) if signs[i] != signs[i + 1])


def _count_roots(sf: list, lo: Rational, hi: Rational) -> int:
    """Distinct real roots of square-free sf in (lo, hi]."""
    chain = _sturm_chain(sf)
    return _sign_changes(chain, lo) - _sign_changes(chain, hi)


def sturm_count(p: CubicPoly, lo, hi) -> int:
    """Exact number of distinct real roots of p in (lo, hi]."""
    if p.is_zero:
        raise IdenticallyZeroCubic("root counting over the zero polynomial")
    lo_q, hi_q = mpq(lo), mpq(hi)
    if not lo_q < hi_q:
        raise ValueError(f"need lo < hi, got [{lo_q}, {hi_q}]")
    return _count_roots(_square_free(p.coefficients()), lo_q, hi_q)


def _prange(a: list, lo: Rational, hi: Rational) -> tuple[Rational, Rational]:
    """Exact interval Horner bounds for a over [lo, hi]."""
    rlo = rhi = mpq(0)
    for c in reversed(a):
        cands = (rlo * lo, rlo * hi, rhi * lo, rhi * hi)
        rlo, rhi = min(cands) + c, max(cands) + c
    return rlo, rhi


def _sign_at_root(poly: list, isolator: list, lo: Rational, hi: Rational) -> int:
    """Sign of poly at the unique root of square-free isolator in (lo, hi].

    A shared root is detected exactly through the gcd; otherwise the
    isolating interval shrinks until interval evaluation of poly becomes
    sign-definite, which must happen since the value is nonzero.
    """
    g = _pgcd(isolator, poly)
    if len(g) > 1 and _count_roots(g, lo, hi) == 1:
        return 0
    while True:
        rlo, rhi = _prange(poly, lo, hi)
        if rlo > 0:
            return 1
        if rhi < 0:
            return -1
        mid = (lo + hi) / 2
        if _peval(isolator, mid) == 0:
            v = _peval(poly, mid)
            return 0 if v == 0 else (1 if v > 0 else -1)
        if _count_roots(isolator, lo, mid) == 1:
            hi = mid
        else:
            lo = mid


# ---------------------------------------------------------------------------
# Exact geometry polynomials in t.
# ---------------------------------------------------------------------------


def _linear_tracks(q: CcdQuery) -> list[tuple[list, list, list]]:
    """Each vertex as a coordinate triple of linear polynomials in t."""
    out = []
    for i in range(4):
        coords = []
        for k in range(3):
            s0 = decompose(q.start[i][k])
            e0 = decompose(q.end[i][k])
            coords.append(_trim([s0, e0 - s0]))
        out.append(tuple(coords))
    return out


def _vsub(a, b):
    return tuple(_psub(a[k], b[k]) for k in range(3))


def _vdot(a, b) -> list:
    return _padd(_padd(_pmul(a[0], b[0]), _pmul(a[1], b[1])), _pmul(a[2], b[2]))


def _vcross(a, b):
    return (
        _psub(_pmul(a[1], b[2]), _pmul(a[2], b[1])),
        _psub(_pmul(a[2], b[0]), _pmul(a[0], b[2])),
        _psub(_pmul(a[0], b[1]), _pmul(a[1], b[0])),
    )


def _coplanarity_coeffs(q: CcdQuery) -> list:
    p0, p1, p2, p3 = _linear_tracks(q)
    if q.kind == VERTEX_FACE:
        return _vdot(_vsub(p0, p1), _vcross(_vsub(p2, p1), _vsub(p3, p1)))
    da = _vsub(p1, p0)
    db = _vsub(p3, p2)
    w = _vsub(p2, p0)
    return _vdot(_vcross(da, db), w)


def coplanarity_cubic(q: CcdQuery) -> CubicPoly:
    """Exact determinant polynomial whose roots are the coplanar times."""
    c = _coplanarity_coeffs(q)
    c = c + [mpq(0)] * (4 - len(c))
    return CubicPoly(c[3], c[2], c[1], c[0])


def _vf_param_polys(q: CcdQuery) -> tuple[list, list, list]:
    """(D, Nu, Nv): barycentric numerators and the Gram determinant, so
    u = Nu/D and v = Nv/D at any coplanar time."""
    p, v0, v1, v2 = _linear_tracks(q)
    e1 = _vsub(v1, v0)
    e2 = _vsub(v2, v0)
    w = _vsub(p, v0)
    d00 = _vdot(e1, e1)
    d01 = _vdot(e1, e2)
    d11 = _vdot(e2, e2)
    d20 = _vdot(w, e1)
    d21 = _vdot(w, e2)
    d = _psub(_pmul(d00, d11), _pmul(d01, d01))
    nu = _psub(_pmul(d11, d20), _pmul(d01, d21))
    nv = _psub(_pmul(d00, d21), _pmul(d01, d20))
    return d, nu, nv


def _ee_param_polys(q: CcdQuery) -> tuple[list, list, list]:
    """(N2, NU, NV): edge parameters u = NU/N2, v = NV/N2 at coplanar
    times, with N2 the squared cross product of the two directions."""
    a0, a1, b0, b1 = _linear_tracks(q)
    da = _vsub(a1, a0)
    db = _vsub(b1, b0)
    w = _vsub(b0, a0)
    n = _vcross(da, db)
    n2 = _vdot(n, n)
    nu = _vdot(_vcross(w, db), n)
    nv = _vdot(_vcross(w, da), n)
    return n2, nu, nv


# ---------------------------------------------------------------------------
# Exact ground truth.
# ---------------------------------------------------------------------------


def _inside_exact(q: CcdQuery, r: Rational) -> bool:
    if q.kind == VERTEX_FACE:
        d, nu, nv = _vf_param_polys(q)
        dv = _peval(d, r)
        if dv == 0:
            raise DegenerateQuery(f"degenerate face at contact time {float(r)}")
        nuv = _peval(nu, r)
        nvv = _peval(nv, r)
        return nuv >= 0 and nvv >= 0 and nuv + nvv <= dv
    n2, nu, nv = _ee_param_polys(q)
    n2v = _peval(n2, r)
    if n2v == 0:
        raise DegenerateQuery(f"parallel edges at contact time {float(r)}")
    nuv = _peval(nu, r)
    nvv = _peval(nv, r)
    return 0 <= nuv <= n2v and 0 <= nvv <= n2v


def _inside_at_root(q: CcdQuery, isolator: list, lo: Rational, hi: Rational) -> bool:
    if q.kind == VERTEX_FACE:
        d, nu, nv = _vf_param_polys(q)
        if _sign_at_root(d, isolator, lo, hi) <= 0:
            raise DegenerateQuery("degenerate face at an isolated contact time")
        return (
            _sign_at_root(nu, isolator, lo, hi) >= 0
            and _sign_at_root(nv, isolator, lo, hi) >= 0
            and _sign_at_root(_psub(d, _padd(nu, nv)), isolator, lo, hi) >= 0
        )
    n2, nu, nv = _ee_param_polys(q)
    if _sign_at_root(n2, isolator, lo, hi) <= 0:
        raise DegenerateQuery("parallel edges at an isolated contact time")
    return (
        _sign_at_root(nu, isolator, lo, hi) >= 0
        and _sign_at_root(_psub(n2, nu), isolator, lo, hi) >= 0
        and _sign_at_root(nv, isolator, lo, hi) >= 0
        and _sign_at_root(_psub(n2, nv), isolator, lo, hi) >= 0
    )


def _roots_in_unit(coeffs: list) -> list[tuple]:
    """Roots of coeffs in [0, 1] as ('exact', r) and ('isolated', sf, a, b)
    items, the latter holding exactly one root of sf in (a, b]."""
    sf = _square_free(list(coeffs))
    out = []
    if _peval(sf, mpq(0)) == 0:
        out.append(("exact", mpq(0)))
        sf = sf[1:]
    while len(sf) > 1:
        total = _count_roots(sf, mpq(0), mpq(1))
        if total == 0:
            break
        exact = None
        done = []
        stack = [(mpq(0), mpq(1), total)]
        while stack:
            a, b, cnt = stack.pop()
            if cnt == 0:
                continue
            if cnt == 1:
                if _peval(sf, b) == 0:
                    exact = b
                    break
                done.append(("isolated", sf, a, b))
                continue
            m = (a + b) / 2
            if _peval(sf, m) == 0:
                exact = m
                break
            left = _count_roots(sf, a, m)
            stack.append((a, m, left))
            stack.append((m, b, cnt - left))
        if exact is None:
            out.extend(done)
            break
        # Divide the exact root out and redo the isolation on the quotient.
        out.append(("exact", exact))
        sf, r = _pdivmod(sf, [-exact, mpq(1)])
        assert not r
    return out


def ccd_oracle(q: CcdQuery) -> bool:
    """Exact collision decision: does some coplanarity root in [0, 1] pass
    the barycentric or edge-parameter containment test?

    Raises DegenerateQuery for identically zero coplanarity polynomials
    and for contacts at degenerate (zero area or parallel) configurations.
    """
    coeffs = _coplanarity_coeffs(q)
    if not coeffs:
        raise DegenerateQuery("coplanarity polynomial is identically zero")
    for item in _roots_in_unit(coeffs):
        if item[0] == "exact":
            hit = _inside_exact(q, item[1])
        else:
            hit = _inside_at_root(q, item[1], item[2], item[3])
        if hit:
            return True
    return False


# ---------------------------------------------------------------------------
# Univariate interval root finder over the coplanarity cubic.
# ---------------------------------------------------------------------------


def _coeff_interval(c: Rational) -> Interval:
    f = float(c)
    if decompose(f) == c:
        return make_point(f)
    return Interval(next_down(f), next_up(f))


def _ivdot(a, b, s: Strategy) -> Interval:
    return add(add(mul(a[0], b[0], s), mul(a[1], b[1], s), s), mul(a[2], b[2], s), s)


def _ivcross(a, b, s: Strategy):
    return (
        sub(mul(a[1], b[2], s), mul(a[2], b[1], s), s),
        sub(mul(a[2], b[0], s), mul(a[0], b[2], s), s),
        sub(mul(a[0], b[1], s), mul(a[1], b[0], s), s),
    )


def _ivsub(a, b, s: Strategy):
    return tuple(sub(a[k], b[k], s) for k in range(3))


def _vf_inside_interval(q: CcdQuery, t: Interval, s: Strategy) -> str:
    p, v0, v1, v2 = _moving_points(q, t, s)
    e1 = _ivsub(v1, v0, s)
    e2 = _ivsub(v2, v0, s)
    w = _ivsub(p, v0, s)
    d00 = _ivdot(e1, e1, s)
    d01 = _ivdot(e1, e2, s)
    d11 = _ivdot(e2, e2, s)
    d20 = _ivdot(w, e1, s)
    d21 = _ivdot(w, e2, s)
    d = sub(mul(d00, d11, s), mul(d01, d01, s), s)
    nu = sub(mul(d11, d20, s), mul(d01, d21, s), s)
    nv = sub(mul(d00, d21, s), mul(d01, d20, s), s)
    total = add(nu, nv, s)
    if not d.lo > 0.0:
        return "ambiguous"
    if nu.hi < 0.0 or nv.hi < 0.0 or total.lo > d.hi:
        return "outside"
    if nu.lo >= 0.0 and nv.lo >= 0.0 and total.hi <= d.lo:
        return "inside"
    return "ambiguous"


def _ee_inside_interval(q: CcdQuery, t: Interval, s: Strategy) -> str:
    a0, a1, b0, b1 = _moving_points(q, t, s)
    da = _ivsub(a1, a0, s)
    db = _ivsub(b1, b0, s)
    w = _ivsub(b0, a0, s)
    n = _ivcross(da, db, s)
    n2 = _ivdot(n, n, s)
    nu = _ivdot(_ivcross(w, db, s), n, s)
    nv = _ivdot(_ivcross(w, da, s), n, s)
    if not n2.lo > 0.0:
        return "ambiguous"
    if nu.hi < 0.0 or nu.lo > n2.hi or nv.hi < 0.0 or nv.lo > n2.hi:
        return "outside"
    if nu.lo >= 0.0 and nu.hi <= n2.lo and nv.lo >= 0.0 and nv.hi <= n2.lo:
        return "inside"
    return "ambiguous"


def univariate_ccd(q: CcdQuery, s: Strategy, delta: float = 1e-6) -> CcdResult:
    """Leftmost-first bisection of [0, 1] against the interval-evaluated
    coplanarity cubic; surviving segments of width <= delta are kept only
    if the interval containment test cannot rule the contact out.
    """
    if not delta > 0.0:
        raise ValueError(f"delta must be positive, got {delta!r}")
    cubic = coplanarity_cubic(q)
    if cubic.is_zero:
        raise IdenticallyZeroCubic("always-coplanar motion cannot be bisected")
    c3 = _coeff_interval(cubic.c3)
    lower = [_coeff_interval(cubic.c2), _coeff_interval(cubic.c1),
             _coeff_interval(cubic.c0)]
    inside = _vf_inside_interval if q.kind == VERTEX_FACE else _ee_inside_interval
    stack = [(0.0, 1.0)]
    while stack:
        lo, hi = stack.pop()
        t = Interval(lo, hi)
        acc = c3
        for c in lower:
            acc = add(mul(acc, t, s), c, s)
        if _excludes_zero(acc):
            continue
        mid = lo + (hi - lo) * 0.5
        if hi - lo <= delta or not lo < mid < hi:
            if inside(q, t, s) == "outside":
                continue
            return CcdResult(True, t)
        stack.append((mid, hi))
        stack.append((lo, mid))
    return CcdResult(False, None)


# ---------------------------------------------------------------------------
# Benchmark runner, dataset IO and the fixture suite.
# ---------------------------------------------------------------------------


def run_ccd_benchmark(
    dataset: Sequence[tuple[CcdQuery, bool | None]],
    strategies: Iterable[Strategy],
    delta: float = 1e-6,
    methods: tuple[str, ...] = ("univariate", "multivariate"),
) -> list[CcdReportRow]:
    """False-positive and false-negative counts per method x strategy.

    Ground truth is the dataset's label where present, ccd_oracle
    otherwise.
    """
    solvers = {"univariate": univariate_ccd, "multivariate": multivariate_ccd}
    unknown = [m for m in methods if m not in solvers]
    if unknown:
        raise ValueError(f"unknown ccd methods {unknown}")
    truths = [
        label if label is not None else ccd_oracle(query)
        for query, label in dataset
    ]
    rows = []
    for method in methods:
        solver = solvers[method]
        for s in strategies:
            hits = fp = fn = 0
            t0 = time.perf_counter()
            for (query, _), truth in zip(dataset, truths):
                predicted = solver(query, s, delta).hit
                hits += predicted
                fp += predicted and not truth
                fn += (not predicted) and truth
            total_ms = (time.perf_counter() - t0) * 1000.0
            rows.append(
                CcdReportRow(method, s.name, len(dataset), hits, fp, fn, total_ms)
            )
    return rows


def save_ccd_report(rows: Sequence[CcdReportRow], destination) -> None:
    """CSV report, canonically sorted, byte-deterministic given the rows."""
    with open(destination, "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow((
            "method", "strategy", "queries", "hits", "false_positives",
            "false_negatives", "total_ms",
        ))
        for r in sorted(rows, key=lambda r: (r.method, r.strategy)):
            w.writerow((
                r.method, r.strategy, r.queries, r.hits, r.false_positives,
                r.false_negatives, repr(r.total_ms),
            ))


def _parse_coord(tok: str) -> float:
    try:
        return float(tok)
    except ValueError:
        return float.fromhex(tok)


def load_queries(path) -> list[tuple[CcdQuery, bool | None]]:
    """Dataset rows: kind, 24 coordinates (12 start, 12 end, decimal or
    hexfloat), optional trailing ground truth in {0, 1, ?}."""
    out = []
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            fields = line.split(",")
            if len(fields) not in (25, 26):
                raise UsageError(
                    f"{path}:{lineno}: expected 25 or 26 fields, got {len(fields)}"
                )
            try:
                coords = [_parse_coord(tok) for tok in fields[1:25]]
                start = tuple(tuple(coords[3 * i: 3 * i + 3]) for i in range(4))
                end = tuple(tuple(coords[12 + 3 * i: 15 + 3 * i]) for i in range(4))
                query = CcdQuery(fields[0], start, end)
            except ValueError as exc:
                raise UsageError(f"{path}:{lineno}: {exc}") from exc
            label: bool | None
            if len(fields) == 25 or fields[25] == "?":
                label = None
            elif fields[25] in ("0", "1"):
                label = fields[25] == "1"
            else:
                raise UsageError(
                    f"{path}:{lineno}: ground truth must be 0, 1 or ?, "
                    f"got {fields[25]!r}"
                )
            out.append((query, label))
    return out


def save_queries(entries: Sequence[tuple[CcdQuery, bool | None]], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        for query, label in entries:
            coords = [c for p in query.start for c in p]
            coords += [c for p in query.end for c in p]
            tag = "?" if label is None else ("1" if label else "0")
            f.write(",".join([query.kind, *map(repr, coords), tag]))
            f.write("\n")


_TRI = ((0.0, 0.0, 0.0), (1.0, 0.0, 0.0), (0.0, 1.0, 0.0))


def _static(p: Vec3) -> tuple[Vec3, Vec3]:
    return p, p


def _vf(name: str, p_start: Vec3, p_end: Vec3, tri_start, tri_end,
        collides: bool) -> CcdFixture:
    q = CcdQuery(VERTEX_FACE, (p_start, *tri_start), (p_end, *tri_end))
    return CcdFixture(name, q, collides)


def _ee(name: str, starts, ends, collides: bool) -> CcdFixture:
    return CcdFixture(name, CcdQuery(EDGE_EDGE, starts, ends), collides)


# Vertical drops through the static unit triangle: contact at t = 1/2 at
# barycentric (x, y), so truth is x >= 0, y >= 0, x + y <= 1.
_DROP_GRID = (
    (0.1, 0.1, True), (0.25, 0.5, True), (0.5, 0.25, True),
    (0.3125, 0.3125, True), (0.5, 0.5, True), (0.5, 0.0, True),
    (0.0, 0.5, True), (0.0, 0.0, True), (1.0, 0.0, True),
    (0.2, 0.7, True), (0.7, 0.2, True), (0.45, 0.45, True),
    (0.001, 0.001, True), (0.998, 0.001, True), (0.5, 0.001, True),
    (0.9, 0.2, False), (-0.1, 0.3, False), (0.3, -0.1, False),
    (5.0, 5.0, False), (1.01, 0.0, False), (0.5, -0.001, False),
    (0.25, 0.76, False), (-5.0, 0.5, False), (0.6, 0.41, False),
)

# Slanted trajectories crossing the triangle plane at exactly t = 1/2 with
# y = m/2 there, so collision iff m >= 0; |m| is graded down to stress
# delta refinement.
_SLANT_VF = (
    ("vf_slant_hit_coarse", 2e-3, True),
    ("vf_slant_miss_coarse", -2e-3, False),
    ("vf_slant_hit_meso", 2e-5, True),
    ("vf_slant_miss_meso", -2e-5, False),
    ("vf_slant_hit_fine", 2e-7, True),
    ("vf_slant_miss_fine", -2e-7, False),
    ("vf_slant_miss_ultra", -2e-9, False),
)

# Vertical edge drops: segment B spans y in [-0.5, 0.5] at offset x and
# falls through the static edge A from (0,0,0) to (1,0,0); contact at
# t = 1/2 iff 0 <= x <= 1.
_EE_GRID = (
    (0.25, True), (0.5, True), (0.75, True), (0.0, True), (1.0, True),
    (-0.25, False), (1.25, False), (-0.001, False),
)

_SLANT_EE = (
    ("ee_slant_hit_coarse", -2e-3, True),
    ("ee_slant_miss_coarse", 2e-3, False),
    ("ee_slant_hit_meso", -2e-5, True),
    ("ee_slant_miss_meso", 2e-5, False),
    ("ee_slant_hit_fine", -2e-7, True),
    ("ee_slant_miss_fine", 2e-7, False),
)


def fixtures() -> list[CcdFixture]:
    """Hand-constructed query suite with derivable ground truth; includes
    boundary (grazing) contacts, endpoint-in-time contacts and near-miss
    ladders down to 2e-9 margins."""
    out = []
    for i, (x, y, hit) in enumerate(_DROP_GRID):
        out.append(_vf(
            f"vf_drop_{i:02d}", (x, y, -1.0), (x, y, 1.0), _TRI, _TRI, hit,
        ))
    out += [
        _vf("vf_touch_start_inside", (0.2, 0.2, 0.0), (0.2, 0.2, 2.0),
            _TRI, _TRI, True),
        _vf("vf_touch_end_inside", (0.3, 0.3, -2.0), (0.3, 0.3, 0.0),
            _TRI, _TRI, True),
        _vf("vf_touch_start_outside", (2.0, 2.0, 0.0), (2.0, 2.0, 2.0),
            _TRI, _TRI, False),
        _vf("vf_touch_end_outside", (2.0, 2.0, -2.0), (2.0, 2.0, 0.0),
            _TRI, _TRI, False),
    ]
    lifted = tuple((x, y, 1.0) for x, y, _ in _TRI)
    dropped = tuple((x, y, -1.0) for x, y, _ in _TRI)
    out += [
        # Point rises to z = 0 while the face drops through it: contact at
        # t = 2/3 where -1 + t = 1 - 2t.
        _vf("vf_converging_planes", (0.2, 0.2, -1.0), (0.2, 0.2, 0.0),
            lifted, dropped, True),
        _vf("vf_converging_planes_outside", (2.0, 2.0, -1.0), (2.0, 2.0, 0.0),
            lifted, dropped, False),
        # v1 and v2 tilt in opposite z directions; plane passes the static
        # point at t = 1/2 where the triangle is the unit one.
        _vf("vf_tilting_plane", (0.3, 0.2, 0.0), (0.3, 0.2, 0.0),
            ((0.0, 0.0, 0.0), (1.0, 0.0, -1.0), (0.0, 1.0, 1.0)),
            ((0.0, 0.0, 0.0), (1.0, 0.0, 1.0), (0.0, 1.0, -1.0)), True),
        _vf("vf_tilting_plane_outside", (0.9, 0.3, 0.0), (0.9, 0.3, 0.0),
            ((0.0, 0.0, 0.0), (1.0, 0.0, -1.0), (0.0, 1.0, 1.0)),
            ((0.0, 0.0, 0.0), (1.0, 0.0, 1.0), (0.0, 1.0, -1.0)), False),
        # v1 sweeps in y and v2 in z, making the coplanarity polynomial a
        # true quadratic with one irrational root near t = 0.424; the
        # contact point sits inside (u = 0.2, v = 0.33).
        _vf("vf_quadratic_path", (0.2, 0.3, -0.05), (0.2, 0.3, -0.05),
            ((0.0, 0.0, 0.0), (1.0, -1.0, 0.0), (0.0, 1.0, -1.0)),
            ((0.0, 0.0, 0.0), (1.0, 1.0, 0.0), (0.0, 1.0, 1.0)), True),
        # Same sweep with the point lifted to z = 0.4: negative
        # discriminant, never coplanar.
        _vf("vf_quadratic_no_root", (0.2, 0.3, 0.4), (0.2, 0.3, 0.4),
            ((0.0, 0.0, 0.0), (1.0, -1.0, 0.0), (0.0, 1.0, -1.0)),
            ((0.0, 0.0, 0.0), (1.0, 1.0, 0.0), (0.0, 1.0, 1.0)), False),
    ]
    for name, m, hit in _SLANT_VF:
        out.append(_vf(
            name, (0.5, 0.3, -1.0), (0.5, -0.3 + m, 1.0), _TRI, _TRI, hit,
        ))
    for i, (x, hit) in enumerate(_EE_GRID):
        out.append(_ee(
            f"ee_drop_{i}",
            ((0.0, 0.0, 0.0), (1.0, 0.0, 0.0), (x, -0.5, 1.0), (x, 0.5, 1.0)),
            ((0.0, 0.0, 0.0), (1.0, 0.0, 0.0), (x, -0.5, -1.0), (x, 0.5, -1.0)),
            hit,
        ))
    out += [
        # b0 falls exactly onto a1: boundary contact u = 1, v = 0.
        _ee("ee_endpoint_graze",
            ((0.0, 0.0, 0.0), (1.0, 0.0, 0.0), (1.0, 0.0, 1.0), (2.0, 0.5, 1.0)),
            ((0.0, 0.0, 0.0), (1.0, 0.0, 0.0), (1.0, 0.0, -1.0), (2.0, 0.5, -1.0)),
            True),
        # Both edges move toward each other and cross mid-flight.
        _ee("ee_cross_both_moving",
            ((0.0, 0.0, -0.5), (1.0, 0.0, -0.5), (0.5, -0.5, 0.5), (0.5, 0.5, 0.5)),
            ((0.0, 0.0, 0.5), (1.0, 0.0, 0.5), (0.5, -0.5, -0.5), (0.5, 0.5, -0.5)),
            True),
        # Skew lines: B crosses the plane of A far outside the segment.
        _ee("ee_skew_miss",
            ((0.0, 0.0, 0.0), (1.0, 0.0, 0.0), (0.5, 1.0, 1.0), (1.5, 2.0, 1.0)),
            ((0.0, 0.0, 0.0), (1.0, 0.0, 0.0), (0.5, 1.0, -1.0), (1.5, 2.0, -1.0)),
            False),
        # Contact exactly at t = 0 and t = 1.
        _ee("ee_touch_start",
            ((0.0, 0.0, 0.0), (1.0, 0.0, 0.0), (0.5, 0.0, 0.0), (0.5, 1.0, 0.0)),
            ((0.0, 0.0, 0.0), (1.0, 0.0, 0.0), (0.5, 0.0, 2.0), (0.5, 1.0, 2.0)),
            True),
        _ee("ee_touch_end",
            ((0.0, 0.0, 0.0), (1.0, 0.0, 0.0), (0.5, 0.0, 2.0), (0.5, 1.0, 2.0)),
            ((0.0, 0.0, 0.0), (1.0, 0.0, 0.0), (0.5, 0.0, 0.0), (0.5, 1.0, 0.0)),
            True),
    ]
    # Edge B reaches the plane of A at t = 1/2 with b0 at y = m/2, so the
    # crossing parameter is v = -m/2: hit iff m <= 0.
    for name, m, hit in _SLANT_EE:
        out.append(_ee(
            name,
            ((0.0, 0.0, 0.0), (1.0, 0.0, 0.0),
             (0.5, 0.3, -1.0), (0.5, 1.3, -1.0)),
            ((0.0, 0.0, 0.0), (1.0, 0.0, 0.0),
             (0.5, -0.3 + m, 1.0), (0.5, 0.7 + m, 1.0)),
            hit,
        ))
    return out
