"""Continuous collision detection: cubic extraction, root counting, solvers."""

from fractions import Fraction

import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from intervalis import (
    CcdQuery,
    CubicPoly,
    DegenerateQuery,
    IdenticallyZeroCubic,
    Interval,
    Strategy,
    ccd_oracle,
    multivariate_ccd,
    sturm_count,
    univariate_ccd,
)
from intervalis.ccd import (
    ParamBox,
    coplanarity_cubic,
    f_vertex_face,
    fixtures,
    load_queries,
    run_ccd_benchmark,
    save_ccd_report,
    save_queries,
)
from intervalis.errors import UsageError

PS = Strategy.pred_succ()
MULT = Strategy.multiplicative()

TRI = ((0.0, 0.0, 0.0), (1.0, 0.0, 0.0), (0.0, 1.0, 0.0))


def vf_drop(x, y, z0=1.0, z1=-1.0):
    """Vertex falling vertically through the static unit triangle."""
    return CcdQuery(
        "vertex-face",
        ((x, y, z0),) + TRI,
        ((x, y, z1),) + TRI,
    )


CROSSING = vf_drop(0.25, 0.25)
MISSING = vf_drop(5.0, 5.0)


def test_query_validation():
    with pytest.raises(ValueError):
        CcdQuery("corner-corner", CROSSING.start, CROSSING.end)
    with pytest.raises(ValueError):
        CcdQuery("vertex-face", CROSSING.start[:3], CROSSING.end)
    with pytest.raises(ValueError):
        CcdQuery(
            "vertex-face",
            ((float("inf"), 0, 0),) + TRI,
            CROSSING.end,
        )


def test_param_box_validation():
    unit = Interval(0.0, 1.0)
    ParamBox(unit, unit, unit)
    with pytest.raises(ValueError):
        ParamBox(Interval(0.0, 1.5), unit, unit)


def test_cubic_poly():
    p = CubicPoly(0, 0, 2, -1)
    assert not p.is_zero
    assert p.coefficients() == [mpq(-1), mpq(2), mpq(0), mpq(0)]
    assert CubicPoly(0, 0, 0, 0).is_zero
    assert CubicPoly(0.5, 0, 0, 0).c3 == mpq(1, 2)


def test_f_vertex_face_degenerate_box():
    # point sitting on v0 at t = 0: every residual component encloses zero
    q = vf_drop(0.0, 0.0, z0=0.0, z1=-1.0)
    pt = Interval(0.0, 0.0)
    comps = f_vertex_face(ParamBox(pt, pt, pt), q, PS)
    for c in comps:
        assert c.lo <= 0.0 <= c.hi


def test_f_vertex_face_crossing_box_contains_zero():
    unit = Interval(0.0, 1.0)
    comps = f_vertex_face(ParamBox(unit, unit, unit), CROSSING, PS)
    for c in comps:
        assert c.lo <= 0.0 <= c.hi


@given(st.integers(0, 100), st.integers(0, 100), st.integers(0, 100))
@settings(max_examples=25)
def test_f_vertex_face_containment(ti, ui, vi):
    # Exact rational trajectory point must land inside the interval triple.
    # Parameters are taken at float values so the Fraction model and the
    # degenerate box agree on the input exactly.
    t = Fraction(ti / 100)
    u = Fraction(ui / 100)
    v = Fraction(vi / 100)
    q = CROSSING
    box = ParamBox(
        Interval(ti / 100, ti / 100),
        Interval(ui / 100, ui / 100),
        Interval(vi / 100, vi / 100),
    )

    def lerp(a, b):
        return tuple(Fraction(x) + t * (Fraction(y) - Fraction(x)) for x, y in zip(a, b))

    p, v0, v1, v2 = (lerp(q.start[i], q.end[i]) for i in range(4))
    exact = tuple(
        p[k] - (v0[k] + u * (v1[k] - v0[k]) + v * (v2[k] - v0[k])) for k in range(3)
    )
    comps = f_vertex_face(box, q, PS)
    for c, ev in zip(comps, exact):
        assert Fraction(c.lo) <= ev <= Fraction(c.hi)


def test_coplanarity_cubic_crossing():
    p = coplanarity_cubic(CROSSING)
    assert p.coefficients() == [mpq(1), mpq(-2), mpq(0), mpq(0)]


def test_coplanarity_cubic_exact_model():
    # determinant model in Fraction arithmetic at rational times
    q = CcdQuery(
        "vertex-face",
        ((0.2, 0.3, 0.9), (0.0, 0.1, 0.0), (1.1, 0.0, 0.2), (0.0, 0.9, -0.1)),
        ((0.1, 0.4, -0.8), (0.2, 0.0, 0.1), (0.9, 0.2, 0.0), (0.1, 1.0, 0.0)),
    )
    p = coplanarity_cubic(q)

    def det_at(t: Fraction) -> Fraction:
        def lerp(a, b):
            return [Fraction(x) + t * (Fraction(y) - Fraction(x)) for x, y in zip(a, b)]

        pt, v0, v1, v2 = (lerp(q.start[i], q.end[i]) for i in range(4))
        e1 = [a - b for a, b in zip(v1, v0)]
        e2 = [a - b for a, b in zip(v2, v0)]
        w = [a - b for a, b in zip(pt, v0)]
        return (
            e1[0] * (e2[1] * w[2] - e2[2] * w[1])
            - e1[1] * (e2[0] * w[2] - e2[2] * w[0])
            + e1[2] * (e2[0] * w[1] - e2[1] * w[0])
        )

    c = [mpq(x) for x in p.coefficients()]
    for num, den in ((0, 1), (1, 3), (1, 2), (2, 3), (1, 1), (7, 11)):
        t = Fraction(num, den)
        horner = Fraction(0)
        for k in (3, 2, 1, 0):
            horner = horner * t + Fraction(int(c[k].numerator), int(c[k].denominator))
        assert horner == det_at(t)


def test_sturm_count_examples():
    # t (2t - 1) (t - 1) = 2t^3 - 3t^2 + t: roots 0, 1/2, 1
    p = CubicPoly(2, -3, 1, 0)
    assert sturm_count(p, mpq(-1, 2), mpq(1)) == 3
    assert sturm_count(p, 0, 1) == 2  # (lo, hi] convention drops the root at 0
    assert sturm_count(CubicPoly(0, 1, 0, 1), -10, 10) == 0  # t^2 + 1
    q = CubicPoly(0, 12, -7, 1)  # (4t-1)(3t-1)
    assert sturm_count(q, 0, 1) == 2
    assert sturm_count(q, 0, mpq(7, 24)) == 1
    assert sturm_count(q, mpq(7, 24), 1) == 1
    # repeated root counted once
    assert sturm_count(CubicPoly(0, 1, -1, mpq(1, 4)), 0, 1) == 1


@given(st.integers(-6, 6), st.integers(-6, 6), st.integers(-6, 6))
@settings(max_examples=40)
def test_sturm_count_planted_roots(r1, r2, r3):
    # p(t) = (t - r1)(t - r2)(t - r3) over several windows
    p = CubicPoly(
        1,
        -(r1 + r2 + r3),
        r1 * r2 + r1 * r3 + r2 * r3,
        -(r1 * r2 * r3),
    )
    roots = {r1, r2, r3}
    for lo, hi in ((-7, 7), (-7, 0), (0, 7), (-3, 3)):
        expected = sum(1 for r in roots if lo < r <= hi)
        assert sturm_count(p, lo, hi) == expected


def test_ccd_oracle_examples():
    assert ccd_oracle(CROSSING) is True
    assert ccd_oracle(MISSING) is False
    # boundary contact counts as collision
    assert ccd_oracle(vf_drop(0.0, 0.0)) is True
    assert ccd_oracle(vf_drop(0.5, 0.5)) is True
    assert ccd_oracle(vf_drop(0.5 + 1e-9, 0.5)) is False


def test_ccd_oracle_degenerate():
    # edges stay parallel for all t: N2 identically zero
    e = CcdQuery(
        "edge-edge",
        ((0.0, 0.0, 0.0), (1.0, 0.0, 0.0), (0.0, 1.0, 1.0), (1.0, 1.0, 1.0)),
        ((0.0, 0.0, 1.0), (1.0, 0.0, 1.0), (0.0, 1.0, 0.0), (1.0, 1.0, 0.0)),
    )
    with pytest.raises(DegenerateQuery):
        ccd_oracle(e)
    # triangle collapses to a segment exactly at the contact time
    q = CcdQuery(
        "vertex-face",
        ((0.0, 0.0, 1.0), (0.0, 0.0, 0.0), (1.0, 0.0, 0.0), (0.0, 1.0, 0.0)),
        ((0.0, 0.0, -1.0), (0.0, 0.0, 0.0), (-1.0, 0.0, 0.0), (0.0, 1.0, 0.0)),
    )
    with pytest.raises(DegenerateQuery):
        ccd_oracle(q)


def test_multivariate_ccd_examples():
    r = multivariate_ccd(CROSSING, PS)
    assert r.hit and r.t_box is not None
    assert r.t_box.lo <= 0.5 <= r.t_box.hi
    assert not multivariate_ccd(MISSING, PS).hit
    with pytest.raises(ValueError):
        multivariate_ccd(CROSSING, PS, delta=0.0)


def test_univariate_ccd_examples():
    r = univariate_ccd(CROSSING, PS)
    assert r.hit and r.t_box is not None
    assert r.t_box.lo <= 0.5 <= r.t_box.hi
    assert not univariate_ccd(MISSING, PS).hit
    # static coincident planes: cubic identically zero
    q = CcdQuery("vertex-face", ((0.5, 0.5, 0.0),) + TRI, ((0.5, 0.5, 0.0),) + TRI)
    with pytest.raises(IdenticallyZeroCubic):
        univariate_ccd(q, PS)


def test_solvers_never_report_false_negatives():
    subset = fixtures()[::3]
    for fx in subset:
        truth = fx.collides
        for solver in (univariate_ccd, multivariate_ccd):
            got = solver(fx.query, PS, delta=1e-6).hit
            if truth:
                assert got, f"{solver.__name__} missed {fx.name}"


def test_fixture_labels_match_oracle():
    fxs = fixtures()
    assert len(fxs) >= 60
    positives = sum(1 for f in fxs if f.collides)
    assert positives >= 20
    assert any(f.query.kind == "edge-edge" for f in fxs)
    for f in fxs:
        assert ccd_oracle(f.query) is f.collides


def test_run_ccd_benchmark_counts():
    dataset = [(f.query, f.collides) for f in fixtures()[:12]]
    rows = run_ccd_benchmark(dataset, [PS], delta=1e-6, methods=("univariate",))
    (row,) = rows
    assert row.queries == 12
    assert row.false_negatives == 0
    assert row.hits >= sum(1 for _, c in dataset if c)
    assert row.total_ms > 0.0


def test_run_ccd_benchmark_uses_oracle_for_unlabeled():
    dataset = [(CROSSING, None), (MISSING, None)]
    rows = run_ccd_benchmark(dataset, [PS], methods=("univariate",))
    assert rows[0].hits == 1
    assert rows[0].false_positives == 0 and rows[0].false_negatives == 0


def test_run_ccd_benchmark_counts_injected_mislabels():
    # flip the truth labels: real hit -> fp, real miss w/ reported hit -> none
    dataset = [(CROSSING, False), (MISSING, True)]
    rows = run_ccd_benchmark(dataset, [PS], methods=("univariate",))
    (row,) = rows
    assert row.false_positives == 1
    assert row.false_negatives == 1


def test_query_io_roundtrip(tmp_path):
    entries = [(f.query, f.collides) for f in fixtures()[:8]] + [(CROSSING, None)]
    path = tmp_path / "queries.csv"
    save_queries(entries, str(path))
    loaded = load_queries(str(path))
    assert loaded == entries


def test_load_queries_errors(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("vertex-face,1,2\n")
    with pytest.raises(UsageError) as info:
        load_queries(str(path))
    assert "bad.csv:1" in str(info.value)
    path.write_text("no-such-kind," + ",".join(["0.0"] * 24) + ",1\n")
    with pytest.raises(UsageError):
        load_queries(str(path))
    path.write_text("vertex-face," + ",".join(["0.0"] * 23) + ",nan,1\n")
    with pytest.raises(UsageError):
        load_queries(str(path))


def test_load_queries_hexfloat(tmp_path):
    path = tmp_path / "hex.csv"
    coords = ["0x1.8p-1"] + ["0.0"] * 23
    path.write_text("vertex-face," + ",".join(coords) + ",?\n")
    (entry,) = load_queries(str(path))
    assert entry[0].start[0][0] == 0.75
    assert entry[1] is None


def test_save_ccd_report(tmp_path):
    dataset = [(f.query, f.collides) for f in fixtures()[:6]]
    rows = run_ccd_benchmark(dataset, [PS, MULT], methods=("univariate",))
    out = tmp_path / "report.csv"
    save_ccd_report(rows, str(out))
    lines = out.read_text().splitlines()
    assert lines[0] == "method,strategy,queries,hits,false_positives,false_negatives,total_ms"
    assert len(lines) == 3
