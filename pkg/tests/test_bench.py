"""Benchmark harness: verdict counting, width histograms, timing, reports."""

import json
import math

import pytest

from intervalis import (
    CorrectnessRow,
    IncompleteData,
    Interval,
    Strategy,
    TimingRow,
    make_point,
    summarize,
)
from intervalis.bench import (
    UNBOUNDED_BUCKET,
    ZERO_BUCKET,
    compile_pointwise,
    emit_report,
    run_correctness,
    run_timing,
    run_width,
    width_bucket,
)
from intervalis.expr import eval_interval, gen_inputs, parse

PS = Strategy.pred_succ()
MULT = Strategy.multiplicative()
UNW = Strategy.unwidened()


def pick(corpus, *ids):
    by_id = {e.id: e for e in corpus}
    return [by_id[i] for i in ids]


def test_row_invariants():
    CorrectnessRow("add", "pred-succ", 10, 9, 0, 1, 0)
    with pytest.raises(ValueError):
        CorrectnessRow("add", "pred-succ", 10, 9, 0, 0, 0)
    with pytest.raises(ValueError):
        TimingRow("add", "pred-succ", 10, 100, -1.0)


def test_width_bucket_examples():
    e = parse("a")
    env = {"a": 1.0}
    assert width_bucket(make_point(1.0), e, env) == ZERO_BUCKET
    assert width_bucket(Interval(1.0, math.inf), e, env) == UNBOUNDED_BUCKET
    # width exactly one ulp of the reference -> bucket 0
    assert width_bucket(Interval(1.0, 1.0 + 2.0**-52), e, env) == 0
    # two ulps -> bucket 1
    assert width_bucket(Interval(1.0 - 2.0**-52, 1.0 + 2.0**-52), e, env) == 1


def test_run_correctness_small(corpus):
    entries = pick(corpus, "add", "mul", "sine_order3")
    rows = run_correctness(entries, [PS, MULT], 40, seed=1)
    assert len(rows) == 6
    assert {r.expr_id for r in rows} == {"add", "mul", "sine_order3"}
    for r in rows:
        assert r.violated == 0 and r.undecided == 0
        assert r.contained + r.domain_errors == 40


def test_run_correctness_deterministic_and_sharded(corpus):
    entries = pick(corpus, "add", "random3")
    a = run_correctness(entries, [PS], 25, seed=9, jobs=1)
    b = run_correctness(entries, [PS], 25, seed=9, jobs=1)
    c = run_correctness(entries, [PS], 25, seed=9, jobs=3)
    assert a == b == c


def test_run_correctness_flags_unwidened(corpus):
    entries = pick(corpus, "arith2")
    rows = run_correctness(entries, [UNW], 300, seed=0)
    assert rows[0].violated > 0


def test_run_width_identity_and_single_add(corpus):
    ident = [e for e in corpus if e.id == "add"][0]
    rows = run_width([ident], [PS], 60, seed=2)
    (h,) = rows
    assert h.total == 60
    # single widened addition: at most a few ulps of the reference
    assert h.unbounded_count == 0
    assert all(b <= 2 for b in h.buckets)
    assert h.median_bucket() <= 2


def test_width_median_ordering(corpus):
    entries = pick(corpus, "arith3", "arith7")
    ps_rows = run_width(entries, [PS], 200, seed=3)
    mult_rows = run_width(entries, [MULT], 200, seed=3)
    for p, m in zip(ps_rows, mult_rows):
        assert p.expr_id == m.expr_id
        assert m.median_bucket() >= p.median_bucket()


def test_compile_pointwise_matches_eval_interval(corpus):
    for entry in pick(corpus, "arith2", "random1", "sine_order3"):
        for s in (PS, MULT):
            fn = compile_pointwise(entry.expr, s, entry.var_names)
            for tup in gen_inputs(11, entry, 25):
                env = dict(zip(entry.var_names, tup))
                iv = eval_interval(entry.expr, env, s)
                assert fn(tup) == (iv.lo, iv.hi)


def test_run_timing_shape(corpus):
    entries = pick(corpus, "add", "sine_order3")
    rows = run_timing(entries, [PS, MULT], n_inputs=8, reps=50, seed=0)
    assert len(rows) == 4
    assert [(r.expr_id, r.strategy) for r in rows] == [
        ("add", "pred-succ"),
        ("add", "multiplicative"),
        ("sine_order3", "pred-succ"),
        ("sine_order3", "multiplicative"),
    ]
    for r in rows:
        assert r.total_ms > 0.0
        assert r.inputs == 8 and r.reps_per_input == 50
    with pytest.raises(ValueError):
        run_timing(entries, [PS], n_inputs=0, reps=1)


def test_emit_report_deterministic(tmp_path, corpus):
    rows = run_correctness(pick(corpus, "add", "mul"), [PS, MULT], 10, seed=4)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    emit_report(rows, "csv", str(a))
    emit_report(list(reversed(rows)), "csv", str(b))
    assert a.read_bytes() == b.read_bytes()
    header = a.read_text().splitlines()[0]
    assert header == "expr_id,strategy,inputs,contained,violated,undecided,domain_errors"


def test_emit_report_json_config(tmp_path, corpus):
    rows = run_width(pick(corpus, "add"), [PS], 10, seed=4)
    out = tmp_path / "w.json"
    emit_report(rows, "json", str(out), config={"seed": 4, "inputs": 10})
    payload = json.loads(out.read_text())
    assert payload["kind"] == "width"
    assert payload["config"] == {"seed": 4, "inputs": 10}
    assert payload["rows"]


def test_emit_report_rejects_bad_rows(tmp_path, corpus):
    with pytest.raises(ValueError):
        emit_report([], "csv", str(tmp_path / "x.csv"))
    crows = run_correctness(pick(corpus, "add"), [PS], 5, seed=0)
    wrows = run_width(pick(corpus, "add"), [PS], 5, seed=0)
    with pytest.raises(ValueError):
        emit_report(crows + wrows, "csv", str(tmp_path / "x.csv"))
    with pytest.raises(ValueError):
        emit_report(crows, "yaml", str(tmp_path / "x.yaml"))


def test_width_csv_bucket_order(tmp_path, corpus):
    rows = run_width(pick(corpus, "arith2"), [PS], 50, seed=5)
    out = tmp_path / "w.csv"
    emit_report(rows, "csv", str(out))
    lines = out.read_text().splitlines()
    assert lines[0] == "expr_id,strategy,bucket_log2_ulp,count"
    numeric = [int(l.split(",")[2]) for l in lines[1:] if l.split(",")[2].lstrip("-").isdigit()]
    assert numeric == sorted(numeric)


def test_summarize_table(corpus):
    entries = pick(corpus, "add", "sqrt", "arith3", "random3", "sine_order3")
    rows = (
        run_correctness(entries, [PS, MULT], 20, seed=6)
        + run_width(entries, [PS, MULT], 20, seed=6)
        + run_timing(entries, [PS, MULT], n_inputs=5, reps=20, seed=6)
    )
    table = summarize(rows, entries)
    assert "pred-succ" in table and "multiplicative" in table
    assert "pass" in table
    assert "fail" not in table.replace("pass/fail", "")


def test_summarize_single_strategy_ranks(corpus):
    entries = pick(corpus, "add")
    rows = (
        run_correctness(entries, [PS], 10, seed=7)
        + run_width(entries, [PS], 10, seed=7)
        + run_timing(entries, [PS], n_inputs=4, reps=10, seed=7)
    )
    table = summarize(rows, entries)
    # only one strategy: both ranks collapse to 1
    line = [l for l in table.splitlines() if "pred-succ" in l][0]
    assert " 1 " in line + " "


def test_summarize_incomplete(corpus):
    entries = pick(corpus, "add")
    crows = run_correctness(entries, [PS], 5, seed=8)
    wrows = run_width(entries, [PS], 5, seed=8)
    trows = run_timing(entries, [PS], n_inputs=2, reps=5, seed=8)
    with pytest.raises(IncompleteData):
        summarize(crows + wrows, entries)
    mixed = crows + wrows + run_timing(entries, [MULT], n_inputs=2, reps=5, seed=8)
    with pytest.raises(IncompleteData):
        summarize(mixed, entries)
    assert summarize(crows + wrows + trows, entries)
