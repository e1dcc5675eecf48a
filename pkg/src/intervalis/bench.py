"""Benchmark harness: correctness, interval-size and timing runs.

Correctness classifies every evaluated interval against the rational
oracle; width runs measure exact interval sizes in ulps of the
round-to-nearest reference value; timing runs execute generated
straight-line evaluators so per-node interpreter overhead does not
drown the strategies being compared.  Reports are byte-deterministic
functions of their rows.
"""

from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import dataclass
from multiprocessing import Pool
from typing import Callable, Iterable, Mapping, Sequence

from .errors import (
    DivisorContainsZero,
    ExprDomainError,
    IncompleteData,
    UnboundedInterval,
)
from .expr import (
    Binary,
    Const,
    CorpusEntry,
    CORPUS_CLASSES,
    Expr,
    Unary,
    Var,
    builtin_corpus,
    eval_float,
    eval_interval,
    gen_inputs,
)
from .floatbits import MAX_FINITE, MIN_SUBNORMAL, Rational, decompose
from .interval import (
    MULTIPLICATIVE,
    PRED_SUCC,
    UNWIDENED,
    Strategy,
    cos_core,
    exp_core,
    sin_core,
    sqrt_core,
)
from .rational import Verdict, check_containment, width_exact

_MIN_NORMAL = 2.2250738585072014e-308

# Sentinel buckets for widths with no finite log2 ulp count; real buckets
# stay within +-1130 or so, far inside the sentinels.
ZERO_BUCKET = -(1 << 20)
UNBOUNDED_BUCKET = 1 << 20


@dataclass(frozen=True, slots=True)
class CorrectnessRow:
    """Oracle verdict counts for one corpus entry under one strategy."""

    expr_id: str
    strategy: str
    inputs_tested: int
    contained: int
    violated: int
    undecided: int
    domain_errors: int

    def __post_init__(self) -> None:
        total = self.contained + self.violated + self.undecided + self.domain_errors
        if total != self.inputs_tested:
            raise ValueError(
                f"verdict counts sum to {total}, expected {self.inputs_tested}"
            )


@dataclass(frozen=True, slots=True)
class WidthHistogram:
    """Distribution of exact interval widths for one entry and strategy.

    Bucket b holds widths w with floor(log2(w / ulp(reference))) == b where
    the reference is the round-to-nearest evaluation of the same input.
    Zero-width and unbounded intervals are counted separately.
    """

    expr_id: str
    strategy: str
    buckets: dict[int, int]
    exact_zero_count: int
    unbounded_count: int

    @property
    def total(self) -> int:
        return sum(self.buckets.values()) + self.exact_zero_count + self.unbounded_count

    def median_bucket(self) -> int:
        """Lower median bucket; zero widths count as ZERO_BUCKET and
        unbounded ones as UNBOUNDED_BUCKET so they sort below/above all
        real buckets."""
        merged = dict(self.buckets)
        if self.exact_zero_count:
            merged[ZERO_BUCKET] = merged.get(ZERO_BUCKET, 0) + self.exact_zero_count
        if self.unbounded_count:
            merged[UNBOUNDED_BUCKET] = (
                merged.get(UNBOUNDED_BUCKET, 0) + self.unbounded_count
            )
        return _multiset_median(merged)


@dataclass(frozen=True, slots=True)
class TimingRow:
    """Wall-clock total for reps_per_input evaluations of inputs inputs."""

    expr_id: str
    strategy: str
    inputs: int
    reps_per_input: int
    total_ms: float

    def __post_init__(self) -> None:
        if not self.total_ms >= 0.0:
            raise ValueError(f"negative timing total {self.total_ms!r}")


def _multiset_median(counts: Mapping[int, int]) -> int:
    if not counts:
        raise ValueError("median of an empty histogram")
    total = sum(counts.values())
    k = (total - 1) // 2
    seen = 0
    for key in sorted(counts):
        seen += counts[key]
        if seen > k:
            return key
    raise AssertionError("unreachable")


def _floor_log2(q: Rational) -> int:
    """Exact floor(log2(q)) for a positive rational."""
    n = q.numerator
    d = q.denominator
    k = n.bit_length() - d.bit_length()
    if k >= 0:
        return k if n >= d << k else k - 1
    return k if n << -k >= d else k - 1


def width_bucket(iv, e: Expr, env: Mapping[str, float]) -> int:
    """Histogram bucket of iv's exact width: ZERO_BUCKET, UNBOUNDED_BUCKET,
    or floor(log2(width / ulp(reference)))."""
    try:
        w = width_exact(iv)
    except UnboundedInterval:
        return UNBOUNDED_BUCKET
    if w == 0:
        return ZERO_BUCKET
    ref = eval_float(e, env)
    if not math.isfinite(ref):
        # Overflowed reference; anchor the ulp at the interval itself.
        ref = max(abs(iv.lo), abs(iv.hi))
    return _floor_log2(w / decompose(math.ulp(ref)))


def _correctness_task(
    task: tuple[CorpusEntry, tuple[Strategy, ...], int, int]
) -> list[CorrectnessRow]:
    entry, strategies, n_inputs, seed = task
    tuples = gen_inputs(seed, entry, n_inputs)
    names = entry.var_names
    rows = []
    for s in strategies:
        contained = violated = undecided = domain_errors = 0
        for tup in tuples:
            env = dict(zip(names, tup))
            try:
                iv = eval_interval(entry.expr, env, s)
            except ExprDomainError:
                domain_errors += 1
                continue
            verdict = check_containment(iv, entry.expr, env)
            if verdict is Verdict.CONTAINED:
                contained += 1
            elif verdict is Verdict.VIOLATED:
                violated += 1
            else:
                undecided += 1
        rows.append(
            CorrectnessRow(
                entry.id, s.name, len(tuples), contained, violated, undecided,
                domain_errors,
            )
        )
    return rows


def _width_task(
    task: tuple[CorpusEntry, tuple[Strategy, ...], int, int]
) -> list[WidthHistogram]:
    entry, strategies, n_inputs, seed = task
    tuples = gen_inputs(seed, entry, n_inputs)
    names = entry.var_names
    rows = []
    for s in strategies:
        buckets: dict[int, int] = {}
        zero = unbounded = 0
        for tup in tuples:
            env = dict(zip(names, tup))
            iv = eval_interval(entry.expr, env, s)
            b = width_bucket(iv, entry.expr, env)
            if b == ZERO_BUCKET:
                zero += 1
            elif b == UNBOUNDED_BUCKET:
                unbounded += 1
            else:
                buckets[b] = buckets.get(b, 0) + 1
        rows.append(WidthHistogram(entry.id, s.name, buckets, zero, unbounded))
    return rows


def _run_sharded(
    worker: Callable,
    corpus: Sequence[CorpusEntry],
    strategies: Iterable[Strategy],
    n_inputs: int,
    seed: int,
    jobs: int,
) -> list:
    if n_inputs < 1:
        raise ValueError(f"n_inputs must be >= 1, got {n_inputs}")
    tasks = [(entry, tuple(strategies), n_inputs, seed) for entry in corpus]
    if jobs > 1 and len(tasks) > 1:
        # Shard by entry; map preserves corpus order, so merged output is
        # identical to the sequential run.
        with Pool(min(jobs, len(tasks))) as pool:
            per_entry = pool.map(worker, tasks)
    else:
        per_entry = [worker(t) for t in tasks]
    return [row for rows in per_entry for row in rows]


def run_correctness(
    corpus: Sequence[CorpusEntry],
    strategies: Iterable[Strategy],
    n_inputs: int,
    seed: int,
    jobs: int = 1,
) -> list[CorrectnessRow]:
    """Classify every entry x strategy x input against the oracle.

    Domain errors raised by interval evaluation are counted, never thrown.
    Deterministic given (corpus, seed, n_inputs).
    """
    return _run_sharded(_correctness_task, corpus, strategies, n_inputs, seed, jobs)


def run_width(
    corpus: Sequence[CorpusEntry],
    strategies: Iterable[Strategy],
    n_inputs: int,
    seed: int,
    jobs: int = 1,
) -> list[WidthHistogram]:
    """Exact width histograms, bucketed in ulps of the reference value."""
    return _run_sharded(_width_task, corpus, strategies, n_inputs, seed, jobs)


# ---------------------------------------------------------------------------
# Generated evaluators for timing runs.
#
# eval_interval pays for AST dispatch and an Interval allocation per node;
# a timing run would mostly measure that overhead. compile_evaluator emits
# the same arithmetic as straight-line code (widening inlined per strategy,
# transcendental cores called directly), bit-identical to eval_interval on
# inputs that satisfy the generator's validity margins.
# ---------------------------------------------------------------------------

_NS_CONSTS = {
    "_NA": math.nextafter,
    "_PINF": math.inf,
    "_NINF": -math.inf,
    "_SMIN": MIN_SUBNORMAL,
    "_NSMIN": -MIN_SUBNORMAL,
    "_FMAX": MAX_FINITE,
    "_NFMAX": -MAX_FINITE,
    "_MN": _MIN_NORMAL,
    "_NMN": -_MIN_NORMAL,
    "_SQC": sqrt_core,
    "_EXC": exp_core,
    "_SNC": sin_core,
    "_CSC": cos_core,
    "_DCZ": DivisorContainsZero,
}

_ALIASES = (
    "na = _NA", "INF = _PINF", "NINF = _NINF", "MS = _SMIN", "NMS = _NSMIN",
    "FMAX = _FMAX", "NFMAX = _NFMAX", "MN = _MN", "NMN = _NMN", "SQ = _SQC",
    "EX = _EXC", "SN = _SNC", "CS = _CSC", "DCZ = _DCZ",
)


class _Emitter:
    """Accumulates the straight-line body for one expression and strategy."""

    def __init__(self, strategy: Strategy):
        if strategy.kind not in (PRED_SUCC, MULTIPLICATIVE, UNWIDENED):
            raise ValueError(f"unknown strategy kind {strategy.kind!r}")
        self.kind = strategy.kind
        self.lines: list[str] = []
        self.consts: list[float] = []
        self.counter = 0

    def _next(self) -> int:
        self.counter += 1
        return self.counter

    def put(self, text: str, depth: int = 0) -> None:
        self.lines.append("    " * depth + text)

    def _down(self, dst: str, raw: str, i: int) -> None:
        if self.kind == PRED_SUCC:
            self.put(f"{dst} = {raw}")
            self.put(f"if {dst} == 0.0:")
            self.put(f"{dst} = NMS", 1)
            self.put(f"elif {dst} != NINF:")
            self.put(f"{dst} = na({dst}, NINF)", 1)
            self.put(f"if {dst} == 0.0:", 1)
            self.put(f"{dst} = 0.0", 2)
        elif self.kind == MULTIPLICATIVE:
            self.put(f"b{i} = {raw}")
            self.put(f"if b{i} == INF:")
            self.put(f"{dst} = FMAX", 1)
            self.put(f"elif b{i} > 0.0:")
            self.put(f"{dst} = b{i} * OM", 1)
            self.put(f"if b{i} < MN:", 1)
            self.put(f"{dst} = {dst} - ETA", 2)
            self.put(f"elif b{i} < 0.0:")
            self.put(f"{dst} = b{i} * OP", 1)
            self.put(f"if b{i} > NMN:", 1)
            self.put(f"{dst} = {dst} - ETA", 2)
            self.put("else:")
            self.put(f"{dst} = NETA", 1)
        else:
            self.put(f"{dst} = {raw}")
            self.put(f"if {dst} == INF:")
            self.put(f"{dst} = FMAX", 1)
            self.put(f"elif {dst} == 0.0:")
            self.put(f"{dst} = 0.0", 1)

    def _up(self, dst: str, raw: str, i: int) -> None:
        if self.kind == PRED_SUCC:
            self.put(f"{dst} = {raw}")
            self.put(f"if {dst} == 0.0:")
            self.put(f"{dst} = MS", 1)
            self.put(f"elif {dst} != INF:")
            self.put(f"{dst} = na({dst}, INF)", 1)
            self.put(f"if {dst} == 0.0:", 1)
            self.put(f"{dst} = 0.0", 2)
        elif self.kind == MULTIPLICATIVE:
            self.put(f"u{i} = {raw}")
            self.put(f"if u{i} == NINF:")
            self.put(f"{dst} = NFMAX", 1)
            self.put(f"elif u{i} > 0.0:")
            self.put(f"{dst} = u{i} * OP", 1)
            self.put(f"if u{i} < MN:", 1)
            self.put(f"{dst} = {dst} + ETA", 2)
            self.put(f"elif u{i} < 0.0:")
            self.put(f"{dst} = u{i} * OM", 1)
            self.put(f"if u{i} > NMN:", 1)
            self.put(f"{dst} = {dst} + ETA", 2)
            self.put("else:")
            self.put(f"{dst} = ETA", 1)
        else:
            self.put(f"{dst} = {raw}")
            self.put(f"if {dst} == NINF:")
            self.put(f"{dst} = NFMAX", 1)
            self.put(f"elif {dst} == 0.0:")
            self.put(f"{dst} = 0.0", 1)

    def _four_guarded(self, op: str, al: str, ah: str, bl: str, bh: str) -> None:
        self.put(f"p1 = {al} {op} {bl}")
        self.put(f"p2 = {al} {op} {bh}")
        self.put(f"p3 = {ah} {op} {bl}")
        self.put(f"p4 = {ah} {op} {bh}")
        for p in ("p1", "p2", "p3", "p4"):
            self.put(f"if {p} != {p}:")
            self.put(f"{p} = 0.0", 1)

    def node(self, e: Expr) -> tuple[str, str]:
        if isinstance(e, Var):
            return f"v_{e.name}", f"v_{e.name}"
        if isinstance(e, Const):
            v = e.value
            self.consts.append(v + 0.0 if v == 0.0 else v)
            k = f"k{len(self.consts) - 1}"
            return k, k
        if isinstance(e, Unary):
            al, ah = self.node(e.arg)
            i = self._next()
            if e.op == "neg":
                self._down(f"l{i}", f"-{ah}", i)
                self._up(f"h{i}", f"-{al}", i)
            elif e.op == "sqrt":
                self.put(f"l{i}, h{i} = SQ({al}, {ah})")
            elif e.op == "exp":
                self.put(f"l{i}, h{i} = EX({al}, {ah})")
            elif e.op == "sin":
                self.put(f"l{i}, h{i} = SN({al}, {ah})")
            else:
                self.put(f"l{i}, h{i} = CS({al}, {ah})")
            return f"l{i}", f"h{i}"
        assert isinstance(e, Binary)
        al, ah = self.node(e.left)
        bl, bh = self.node(e.right)
        i = self._next()
        if e.op == "+":
            self._down(f"l{i}", f"{al} + {bl}", i)
            self._up(f"h{i}", f"{ah} + {bh}", i)
        elif e.op == "-":
            self._down(f"l{i}", f"{al} - {bh}", i)
            self._up(f"h{i}", f"{ah} - {bl}", i)
        elif e.op == "*":
            self._four_guarded("*", al, ah, bl, bh)
            self._down(f"l{i}", "min(p1, p2, p3, p4)", i)
            self._up(f"h{i}", "max(p1, p2, p3, p4)", i)
        else:
            self.put(f"if not ({bl} > 0.0 or {bh} < 0.0):")
            self.put("raise DCZ('divisor interval contains zero')", 1)
            self._four_guarded("/", al, ah, bl, bh)
            self._down(f"l{i}", "min(p1, p2, p3, p4)", i)
            self._up(f"h{i}", "max(p1, p2, p3, p4)", i)
        return f"l{i}", f"h{i}"


def _build(
    expr: Expr, strategy: Strategy, var_order: Sequence[str], loop: bool
) -> Callable:
    em = _Emitter(strategy)
    rl, rh = em.node(expr)
    unpack = ", ".join(f"v_{v}" for v in var_order)
    alias = list(_ALIASES)
    if strategy.kind == MULTIPLICATIVE:
        alias += ["OM = _OM", "OP = _OP", "ETA = _ETA", "NETA = _NETA"]
    alias += [f"k{i} = _K[{i}]" for i in range(len(em.consts))]
    out = []
    if loop:
        out.append("def _fn(inputs, reps):")
        out += [f"    {a}" for a in alias]
        out.append("    acc = 0.0")
        out.append("    for _ in range(reps):")
        out.append(f"        for ({unpack},) in inputs:" if len(var_order) == 1
                   else f"        for ({unpack}) in inputs:")
        out += [f"            {ln}" for ln in em.lines]
        out.append(f"            acc = acc + {rl} + {rh}")
        out.append("    return acc")
    else:
        out.append("def _fn(tup):")
        out += [f"    {a}" for a in alias]
        if var_order:
            pack = unpack if len(var_order) > 1 else unpack + ","
            out.append(f"    ({pack}) = tup")
        out += [f"    {ln}" for ln in em.lines]
        out.append(f"    return {rl}, {rh}")
    ns = dict(_NS_CONSTS)
    ns["_K"] = tuple(em.consts)
    if strategy.kind == MULTIPLICATIVE:
        ns["_OM"] = 1.0 - strategy.eps
        ns["_OP"] = 1.0 + strategy.eps
        ns["_ETA"] = strategy.eta
        ns["_NETA"] = -strategy.eta
    exec(compile("\n".join(out), "<interval-evaluator>", "exec"), ns)
    return ns["_fn"]


def compile_evaluator(
    expr: Expr, strategy: Strategy, var_order: Sequence[str]
) -> Callable[[Sequence[tuple], int], float]:
    """Timing loop (inputs, reps) -> accumulator over all evaluations.

    Inputs are tuples ordered like var_order and must satisfy the input
    generator's validity margins; domain failures surface as the raw core
    errors rather than ExprDomainError.
    """
    return _build(expr, strategy, var_order, loop=True)


def compile_pointwise(
    expr: Expr, strategy: Strategy, var_order: Sequence[str]
) -> Callable[[tuple], tuple[float, float]]:
    """Single-input variant of compile_evaluator returning (lo, hi);
    exists so tests can compare the generated code against eval_interval
    bit for bit."""
    return _build(expr, strategy, var_order, loop=False)


_sink = 0.0


def sink_value() -> float:
    """Running accumulator over all timed evaluations. Its numeric value is
    meaningless; it exists so the timed work has an observable effect."""
    return _sink


def run_timing(
    corpus: Sequence[CorpusEntry],
    strategies: Iterable[Strategy],
    n_inputs: int = 1000,
    reps: int = 10000,
    seed: int = 0,
) -> list[TimingRow]:
    """Wall-clock totals for reps evaluations of n_inputs inputs per entry
    and strategy, cycling through the input set on every rep.

    Single-threaded by contract. One warmup pass over the inputs precedes
    each measurement; every result feeds the sink accumulator.
    """
    global _sink
    if n_inputs < 1 or reps < 1:
        raise ValueError(f"need n_inputs >= 1 and reps >= 1, got {n_inputs}, {reps}")
    rows = []
    for entry in corpus:
        tuples = gen_inputs(seed, entry, n_inputs)
        for s in strategies:
            fn = compile_evaluator(entry.expr, s, entry.var_names)
            fn(tuples, 1)
            t0 = time.perf_counter()
            acc = fn(tuples, reps)
            total_ms = (time.perf_counter() - t0) * 1000.0
            _sink += acc if acc == acc else 0.0
            rows.append(TimingRow(entry.id, s.name, n_inputs, reps, total_ms))
    return rows


# ---------------------------------------------------------------------------
# Report emission and the summary table.
# ---------------------------------------------------------------------------

_CORRECTNESS_HEADER = (
    "expr_id", "strategy", "inputs", "contained", "violated", "undecided",
    "domain_errors",
)
_WIDTH_HEADER = ("expr_id", "strategy", "bucket_log2_ulp", "count")
_TIMING_HEADER = ("expr_id", "strategy", "inputs", "reps", "total_ms")


def _csv_rows(rows: Sequence) -> tuple[tuple[str, ...], list[tuple]]:
    kind = type(rows[0])
    if kind is CorrectnessRow:
        data = [
            (r.expr_id, r.strategy, r.inputs_tested, r.contained, r.violated,
             r.undecided, r.domain_errors)
            for r in sorted(rows, key=lambda r: (r.expr_id, r.strategy))
        ]
        return _CORRECTNESS_HEADER, data
    if kind is WidthHistogram:
        data = []
        for r in sorted(rows, key=lambda r: (r.expr_id, r.strategy)):
            for b in sorted(r.buckets):
                data.append((r.expr_id, r.strategy, b, r.buckets[b]))
            if r.exact_zero_count:
                data.append((r.expr_id, r.strategy, "exact_zero", r.exact_zero_count))
            if r.unbounded_count:
                data.append((r.expr_id, r.strategy, "unbounded", r.unbounded_count))
        return _WIDTH_HEADER, data
    if kind is TimingRow:
        data = [
            (r.expr_id, r.strategy, r.inputs, r.reps_per_input, repr(r.total_ms))
            for r in sorted(rows, key=lambda r: (r.expr_id, r.strategy))
        ]
        return _TIMING_HEADER, data
    raise ValueError(f"cannot report rows of type {kind.__name__}")


def _json_payload(rows: Sequence, config: Mapping | None) -> dict:
    kind = type(rows[0])
    if kind is CorrectnessRow:
        name = "correctness"
        body = [
            {"expr_id": r.expr_id, "strategy": r.strategy,
             "inputs": r.inputs_tested, "contained": r.contained,
             "violated": r.violated, "undecided": r.undecided,
             "domain_errors": r.domain_errors}
            for r in sorted(rows, key=lambda r: (r.expr_id, r.strategy))
        ]
    elif kind is WidthHistogram:
        name = "width"
        body = [
            {"expr_id": r.expr_id, "strategy": r.strategy,
             "buckets": {str(b): c for b, c in r.buckets.items()},
             "exact_zero_count": r.exact_zero_count,
             "unbounded_count": r.unbounded_count}
            for r in sorted(rows, key=lambda r: (r.expr_id, r.strategy))
        ]
    elif kind is TimingRow:
        name = "timing"
        body = [
            {"expr_id": r.expr_id, "strategy": r.strategy, "inputs": r.inputs,
             "reps": r.reps_per_input, "total_ms": r.total_ms}
            for r in sorted(rows, key=lambda r: (r.expr_id, r.strategy))
        ]
    else:
        raise ValueError(f"cannot report rows of type {kind.__name__}")
    return {"kind": name, "config": dict(config) if config else {}, "rows": body}


def emit_report(
    rows: Sequence, fmt: str, destination, config: Mapping | None = None
) -> None:
    """Write rows to destination as csv or json (with config echo).

    Byte-deterministic: rows are canonically sorted by (expr_id, strategy)
    and all serialization is platform-independent. I/O errors propagate
    with the path in the message.
    """
    if not rows:
        raise ValueError("no rows to report")
    if any(type(r) is not type(rows[0]) for r in rows):
        raise ValueError("mixed row types in one report")
    if fmt == "csv":
        header, data = _csv_rows(rows)
        with open(destination, "w", encoding="utf-8", newline="") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(header)
            w.writerows(data)
    elif fmt == "json":
        payload = _json_payload(rows, config)
        with open(destination, "w", encoding="utf-8", newline="") as f:
            f.write(json.dumps(payload, indent=2, sort_keys=True))
            f.write("\n")
    else:
        raise ValueError(f"unknown report format {fmt!r}")


def summarize(rows: Iterable, corpus: Sequence[CorpusEntry] | None = None) -> str:
    """Fold correctness, width and timing rows into a per-strategy table.

    Columns: pass/fail per corpus class (pass means no Violated and no
    Undecided verdicts), width rank and speed rank (1 = tightest/fastest,
    ties broken by strategy name). All three row kinds must be present and
    cover the same strategies, else IncompleteData.
    """
    correctness = [r for r in rows if isinstance(r, CorrectnessRow)]
    widths = [r for r in rows if isinstance(r, WidthHistogram)]
    timings = [r for r in rows if isinstance(r, TimingRow)]
    for name, section in (
        ("correctness", correctness), ("width", widths), ("timing", timings)
    ):
        if not section:
            raise IncompleteData(f"no {name} rows to summarize")
    strategies = {r.strategy for r in correctness}
    if {r.strategy for r in widths} != strategies or {
        r.strategy for r in timings
    } != strategies:
        raise IncompleteData("row sections cover different strategy sets")

    if corpus is None:
        corpus = builtin_corpus()
    cls_of = {entry.id: entry.cls for entry in corpus}
    classes = [
        c for c in CORPUS_CLASSES
        if any(cls_of.get(r.expr_id, "unknown") == c for r in correctness)
    ]
    if any(r.expr_id not in cls_of for r in correctness):
        classes.append("unknown")

    passes: dict[tuple[str, str], bool] = {}
    for r in correctness:
        key = (r.strategy, cls_of.get(r.expr_id, "unknown"))
        ok = r.violated == 0 and r.undecided == 0
        passes[key] = passes.get(key, True) and ok

    width_score: dict[str, int] = {}
    for s in strategies:
        merged: dict[int, int] = {}
        for r in widths:
            if r.strategy != s:
                continue
            for b, c in r.buckets.items():
                merged[b] = merged.get(b, 0) + c
            if r.exact_zero_count:
                merged[ZERO_BUCKET] = merged.get(ZERO_BUCKET, 0) + r.exact_zero_count
            if r.unbounded_count:
                merged[UNBOUNDED_BUCKET] = (
                    merged.get(UNBOUNDED_BUCKET, 0) + r.unbounded_count
                )
        width_score[s] = _multiset_median(merged)
    speed_score = {
        s: sum(r.total_ms for r in timings if r.strategy == s) for s in strategies
    }
    width_rank = {
        s: i + 1
        for i, s in enumerate(sorted(strategies, key=lambda s: (width_score[s], s)))
    }
    speed_rank = {
        s: i + 1
        for i, s in enumerate(sorted(strategies, key=lambda s: (speed_score[s], s)))
    }

    header = ["strategy", *classes, "width_rank", "speed_rank"]
    lines = [header]
    for s in sorted(strategies):
        cells = [s]
        for c in classes:
            mark = passes.get((s, c))
            cells.append("-" if mark is None else ("pass" if mark else "fail"))
        cells.append(str(width_rank[s]))
        cells.append(str(speed_rank[s]))
        lines.append(cells)
    cols = [max(len(row[i]) for row in lines) for i in range(len(header))]
    return "\n".join(
        "  ".join(cell.ljust(w) for cell, w in zip(row, cols)).rstrip()
        for row in lines
    ) + "\n"
