"""Command-line front end.

Subcommands bind corpus generation, containment checking, width and
timing benchmarks, the collision detection harness, and verification
query export.  The exit status is the machine contract: 0 on success,
1 on verification failure (any Violated verdict or any false negative),
2 on usage or I/O errors.  Reports go to files or stdout; all progress
and summary text goes to stderr.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from typing import Sequence

from . import __version__
from .bench import (
    CorrectnessRow,
    TimingRow,
    WidthHistogram,
    emit_report,
    run_correctness,
    run_timing,
    run_width,
    summarize,
)
from .ccd import fixtures, load_queries, run_ccd_benchmark, save_ccd_report, save_queries
from .errors import IntervalisError, UsageError
from .expr import builtin_corpus, eval_interval, gen_inputs, load_corpus, save_corpus
from .floatbits import decompose
from .interval import Strategy
from .rational import VerificationQuery, export_query

_STRATEGY_FACTORIES = {
    "pred-succ": Strategy.pred_succ,
    "multiplicative": Strategy.multiplicative,
    "unwidened-test": Strategy.unwidened,
}

_CCD_METHODS = ("univariate", "multivariate")


def _note(text: str) -> None:
    print(text, file=sys.stderr)


def _resolve_seed(flag_value: int | None) -> int:
    if flag_value is not None:
        return flag_value
    raw = os.environ.get("INTERVALIS_SEED")
    if raw is None:
        return 0
    try:
        return int(raw, 0)
    except ValueError:
        raise UsageError(f"INTERVALIS_SEED must be an integer, got {raw!r}") from None


def _resolve_strategies(names: list[str] | None) -> list[Strategy]:
    picked = names or ["pred-succ", "multiplicative"]
    seen: dict[str, Strategy] = {}
    for name in picked:
        if name not in seen:
            seen[name] = _STRATEGY_FACTORIES[name]()
    return list(seen.values())


def _load_entries(path: str | None):
    return load_corpus(path) if path else builtin_corpus()


def _strategy_config(s: Strategy) -> dict:
    entry: dict = {"name": s.name}
    if s.eps:
        entry["eps"] = s.eps
        entry["eta"] = s.eta
    return entry


def _run_config(args: argparse.Namespace, seed: int, strategies, **extra) -> dict:
    config = {
        "command": args.command,
        "version": __version__,
        "seed": seed,
        "strategies": [_strategy_config(s) for s in strategies],
        "corpus": args.corpus or "builtin",
        "format": args.format,
    }
    config.update(extra)
    return config


def _cmd_corpus(args: argparse.Namespace) -> int:
    entries = _load_entries(args.corpus)
    out = args.output or "corpus.tsv"
    save_corpus(entries, out)
    _note(f"wrote {len(entries)} corpus entries to {out}")
    return 0


def _cmd_check(args: argparse.Namespace) -> int:
    entries = _load_entries(args.corpus)
    seed = _resolve_seed(args.seed)
    strategies = _resolve_strategies(args.strategy)
    rows = run_correctness(entries, strategies, args.inputs, seed, jobs=args.jobs)
    out = args.output or f"correctness.{args.format}"
    config = _run_config(args, seed, strategies, inputs=args.inputs, jobs=args.jobs,
                         output=out)
    emit_report(rows, args.format, out, config)
    violated = sum(r.violated for r in rows)
    undecided = sum(r.undecided for r in rows)
    _note(
        f"checked {len(entries)} entries x {args.inputs} inputs x "
        f"{len(strategies)} strategies: violated={violated} "
        f"undecided={undecided} -> {out}"
    )
    return 1 if violated else 0


def _cmd_width(args: argparse.Namespace) -> int:
    entries = _load_entries(args.corpus)
    seed = _resolve_seed(args.seed)
    strategies = _resolve_strategies(args.strategy)
    rows = run_width(entries, strategies, args.inputs, seed, jobs=args.jobs)
    out = args.output or f"width.{args.format}"
    config = _run_config(args, seed, strategies, inputs=args.inputs, jobs=args.jobs,
                         output=out)
    emit_report(rows, args.format, out, config)
    _note(f"width histograms for {len(rows)} entry/strategy pairs -> {out}")
    return 0


def _cmd_time(args: argparse.Namespace) -> int:
    entries = _load_entries(args.corpus)
    seed = _resolve_seed(args.seed)
    strategies = _resolve_strategies(args.strategy)
    if args.jobs != 1:
        _note("timing always runs single-worker; ignoring --jobs")
    rows = run_timing(entries, strategies, n_inputs=args.timing_inputs,
                      reps=args.reps, seed=seed)
    out = args.output or f"timing.{args.format}"
    config = _run_config(args, seed, strategies, timing_inputs=args.timing_inputs,
                         reps=args.reps, output=out)
    emit_report(rows, args.format, out, config)
    _note(
        f"timed {len(rows)} entry/strategy pairs at {args.timing_inputs} "
        f"inputs x {args.reps} reps -> {out}"
    )
    return 0


def _cmd_ccd(args: argparse.Namespace) -> int:
    if not args.delta > 0.0:
        raise UsageError(f"--delta must be positive, got {args.delta!r}")
    if args.fixtures_out:
        suite = [(f.query, f.collides) for f in fixtures()]
        save_queries(suite, args.fixtures_out)
        _note(f"wrote {len(suite)} fixture queries to {args.fixtures_out}")
        return 0
    if args.queries:
        dataset = load_queries(args.queries)
    else:
        dataset = [(f.query, f.collides) for f in fixtures()]
    strategies = _resolve_strategies(args.strategy)
    methods = tuple(dict.fromkeys(args.method or _CCD_METHODS))
    rows = run_ccd_benchmark(dataset, strategies, delta=args.delta, methods=methods)
    out = args.output or "ccd_report.csv"
    save_ccd_report(rows, out)
    for r in rows:
        _note(
            f"{r.method} / {r.strategy}: {r.queries} queries, {r.hits} hits, "
            f"fp={r.false_positives} fn={r.false_negatives} "
            f"({r.total_ms:.1f} ms)"
        )
    _note(f"ccd report -> {out}")
    return 1 if any(r.false_negatives for r in rows) else 0


def _cmd_export_queries(args: argparse.Namespace) -> int:
    entries = _load_entries(args.corpus)
    seed = _resolve_seed(args.seed)
    strategies = _resolve_strategies(args.strategy)
    lines = []
    skipped = 0
    for entry in entries:
        for tup in gen_inputs(seed, entry, args.inputs):
            env = dict(zip(entry.var_names, tup))
            rat_env = {name: decompose(v) for name, v in env.items()}
            for s in strategies:
                iv = eval_interval(entry.expr, env, s)
                if math.isinf(iv.lo) or math.isinf(iv.hi):
                    skipped += 1
                    continue
                q = VerificationQuery(entry.expr, rat_env,
                                      decompose(iv.lo), decompose(iv.hi))
                lines.append(export_query(q))
    text = "\n".join(lines) + "\n"
    if args.output and args.output != "-":
        with open(args.output, "w", encoding="ascii", newline="") as f:
            f.write(text)
        _note(f"wrote {len(lines)} verification queries to {args.output}")
    else:
        sys.stdout.write(text)
    if skipped:
        _note(f"skipped {skipped} unbounded intervals")
    return 0


def _load_report(path: str, expect: str) -> list:
    with open(path, "r", encoding="utf-8") as f:
        text = f.read()
    if text.lstrip().startswith("{"):
        return _rows_from_json(path, text, expect)
    return _rows_from_csv(path, text, expect)


def _rows_from_json(path: str, text: str, expect: str) -> list:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: not valid JSON: {exc}") from exc
    if payload.get("kind") != expect:
        raise UsageError(
            f"{path}: expected a {expect} report, got {payload.get('kind')!r}"
        )
    try:
        if expect == "correctness":
            return [
                CorrectnessRow(r["expr_id"], r["strategy"], r["inputs"],
                               r["contained"], r["violated"], r["undecided"],
                               r["domain_errors"])
                for r in payload["rows"]
            ]
        if expect == "width":
            return [
                WidthHistogram(r["expr_id"], r["strategy"],
                               {int(b): c for b, c in r["buckets"].items()},
                               r["exact_zero_count"], r["unbounded_count"])
                for r in payload["rows"]
            ]
        return [
            TimingRow(r["expr_id"], r["strategy"], r["inputs"], r["reps"],
                      r["total_ms"])
            for r in payload["rows"]
        ]
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"{path}: malformed {expect} rows: {exc}") from exc


_CSV_HEADERS = {
    "correctness": "expr_id,strategy,inputs,contained,violated,undecided,domain_errors",
    "width": "expr_id,strategy,bucket_log2_ulp,count",
    "timing": "expr_id,strategy,inputs,reps,total_ms",
}


def _rows_from_csv(path: str, text: str, expect: str) -> list:
    records = list(csv.reader(text.splitlines()))
    if not records or ",".join(records[0]) != _CSV_HEADERS[expect]:
        raise UsageError(f"{path}: missing the {expect} report header")
    try:
        if expect == "correctness":
            return [
                CorrectnessRow(r[0], r[1], int(r[2]), int(r[3]), int(r[4]),
                               int(r[5]), int(r[6]))
                for r in records[1:]
            ]
        if expect == "width":
            return _histograms_from_csv(records[1:])
        return [
            TimingRow(r[0], r[1], int(r[2]), int(r[3]), float(r[4]))
            for r in records[1:]
        ]
    except (IndexError, ValueError) as exc:
        raise UsageError(f"{path}: malformed {expect} rows: {exc}") from exc


def _histograms_from_csv(records: list) -> list[WidthHistogram]:
    acc: dict[tuple[str, str], dict] = {}
    for r in records:
        slot = acc.setdefault(
            (r[0], r[1]), {"buckets": {}, "exact_zero": 0, "unbounded": 0}
        )
        if r[2] == "exact_zero":
            slot["exact_zero"] = int(r[3])
        elif r[2] == "unbounded":
            slot["unbounded"] = int(r[3])
        else:
            slot["buckets"][int(r[2])] = int(r[3])
    return [
        WidthHistogram(eid, strat, slot["buckets"], slot["exact_zero"],
                       slot["unbounded"])
        for (eid, strat), slot in acc.items()
    ]


def _cmd_summarize(args: argparse.Namespace) -> int:
    rows = (
        _load_report(args.correctness, "correctness")
        + _load_report(args.width, "width")
        + _load_report(args.timing, "timing")
    )
    entries = _load_entries(args.corpus)
    sys.stdout.write(summarize(rows, entries) + "\n")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="intervalis",
        description="Self-verifying interval arithmetic benchmarks.",
    )
    sub = top.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser, jobs: bool = False) -> None:
        p.add_argument("--seed", type=int, default=None,
                       help="RNG seed (default: $INTERVALIS_SEED or 0)")
        p.add_argument("--strategy", action="append",
                       choices=sorted(_STRATEGY_FACTORIES),
                       help="repeatable; default pred-succ and multiplicative")
        p.add_argument("--corpus", default=None,
                       help="corpus TSV file (default: builtin corpus)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--output", default=None,
                       help="report destination (default: <command>.<format>)")
        if jobs:
            p.add_argument("--jobs", type=int, default=1,
                           help="worker processes for sharded runs")

    p = sub.add_parser("corpus", help="write the expression corpus as TSV")
    p.add_argument("--corpus", default=None, help="re-emit an existing corpus file")
    p.add_argument("--output", default=None, help="destination (default corpus.tsv)")
    p.set_defaults(func=_cmd_corpus)

    p = sub.add_parser("check", help="containment verification against the oracle")
    add_common(p, jobs=True)
    p.add_argument("--inputs", type=int, default=10_000,
                   help="inputs per entry (default 10000)")
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("width", help="interval width histograms")
    add_common(p, jobs=True)
    p.add_argument("--inputs", type=int, default=10_000,
                   help="inputs per entry (default 10000)")
    p.set_defaults(func=_cmd_width)

    p = sub.add_parser("time", help="evaluation timing per entry and strategy")
    add_common(p, jobs=True)
    p.add_argument("--timing-inputs", type=int, default=100,
                   help="distinct inputs per entry (default 100; 1000 matches "
                        "the published protocol)")
    p.add_argument("--reps", type=int, default=1_000,
                   help="repetitions per input (default 1000; 10000 matches "
                        "the published protocol)")
    p.set_defaults(func=_cmd_time)

    p = sub.add_parser("ccd", help="continuous collision detection benchmark")
    p.add_argument("--strategy", action="append",
                   choices=sorted(_STRATEGY_FACTORIES))
    p.add_argument("--method", action="append", choices=_CCD_METHODS,
                   help="repeatable; default both methods")
    p.add_argument("--delta", type=float, default=1e-6,
                   help="bisection tolerance (default 1e-6)")
    p.add_argument("--queries", default=None,
                   help="query dataset CSV (default: builtin fixture suite)")
    p.add_argument("--fixtures-out", default=None,
                   help="write the fixture suite as a dataset CSV and exit")
    p.add_argument("--output", default=None,
                   help="report destination (default ccd_report.csv)")
    p.set_defaults(func=_cmd_ccd)

    p = sub.add_parser("export-queries",
                       help="emit exact containment inequalities for external "
                            "re-checking")
    add_common(p)
    p.add_argument("--inputs", type=int, default=3,
                   help="inputs per entry (default 3)")
    p.set_defaults(func=_cmd_export_queries)

    p = sub.add_parser("summarize", help="cross-strategy summary table")
    p.add_argument("--correctness", required=True, help="correctness report path")
    p.add_argument("--width", required=True, help="width report path")
    p.add_argument("--timing", required=True, help="timing report path")
    p.add_argument("--corpus", default=None,
                   help="corpus TSV for entry classes (default: builtin)")
    p.set_defaults(func=_cmd_summarize)

    return top


def dispatch(argv: Sequence[str]) -> int:
    """Parse argv and run one subcommand, mapping failures to exit codes."""
    parser = _build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"intervalis: {exc}", file=sys.stderr)
        return 2
    except IntervalisError as exc:
        print(f"intervalis: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"intervalis: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"intervalis: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
