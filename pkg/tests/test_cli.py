"""Command-line interface: exit codes, report files, seed handling."""

import json

import pytest

from intervalis import __version__, parse
from intervalis.cli import dispatch


def run(args, **kw):
    return dispatch([str(a) for a in args], **kw)


def test_no_arguments_is_usage_error(capsys):
    assert dispatch([]) == 2
    assert dispatch(["no-such-command"]) == 2
    assert dispatch(["check", "--no-such-flag"]) == 2


def test_help_exits_zero(capsys):
    assert dispatch(["--help"]) == 0
    assert "corpus" in capsys.readouterr().out


def test_corpus_command(tmp_path, capsys):
    out = tmp_path / "corpus.tsv"
    assert run(["corpus", "--output", out]) == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 30
    assert lines[0].startswith("add\t")


def test_check_command_clean(tmp_path, capsys):
    out = tmp_path / "correctness.csv"
    code = run(["check", "--inputs", 3, "--seed", 1, "--output", out])
    assert code == 0
    text = out.read_text()
    assert text.splitlines()[0] == (
        "expr_id,strategy,inputs,contained,violated,undecided,domain_errors"
    )
    assert ",unwidened-test," not in text


def test_check_command_flags_unsound_strategy(tmp_path):
    out = tmp_path / "c.csv"
    code = run(
        ["check", "--inputs", 40, "--seed", 0, "--strategy", "unwidened-test",
         "--output", out]
    )
    assert code == 1


def test_check_json_config_echo(tmp_path):
    out = tmp_path / "c.json"
    assert run(
        ["check", "--inputs", 3, "--seed", 5, "--format", "json", "--output", out]
    ) == 0
    payload = json.loads(out.read_text())
    cfg = payload["config"]
    assert cfg["seed"] == 5
    assert cfg["version"] == __version__
    assert [s["name"] for s in cfg["strategies"]] == ["pred-succ", "multiplicative"]
    assert cfg["strategies"][1]["eps"] == 2.0**-52


def test_seed_env_fallback(tmp_path, monkeypatch):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    monkeypatch.setenv("INTERVALIS_SEED", "7")
    assert run(["check", "--inputs", 3, "--output", a]) == 0
    monkeypatch.delenv("INTERVALIS_SEED")
    assert run(["check", "--inputs", 3, "--seed", 7, "--output", b]) == 0
    assert a.read_bytes() == b.read_bytes()
    monkeypatch.setenv("INTERVALIS_SEED", "not-a-number")
    assert run(["check", "--inputs", 3, "--output", a]) == 2


def test_width_command(tmp_path):
    out = tmp_path / "width.csv"
    assert run(["width", "--inputs", 5, "--output", out]) == 0
    assert out.read_text().splitlines()[0] == "expr_id,strategy,bucket_log2_ulp,count"


def test_time_command_forces_single_worker(tmp_path, capsys):
    out = tmp_path / "timing.csv"
    code = run(
        ["time", "--timing-inputs", 2, "--reps", 3, "--jobs", 4, "--output", out]
    )
    assert code == 0
    assert "single-worker" in capsys.readouterr().err
    lines = out.read_text().splitlines()
    assert lines[0] == "expr_id,strategy,inputs,reps,total_ms"
    assert len(lines) == 61  # 30 entries x 2 strategies


def test_ccd_command(tmp_path, capsys):
    out = tmp_path / "ccd.csv"
    assert run(["ccd", "--output", out]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == (
        "method,strategy,queries,hits,false_positives,false_negatives,total_ms"
    )
    assert len(lines) == 5  # 2 methods x 2 strategies
    assert run(["ccd", "--delta", 0, "--output", out]) == 2


def test_ccd_fixture_export_and_reload(tmp_path):
    fixtures_csv = tmp_path / "fixtures.csv"
    out = tmp_path / "report.csv"
    assert run(["ccd", "--fixtures-out", fixtures_csv]) == 0
    assert len(fixtures_csv.read_text().splitlines()) >= 60
    assert run(
        ["ccd", "--queries", fixtures_csv, "--method", "univariate", "--output", out]
    ) == 0
    rows = out.read_text().splitlines()[1:]
    assert all(r.split(",")[5] == "0" for r in rows)  # no false negatives


def test_export_queries(tmp_path, capsys):
    out = tmp_path / "queries.txt"
    assert run(
        ["export-queries", "--inputs", 2, "--seed", 3, "--output", out]
    ) == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 30 * 2 * 2
    for line in lines[:6]:
        lhs, rest = line.split(" <= ", 1)
        expr_text = rest.split(" [", 1)[0]
        parse(expr_text)
        assert "/" in lhs


def test_summarize_command(tmp_path, capsys):
    c, w, t = tmp_path / "c.csv", tmp_path / "w.csv", tmp_path / "t.csv"
    assert run(["check", "--inputs", 3, "--seed", 2, "--output", c]) == 0
    assert run(["width", "--inputs", 3, "--seed", 2, "--output", w]) == 0
    assert run(["time", "--timing-inputs", 2, "--reps", 2, "--output", t]) == 0
    capsys.readouterr()
    assert run(["summarize", "--correctness", c, "--width", w, "--timing", t]) == 0
    table = capsys.readouterr().out
    assert "pred-succ" in table and "multiplicative" in table
    # missing section -> usage/data error
    assert run(["summarize", "--correctness", c, "--width", w, "--timing", c]) == 2


def test_summarize_accepts_json(tmp_path, capsys):
    c, w, t = tmp_path / "c.json", tmp_path / "w.json", tmp_path / "t.json"
    common = ["--inputs", 3, "--seed", 2, "--format", "json"]
    assert run(["check", *common, "--output", c]) == 0
    assert run(["width", *common, "--output", w]) == 0
    assert run(
        ["time", "--timing-inputs", 2, "--reps", 2, "--format", "json", "--output", t]
    ) == 0
    capsys.readouterr()
    assert run(["summarize", "--correctness", c, "--width", w, "--timing", t]) == 0
    assert "pred-succ" in capsys.readouterr().out


def test_missing_file_is_io_error(tmp_path):
    assert run(["check", "--corpus", tmp_path / "absent.tsv", "--inputs", 2]) == 2
