"""Expression ASTs, the s-expression grammar, seeded generation, and the
built-in benchmark corpus.

Grammar (prefix, fully parenthesised):

    expr  := var | const | '(' unop expr ')' | '(' binop expr expr ')'
    unop  := 'neg' | 'sqrt' | 'exp' | 'sin' | 'cos'
    binop := '+' | '-' | '*' | '/'
    var   := [a-z][a-z0-9_]*

Constants are binary64 literals; to_text renders them with repr, the
shortest digit string that round-trips, so parse(to_text(e)) == e.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Iterator, Union

from .errors import (
    ExprDomainError,
    IntervalisError,
    InvalidExpression,
    ParseError,
    RetryExhausted,
)
from .interval import Interval, Strategy, make_point
from . import interval as ivl

UNARY_OPS = ("neg", "sqrt", "exp", "sin", "cos")
BINARY_OPS = ("+", "-", "*", "/")

_VAR_RE = re.compile(r"[a-z][a-z0-9_]*\Z")

MAX_SOURCE_BYTES = 64 * 1024

# Validity thresholds for generated inputs: divisors and sqrt arguments
# must clear these margins so outward-widened evaluation cannot hit a
# domain error, and exp arguments stay far from binary64 overflow.
DELTA_DIV = 2.0**-20
DELTA_SQRT = 2.0**-20
X_EXP_MAX = 300.0

VAR_POOL = tuple("abcdefghij")

CLASS_SINGLE_ARITH = "SingleArith"
CLASS_SINGLE_TRANSC = "SingleTransc"
CLASS_COMPOSITE_ARITH = "CompositeArith"
CLASS_COMPOSITE_MIXED = "CompositeMixed"
CLASS_REGRESSION = "Regression"
CORPUS_CLASSES = (
    CLASS_SINGLE_ARITH,
    CLASS_SINGLE_TRANSC,
    CLASS_COMPOSITE_ARITH,
    CLASS_COMPOSITE_MIXED,
    CLASS_REGRESSION,
)


@dataclass(frozen=True, slots=True)
class Var:
    name: str

    def __post_init__(self) -> None:
        if not _VAR_RE.match(self.name):
            raise InvalidExpression(f"bad variable name {self.name!r}")


@dataclass(frozen=True, slots=True)
class Const:
    value: float

    def __post_init__(self) -> None:
        if math.isnan(self.value) or math.isinf(self.value):
            raise InvalidExpression(f"constants must be finite, got {self.value!r}")


@dataclass(frozen=True, slots=True)
class Unary:
    op: str
    arg: "Expr"

    def __post_init__(self) -> None:
        if self.op not in UNARY_OPS:
            raise InvalidExpression(f"unknown unary operator {self.op!r}")


@dataclass(frozen=True, slots=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"

    def __post_init__(self) -> None:
        if self.op not in BINARY_OPS:
            raise InvalidExpression(f"unknown binary operator {self.op!r}")


Expr = Union[Var, Const, Unary, Binary]


def walk(e: Expr) -> Iterator[Expr]:
    """All nodes of e, parents before children."""
    stack: list[Expr] = [e]
    while stack:
        node = stack.pop()
        yield node
        if isinstance(node, Unary):
            stack.append(node.arg)
        elif isinstance(node, Binary):
            stack.append(node.right)
            stack.append(node.left)


def free_vars(e: Expr) -> tuple[str, ...]:
    """Sorted free variable names."""
    return tuple(sorted({n.name for n in walk(e) if isinstance(n, Var)}))


def n_ops(e: Expr) -> int:
    return sum(1 for n in walk(e) if isinstance(n, (Unary, Binary)))


def to_text(e: Expr) -> str:
    """Render as an s-expression; inverse of parse."""
    out: list[str] = []
    stack: list[object] = [e]
    while stack:
        item = stack.pop()
        if isinstance(item, str):
            out.append(item)
        elif isinstance(item, Var):
            out.append(item.name)
        elif isinstance(item, Const):
            out.append(repr(item.value))
        elif isinstance(item, Unary):
            stack.append(")")
            stack.append(item.arg)
            stack.append(f"({item.op} ")
        elif isinstance(item, Binary):
            stack.append(")")
            stack.append(item.right)
            stack.append(" ")
            stack.append(item.left)
            stack.append(f"({item.op} ")
        else:
            raise InvalidExpression(f"not an expression node: {item!r}")
    return "".join(out)


def _tokenize(raw: bytes) -> Iterator[tuple[str, str, int]]:
    ws = (0x20, 0x09, 0x0D, 0x0A)
    i, n = 0, len(raw)
    while i < n:
        c = raw[i]
        if c in ws:
            i += 1
            continue
        if c == 0x28:
            yield "(", "(", i
            i += 1
            continue
        if c == 0x29:
            yield ")", ")", i
            i += 1
            continue
        j = i
        while j < n and raw[j] not in ws and raw[j] not in (0x28, 0x29):
            j += 1
        try:
            atom = raw[i:j].decode("ascii")
        except UnicodeDecodeError as exc:
            raise ParseError("non-ascii atom", i) from exc
        yield "atom", atom, i
        i = j


def _atom(token: str, offset: int) -> Expr:
    if _VAR_RE.match(token):
        return Var(token)
    try:
        v = float(token)
    except ValueError as exc:
        raise ParseError(f"unparseable atom {token!r}", offset) from exc
    if math.isnan(v) or math.isinf(v):
        raise ParseError(f"non-finite constant {token!r}", offset)
    return Const(v)


def parse(text: str) -> Expr:
    """Parse an s-expression; ParseError carries the byte offset."""
    raw = text.encode("utf-8")
    if len(raw) > MAX_SOURCE_BYTES:
        raise ParseError("input exceeds 64 KiB", MAX_SOURCE_BYTES)
    toks = list(_tokenize(raw))
    pos = 0
    # Explicit frame stack instead of recursion: 64 KiB of nesting would
    # blow the interpreter stack.  Frame layout: [op, arity, children].
    frames: list[list] = []
    while True:
        if pos >= len(toks):
            raise ParseError("unexpected end of input", len(raw))
        kind, value, off = toks[pos]
        pos += 1
        if kind == "(":
            if pos >= len(toks) or toks[pos][0] != "atom":
                where = toks[pos][2] if pos < len(toks) else len(raw)
                raise ParseError("expected an operator after '('", where)
            op, opoff = toks[pos][1], toks[pos][2]
            pos += 1
            if op in UNARY_OPS:
                frames.append([op, 1, []])
            elif op in BINARY_OPS:
                frames.append([op, 2, []])
            else:
                raise ParseError(f"unknown operator {op!r}", opoff)
            continue
        if kind == ")":
            raise ParseError("unexpected ')'", off)
        node: Expr = _atom(value, off)
        while True:
            if not frames:
                if pos != len(toks):
                    raise ParseError("trailing input after expression", toks[pos][2])
                return node
            frames[-1][2].append(node)
            if len(frames[-1][2]) < frames[-1][1]:
                break
            op, _, children = frames.pop()
            if pos >= len(toks) or toks[pos][0] != ")":
                where = toks[pos][2] if pos < len(toks) else len(raw)
                raise ParseError("expected ')'", where)
            pos += 1
            node = (
                Unary(op, children[0])
                if len(children) == 1
                else Binary(op, children[0], children[1])
            )


class SplitMix64:
    """splitmix64 PRNG (public-domain constants), kept bit-stable so seeded
    corpora and inputs reproduce across platforms and releases.

    next_u64: state += 0x9E3779B97F4A7C15; z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB; return z ^ (z >> 31).
    """

    __slots__ = ("state",)
    _MASK = (1 << 64) - 1

    def __init__(self, seed: int) -> None:
        self.state = seed & self._MASK

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & self._MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & self._MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & self._MASK
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Uniform-ish draw in [0, n); modulo bias is irrelevant at n << 2**64."""
        return self.next_u64() % n

    def uniform(self, lo: float, hi: float) -> float:
        """Uniform double in [lo, hi) from the top 53 bits."""
        u = (self.next_u64() >> 11) * 2.0**-53
        return lo + u * (hi - lo)


def fnv1a64(text: str) -> int:
    """FNV-1a 64-bit hash; stable stream labels for derived seeds."""
    h = 0xCBF29CE484222325
    for b in text.encode("utf-8"):
        h = ((h ^ b) * 0x100000001B3) & ((1 << 64) - 1)
    return h


def derive_seed(seed: int, label: str) -> int:
    """Independent deterministic stream seed for (seed, label)."""
    return (seed ^ fnv1a64(label)) & ((1 << 64) - 1)


def gen_expr(seed: int, cls: str, ops: int) -> Expr:
    """Deterministic random expression with exactly `ops` operator nodes.

    CompositeArith draws only the four binary operators; CompositeMixed adds
    the transcendental unaries. Leaves are variables from a..j.
    """
    if cls not in (CLASS_COMPOSITE_ARITH, CLASS_COMPOSITE_MIXED):
        raise InvalidExpression(f"gen_expr cannot generate class {cls!r}")
    if not 1 <= ops <= 64:
        raise InvalidExpression(f"ops must be in [1, 64], got {ops}")
    rng = SplitMix64(seed)
    mixed = cls == CLASS_COMPOSITE_MIXED

    def build(budget: int) -> Expr:
        if budget == 0:
            return Var(VAR_POOL[rng.below(len(VAR_POOL))])
        pick = rng.below(8) if mixed else rng.below(4)
        if pick < 4:
            rest = budget - 1
            left = rng.below(rest + 1)
            return Binary(BINARY_OPS[pick], build(left), build(rest - left))
        return Unary(UNARY_OPS[pick - 3], build(budget - 1))

    return build(ops)


@dataclass(frozen=True)
class CorpusEntry:
    """One benchmark expression plus its per-variable input domains."""

    id: str
    expr: Expr
    cls: str
    input_domain: dict[str, tuple[float, float]]

    def __post_init__(self) -> None:
        if self.cls not in CORPUS_CLASSES:
            raise InvalidExpression(f"unknown corpus class {self.cls!r}")
        missing = [v for v in free_vars(self.expr) if v not in self.input_domain]
        if missing:
            raise InvalidExpression(f"entry {self.id!r} lacks domains for {missing}")
        for name, (lo, hi) in self.input_domain.items():
            if not (math.isfinite(lo) and math.isfinite(hi) and lo <= hi):
                raise InvalidExpression(f"bad domain for {name!r}: [{lo!r}, {hi!r}]")

    @property
    def var_names(self) -> tuple[str, ...]:
        return free_vars(self.expr)


def eval_interval(e: Expr, inputs: dict[str, float], s: Strategy) -> Interval:
    """Outward-rounded interval evaluation at a point input.

    Domain failures (zero divisor interval, negative sqrt, unbounded trig
    argument) re-raise as ExprDomainError tagged with the failing node.
    """
    if isinstance(e, Var):
        try:
            return make_point(inputs[e.name])
        except KeyError:
            raise InvalidExpression(f"unbound variable {e.name!r}") from None
    if isinstance(e, Const):
        return make_point(e.value)
    if isinstance(e, Unary):
        a = eval_interval(e.arg, inputs, s)
        try:
            if e.op == "neg":
                return ivl.neg(a, s)
            if e.op == "sqrt":
                return ivl.sqrt_i(a)
            if e.op == "exp":
                return ivl.exp_i(a)
            if e.op == "sin":
                return ivl.sin_i(a)
            return ivl.cos_i(a)
        except IntervalisError as exc:
            raise ExprDomainError(to_text(e), exc) from exc
    a = eval_interval(e.left, inputs, s)
    b = eval_interval(e.right, inputs, s)
    try:
        if e.op == "+":
            return ivl.add(a, b, s)
        if e.op == "-":
            return ivl.sub(a, b, s)
        if e.op == "*":
            return ivl.mul(a, b, s)
        return ivl.div(a, b, s)
    except IntervalisError as exc:
        raise ExprDomainError(to_text(e), exc) from exc


def _ieee_div(a: float, b: float) -> float:
    try:
        return a / b
    except ZeroDivisionError:
        if a == 0.0 or math.isnan(a):
            return math.nan
        return math.copysign(1.0, a) * math.copysign(1.0, b) * math.inf


def _ieee_exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def _ieee_sqrt(x: float) -> float:
    try:
        return math.sqrt(x)
    except ValueError:
        return math.nan


def _ieee_sin(x: float) -> float:
    try:
        return math.sin(x)
    except ValueError:
        return math.nan


def _ieee_cos(x: float) -> float:
    try:
        return math.cos(x)
    except ValueError:
        return math.nan


def eval_float(e: Expr, inputs: dict[str, float]) -> float:
    """Plain round-to-nearest evaluation with IEEE special-value semantics
    (overflow -> inf, 0/0 and sqrt of negatives -> NaN), reported as-is."""
    if isinstance(e, Var):
        try:
            return inputs[e.name]
        except KeyError:
            raise InvalidExpression(f"unbound variable {e.name!r}") from None
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Unary):
        a = eval_float(e.arg, inputs)
        if e.op == "neg":
            return -a
        if e.op == "sqrt":
            return _ieee_sqrt(a)
        if e.op == "exp":
            return _ieee_exp(a)
        if e.op == "sin":
            return _ieee_sin(a)
        return _ieee_cos(a)
    a = eval_float(e.left, inputs)
    b = eval_float(e.right, inputs)
    if e.op == "+":
        return a + b
    if e.op == "-":
        return a - b
    if e.op == "*":
        return a * b
    return _ieee_div(a, b)


def gen_inputs(
    seed: int, entry: CorpusEntry, count: int, max_retries: int = 1000
) -> list[tuple[float, ...]]:
    """Valid input tuples (ordered by sorted variable name) for an entry.

    Tuples are drawn uniformly from the entry domains and kept only when an
    exact oracle pre-check certifies validity: every sqrt argument clears
    DELTA_SQRT, every divisor clears DELTA_DIV in magnitude, every exp
    argument stays below X_EXP_MAX. Each tuple gets max_retries draws.
    """
    from . import rational

    names = entry.var_names
    rng = SplitMix64(derive_seed(seed, f"inputs|{entry.id}"))
    out: list[tuple[float, ...]] = []
    for index in range(count):
        for _ in range(max_retries):
            tup = tuple(
                rng.uniform(*entry.input_domain[name]) for name in names
            )
            if rational.validity_ok(entry.expr, dict(zip(names, tup))):
                out.append(tup)
                break
        else:
            raise RetryExhausted(
                f"no valid input for entry {entry.id!r} at tuple {index} "
                f"after {max_retries} draws"
            )
    return out


# ---------------------------------------------------------------------------
# Built-in corpus: 4 single arithmetic + 4 single transcendental entries,
# 10 composite arithmetic, 10 composite mixed, 2 regression entries.
# Composite bodies were produced by gen_expr at fixed seeds and are frozen
# here as text so the corpus cannot drift under generator changes.

_DEFAULT_DOMAIN = (-100.0, 100.0)

_SINGLE_ENTRIES = (
    ("add", CLASS_SINGLE_ARITH, "(+ a b)"),
    ("sub", CLASS_SINGLE_ARITH, "(- a b)"),
    ("mul", CLASS_SINGLE_ARITH, "(* a b)"),
    ("div", CLASS_SINGLE_ARITH, "(/ a b)"),
    ("sqrt", CLASS_SINGLE_TRANSC, "(sqrt a)"),
    ("exp", CLASS_SINGLE_TRANSC, "(exp a)"),
    ("sin", CLASS_SINGLE_TRANSC, "(sin a)"),
    ("cos", CLASS_SINGLE_TRANSC, "(cos a)"),
)

# arith2, random1, random2 and random9 are hand-written composites
# a(a+bc)/(b+cd) - d(e+f/g)/(g+h) - i/j, cos(cos(cos f + exp(d/c)) *
# sin(sqrt e + a + b - sqrt(d+c))), exp(sqrt(exp(sqrt(exp(sqrt a))))) and
# exp(sqrt(exp(cos(a/d))/exp(cos(sqrt f))) / sqrt(cos(cos(cos c)) /
# sqrt(sin(cos b)))); the rest came out of gen_expr at graded operation
# counts and were kept only if uniform domain draws pass the validity
# screen often enough that input generation cannot plausibly exhaust
# its retry budget.
_COMPOSITE_ARITH_TEXTS: tuple[tuple[str, str], ...] = (
    ("arith1", "(/ (* j (/ (/ a d) h)) d)"),
    (
        "arith2",
        "(- (- (/ (* a (+ a (* b c))) (+ b (* c d)))"
        " (/ (* d (+ e (/ f g))) (+ g h))) (/ i j))",
    ),
    ("arith3", "(+ (* g i) (- i (* (- d i) (+ h e))))"),
    ("arith4", "(* (* (* g (* h f)) i) (- (* i f) (+ (+ j b) a)))"),
    (
        "arith5",
        "(/ (+ (/ (/ (- b c) e) (/ (+ f c) d)) (/ e h)) (* (- d f) e))",
    ),
    (
        "arith6",
        "(* (* (* (* g (/ (/ i i) b)) (/ (/ c b) (/ f (* c f))))"
        " (/ d h)) (- c i))",
    ),
    (
        "arith7",
        "(+ (+ (+ (+ (+ f h) b) (- h (* f e))) (+ b (- i i)))"
        " (- (+ c a) (/ (+ (+ c f) d) f)))",
    ),
    (
        "arith8",
        "(+ (/ (/ a f) b) (* (* j h) (* (+ d d)"
        " (* (/ (+ (- (+ i h) f) (/ e (- (+ g c) d))) f) (+ h f)))))",
    ),
    (
        "arith9",
        "(* (/ (+ h c) a) (+ (- (/ (/ (+ b g) b) d) (* d a))"
        " (+ (+ i (/ c (/ (- (- e e) (/ a e)) (+ h a)))) (* a d))))",
    ),
    (
        "arith10",
        "(/ (* (/ (* (- j j) e) i) (- (+ f (- (+ g (- i (/ g i))) b))"
        " (/ (+ b b) (- (+ f (* i h)) (/ i c))))) (* h (- (* e a) a)))",
    ),
)
_COMPOSITE_MIXED_TEXTS: tuple[tuple[str, str], ...] = (
    (
        "random1",
        "(cos (* (cos (+ (cos f) (exp (/ d c))))"
        " (sin (- (+ (+ (sqrt e) a) b) (sqrt (+ d c))))))",
    ),
    ("random2", "(exp (sqrt (exp (sqrt (exp (sqrt a))))))"),
    ("random3", "(sin (exp (* (* h c) c)))"),
    ("random4", "(exp (/ (/ h (* f (* c (* e h)))) i))"),
    ("random5", "(sqrt (* (sqrt (exp (/ (cos h) (sin h)))) (- a b)))"),
    (
        "random6",
        "(sqrt (sin (* (/ (cos (exp (sqrt d))) (- i e)) (/ a (- e b)))))",
    ),
    (
        "random7",
        "(/ (exp (sin (sqrt (* j (- (cos (* (/ h e) c))"
        " (exp (+ g (* a a)))))))) j)",
    ),
    (
        "random8",
        "(+ (cos (exp (sin (* (+ a b) (exp f)))))"
        " (cos (* (+ d j) (sin (sqrt (exp (+ i i)))))))",
    ),
    (
        "random9",
        "(exp (/ (sqrt (/ (exp (cos (/ a d))) (exp (cos (sqrt f)))))"
        " (sqrt (/ (cos (cos (cos c))) (sqrt (sin (cos b)))))))",
    ),
    (
        "random10",
        "(- (/ c (/ (* (sin g) (+ g i)) a)) (/ (sin (sqrt (cos (- j h))))"
        " (* b (/ (- (* c j) d) (exp j)))))",
    ),
)

_REGRESSION_ENTRIES = (
    (
        "polar_to_carthesian_x",
        "(* r (cos (* theta (/ 3.14159265359 180.0))))",
        {"r": (1.0, 10.0), "theta": (0.0, 360.0)},
    ),
    (
        "sine_order3",
        "(- (* 0.954929658551372 x0) (* 0.12900613773279798 (* (* x0 x0) x0)))",
        {"x0": (-2.0, 2.0)},
    ),
)


def _entry(eid: str, cls: str, text: str, domains=None) -> CorpusEntry:
    e = parse(text)
    if domains is None:
        domains = {v: _DEFAULT_DOMAIN for v in free_vars(e)}
    return CorpusEntry(eid, e, cls, dict(domains))


def builtin_corpus() -> list[CorpusEntry]:
    """The 30-entry benchmark corpus."""
    entries = [_entry(eid, cls, text) for eid, cls, text in _SINGLE_ENTRIES]
    for eid, text in _COMPOSITE_ARITH_TEXTS:
        entries.append(_entry(eid, CLASS_COMPOSITE_ARITH, text))
    for eid, text in _COMPOSITE_MIXED_TEXTS:
        entries.append(_entry(eid, CLASS_COMPOSITE_MIXED, text))
    for eid, text, domains in _REGRESSION_ENTRIES:
        entries.append(_entry(eid, CLASS_REGRESSION, text, domains))
    return entries


def save_corpus(entries: list[CorpusEntry], path: str) -> None:
    """Write the tab-separated corpus format: id, class, s-expression,
    comma-joined `name:lo..hi` domains."""
    lines = []
    for e in entries:
        domains = ",".join(
            f"{name}:{lo!r}..{hi!r}" for name, (lo, hi) in sorted(e.input_domain.items())
        )
        lines.append(f"{e.id}\t{e.cls}\t{to_text(e.expr)}\t{domains}")
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def load_corpus(path: str) -> list[CorpusEntry]:
    entries = []
    with open(path, "r", encoding="ascii") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 4:
                raise InvalidExpression(f"{path}:{lineno}: expected 4 tab fields")
            eid, cls, text, domains_text = parts
            domains = {}
            if domains_text:
                for item in domains_text.split(","):
                    name, _, rng = item.partition(":")
                    lo_text, sep, hi_text = rng.partition("..")
                    if not sep:
                        raise InvalidExpression(f"{path}:{lineno}: bad domain {item!r}")
                    domains[name] = (float(lo_text), float(hi_text))
            entries.append(CorpusEntry(eid, parse(text), cls, domains))
    return entries
