"""Self-verifying interval arithmetic.

Portable outward-rounded interval evaluation (two software widening
strategies), an exact rational oracle that certifies every computed
enclosure, expression corpus tooling, benchmark harnesses, and a
continuous collision detection case study.
"""

from .errors import (
    DegenerateQuery,
    DivisionByZero,
    DivisorContainsZero,
    DomainError,
    IdenticallyZeroCubic,
    IncompleteData,
    IntervalisError,
    InvalidFloat,
    NegativeDomain,
    NotExact,
    ParseError,
    RetryExhausted,
    UnboundedArgument,
    UnboundedInterval,
)
from .bench import CorrectnessRow, TimingRow, WidthHistogram, summarize
from .ccd import CcdQuery, CcdResult, CubicPoly, ccd_oracle, multivariate_ccd, sturm_count, univariate_ccd
from .expr import CorpusEntry, builtin_corpus, parse, to_text
from .floatbits import FloatDecomposition, decompose, decompose_bits, next_down, next_up
from .interval import Interval, Strategy, make_point
from .rational import RationalInterval, Verdict, check_containment, width_exact

__version__ = "0.1.0"

__all__ = [
    "CcdQuery",
    "CcdResult",
    "CorpusEntry",
    "CorrectnessRow",
    "CubicPoly",
    "DegenerateQuery",
    "DivisionByZero",
    "DivisorContainsZero",
    "DomainError",
    "FloatDecomposition",
    "IdenticallyZeroCubic",
    "IncompleteData",
    "Interval",
    "IntervalisError",
    "InvalidFloat",
    "NegativeDomain",
    "NotExact",
    "ParseError",
    "RationalInterval",
    "RetryExhausted",
    "Strategy",
    "TimingRow",
    "UnboundedArgument",
    "UnboundedInterval",
    "Verdict",
    "WidthHistogram",
    "builtin_corpus",
    "ccd_oracle",
    "check_containment",
    "decompose",
    "decompose_bits",
    "make_point",
    "multivariate_ccd",
    "next_down",
    "next_up",
    "parse",
    "sturm_count",
    "summarize",
    "to_text",
    "univariate_ccd",
    "width_exact",
    "__version__",
]
