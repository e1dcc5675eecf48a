"""Exception hierarchy shared across the package."""

from __future__ import annotations


class IntervalisError(Exception):
    """Base class for every error raised by this package."""


class InvalidFloat(IntervalisError):
    """A NaN (or otherwise unusable float) reached a bit-level kernel routine."""


class NonFiniteDecompose(InvalidFloat):
    """decompose() was asked for the exact rational value of an infinity or NaN."""


class DivisorContainsZero(IntervalisError):
    """Interval division where the divisor interval contains zero."""


class NegativeDomain(IntervalisError):
    """Interval square root of an interval extending below zero."""


class UnboundedArgument(IntervalisError):
    """A periodic function received an interval with an infinite endpoint."""


class DivisionByZero(IntervalisError):
    """Exact rational division by zero."""


class NotExact(IntervalisError):
    """eval_exact() met a node it cannot evaluate in rational arithmetic."""


class DomainError(IntervalisError):
    """An oracle enclosure left the mathematical domain (sqrt of a negative,
    division by an interval containing zero, or an argument outside the
    supported reduction range)."""


class UnboundedInterval(IntervalisError):
    """width_exact() was asked for the width of an interval with an infinite
    endpoint."""


class ParseError(IntervalisError):
    """Malformed expression text. Carries the byte offset of the failure."""

    def __init__(self, message: str, offset: int) -> None:
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class InvalidExpression(IntervalisError):
    """A structurally invalid AST (bad variable name, unknown operator)."""


class RetryExhausted(IntervalisError):
    """Input generation could not find a valid input tuple within the retry
    budget."""


class ExprDomainError(IntervalisError):
    """Interval evaluation failed on a subexpression. Wraps the underlying
    interval_core error together with the offending node."""

    def __init__(self, node: object, cause: IntervalisError) -> None:
        super().__init__(f"{cause.__class__.__name__} at node {node}")
        self.node = node
        self.cause = cause


class IncompleteData(IntervalisError):
    """summarize() is missing one of the report kinds it needs."""


class IdenticallyZeroCubic(IntervalisError):
    """The coplanarity cubic vanishes identically; the univariate solver has
    no information."""


class DegenerateQuery(IntervalisError):
    """The exact CCD oracle cannot classify the query (identically coplanar
    motion or a degenerate triangle/edge pair at a contact time)."""


class UsageError(IntervalisError):
    """Bad command line arguments or unreadable input files."""
