"""Shared fixtures and hypothesis configuration."""

from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

from intervalis.expr import builtin_corpus
from intervalis.interval import Strategy

# Exact rational comparisons on big operands have erratic per-example cost,
# so wall-clock deadlines would flake.
settings.register_profile(
    "intervalis",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("intervalis")


@pytest.fixture(scope="session")
def ps() -> Strategy:
    return Strategy.pred_succ()


@pytest.fixture(scope="session")
def mult() -> Strategy:
    return Strategy.multiplicative()


@pytest.fixture(scope="session")
def corpus():
    return builtin_corpus()


def exact(x: float) -> Fraction:
    """The exact rational value of a finite float, independent of the
    package's own decompose()."""
    return Fraction(x)


def contains(iv, value: Fraction) -> bool:
    """Exact containment test against float interval endpoints."""
    import math

    lo_ok = iv.lo == -math.inf or Fraction(iv.lo) <= value
    hi_ok = iv.hi == math.inf or value <= Fraction(iv.hi)
    return lo_ok and hi_ok
