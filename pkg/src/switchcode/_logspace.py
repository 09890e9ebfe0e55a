"""Log-domain arithmetic on Python floats."""

from __future__ import annotations

import math
from typing import Iterable

NEG_INF = float("-inf")
LOG2E = 1.0 / math.log(2.0)


def logaddexp(a: float, b: float) -> float:
    if a == NEG_INF:
        return b
    if b == NEG_INF:
        return a
    if a < b:
        a, b = b, a
    return a + math.log1p(math.exp(b - a))


def logsumexp(xs: Iterable[float]) -> float:
    xs = [x for x in xs if x != NEG_INF]
    if not xs:
        return NEG_INF
    top = max(xs)
    return top + math.log(math.fsum(math.exp(x - top) for x in xs))


def log1mexp(x: float) -> float:
    """Return log(1 - exp(x)) for x < 0 without cancellation."""
    if x > -0.6931471805599453:
        return math.log(-math.expm1(x))
    return math.log1p(-math.exp(x))
