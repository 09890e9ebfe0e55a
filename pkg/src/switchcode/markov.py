"""Smoothed adaptive k-th order Markov conditionals.

The order-k estimate is smoothed with the order-(k-1) estimate: the lower
order probability is added to the numerator and one to the denominator,

    B(a | k) = (occ(ctx_k + a) + B(a | k-1)) / (ext(ctx_k) + 1),   B(a | -1) = 1/D.

Laplace (add one) and Krichevsky-Trofimov (add one half) rules are kept for
comparison runs only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .counts import CountStore

SMOOTHINGS = ("lower", "laplace", "kt")


class ConfigurationError(ValueError):
    """Raised for invalid model parameters."""


def check_alphabet(alphabet_size: int) -> None:
    if alphabet_size < 2:
        raise ConfigurationError(f"alphabet size must be at least 2, got {alphabet_size}")


def check_smoothing(smoothing: str) -> None:
    if smoothing not in SMOOTHINGS:
        raise ConfigurationError(f"unknown smoothing {smoothing!r}; expected one of {SMOOTHINGS}")


@dataclass(frozen=True)
class ConditionalLadder:
    """Probabilities of one next symbol under orders ``k = -1 .. max_order``."""

    values: tuple[float, ...]

    def __getitem__(self, k: int) -> float:
        if not -1 <= k <= self.max_order:
            raise IndexError(k)
        return self.values[k + 1]

    @property
    def max_order(self) -> int:
        return len(self.values) - 2

    def __len__(self) -> int:
        return len(self.values)


def conditional(
    store: CountStore,
    context: Sequence[int],
    next_symbol: int,
    alphabet_size: int,
    smoothing: str = "lower",
) -> ConditionalLadder:
    """Ladder of ``B(next | context, k)`` for ``k = -1 .. len(context)``.

    ``context`` is the window of preceding symbols (oldest first); orders
    beyond its length are not computed.
    """
    check_alphabet(alphabet_size)
    check_smoothing(smoothing)
    ctx = tuple(int(c) for c in context)
    a = int(next_symbol)
    h = len(ctx)
    prev = 1.0 / alphabet_size
    values = [prev]
    for k in range(h + 1):
        w = ctx[h - k :]
        num = store.occurrences(w + (a,))
        den = store.extensions(w)
        if smoothing == "lower":
            prev = (num + prev) / (den + 1)
        elif smoothing == "laplace":
            prev = (num + 1.0) / (den + alphabet_size)
        else:
            prev = (num + 0.5) / (den + 0.5 * alphabet_size)
        values.append(prev)
    return ConditionalLadder(tuple(values))


def ladder_logprobs(
    occ: np.ndarray, ext: np.ndarray, alphabet_size: int, smoothing: str = "lower"
) -> np.ndarray:
    """Natural-log ladders for many positions at once.

    ``occ`` and ``ext`` come from :func:`switchcode.counts.context_counts`;
    the result has shape ``(n, s + 2)`` with column ``k + 1`` holding
    ``log B(x[t] | k)``.
    """
    check_alphabet(alphabet_size)
    check_smoothing(smoothing)
    n, orders = occ.shape
    out = np.empty((n, orders + 1), dtype=np.float64)
    out[:, 0] = -math.log(alphabet_size)
    with np.errstate(divide="ignore"):
        log_occ = np.log(occ.astype(np.float64))
    log_den = np.log1p(ext.astype(np.float64))
    for k in range(orders):
        if smoothing == "lower":
            out[:, k + 1] = np.logaddexp(log_occ[:, k], out[:, k]) - log_den[:, k]
        elif smoothing == "laplace":
            out[:, k + 1] = np.log(occ[:, k] + 1.0) - np.log(ext[:, k] + float(alphabet_size))
        else:
            out[:, k + 1] = np.log(occ[:, k] + 0.5) - np.log(ext[:, k] + 0.5 * alphabet_size)
    return out
