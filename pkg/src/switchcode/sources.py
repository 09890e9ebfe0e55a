"""Seeded IID and finite-order Markov sources with known entropy rates.

Randomness comes from numpy's PCG64 bit generator so that a seed yields the
same symbols on every platform.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np
from scipy.optimize import brentq

ROW_TOL = 1e-12


class SourceError(ValueError):
    """Raised for probability tables that are not stochastic."""


def _entropy_bits(p: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0, -p * np.log2(p), 0.0)
    return terms.sum(axis=-1)


@dataclass(frozen=True, eq=False)
class SourceSpec:
    """An IID source (``probs`` of shape ``(D,)``) or an order-``k`` Markov
    chain (``probs`` of shape ``(D**k, D)``, rows indexed by the context read
    as a base-D number, oldest symbol most significant)."""

    kind: str
    alphabet_size: int
    probs: np.ndarray
    order: int = 0
    seed: int = 0

    def __post_init__(self) -> None:
        probs = np.array(self.probs, dtype=np.float64)
        object.__setattr__(self, "probs", probs)
        D = self.alphabet_size
        if self.kind == "iid":
            if probs.shape != (D,):
                raise SourceError(f"iid probabilities must have shape ({D},)")
        elif self.kind == "markov":
            if self.order < 0 or probs.shape != (D**self.order, D):
                raise SourceError(f"order-{self.order} table must have shape ({D ** self.order}, {D})")
        else:
            raise SourceError(f"unknown source kind {self.kind!r}")
        if np.any(probs < 0) or np.any(np.abs(probs.sum(axis=-1) - 1.0) > ROW_TOL):
            raise SourceError("probabilities must be nonnegative and rows must sum to 1")

    @property
    def stationary(self) -> np.ndarray:
        """Stationary distribution over contexts (over symbols for IID)."""
        if self.kind == "iid":
            return self.probs.copy()
        return stationary_distribution(self.probs, self.order, self.alphabet_size)

    @property
    def entropy_rate(self) -> float:
        """Entropy rate in bits per symbol."""
        if self.kind == "iid":
            return float(_entropy_bits(self.probs))
        return float(self.stationary @ _entropy_bits(self.probs))


def stationary_distribution(table: np.ndarray, order: int, alphabet_size: int) -> np.ndarray:
    """Stationary law of the context chain of an order-``order`` Markov table."""
    D = alphabet_size
    m = D**order
    if order == 0:
        return np.ones(1)
    lifted = np.zeros((m, m))
    for c in range(m):
        for a in range(D):
            lifted[c, (c * D + a) % m] += table[c, a]
    # Solve pi (P - I) = 0 with sum(pi) = 1.
    A = np.vstack([lifted.T - np.eye(m), np.ones(m)])
    b = np.zeros(m + 1)
    b[-1] = 1.0
    pi, *_ = np.linalg.lstsq(A, b, rcond=None)
    pi = np.clip(pi, 0.0, None)
    return pi / pi.sum()


def iid(probs, seed: int = 0) -> SourceSpec:
    probs = np.asarray(probs, dtype=np.float64)
    return SourceSpec("iid", probs.size, probs, 0, seed)


def uniform(alphabet_size: int, seed: int = 0) -> SourceSpec:
    return iid(np.full(alphabet_size, 1.0 / alphabet_size), seed)


def markov(table, order: int = 1, seed: int = 0) -> SourceSpec:
    table = np.asarray(table, dtype=np.float64)
    return SourceSpec("markov", table.shape[1], table, order, seed)


def binary_markov(entropy_rate: float, seed: int = 0) -> SourceSpec:
    """Symmetric binary order-1 chain whose flip probability gives ``entropy_rate`` bits."""
    if not 0 < entropy_rate < 1:
        raise SourceError("entropy rate of a binary chain must lie in (0, 1)")
    flip = brentq(lambda p: float(_entropy_bits(np.array([p, 1 - p]))) - entropy_rate, 1e-12, 0.5)
    return markov([[1 - flip, flip], [flip, 1 - flip]], 1, seed)


@numba.njit(cache=True)
def _walk(cum, order, D, state, u, out):
    m = cum.shape[0]
    for i in range(u.size):
        row = cum[state]
        a = np.searchsorted(row, u[i], side="right")
        if a > D - 1:
            a = D - 1
        out[i] = a
        if order > 0:
            state = (state * D + a) % m


def generate(spec: SourceSpec, n: int) -> np.ndarray:
    """``n`` symbols from ``spec``; identical seeds give identical output."""
    if n < 1:
        raise ValueError("length must be positive")
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    D = spec.alphabet_size
    if spec.kind == "iid":
        return rng.choice(D, size=n, p=spec.probs).astype(np.int64)
    k = spec.order
    cum = np.cumsum(spec.probs, axis=1)
    start = int(rng.choice(D**k, p=spec.stationary)) if k else 0
    head = [(start // D ** (k - 1 - j)) % D for j in range(k)]
    out = np.empty(n, dtype=np.int64)
    out[: min(k, n)] = head[:n]
    if n > k:
        body = np.empty(n - k, dtype=np.int64)
        _walk(cum, k, D, start, rng.random(n - k), body)
        out[k:] = body
    return out
