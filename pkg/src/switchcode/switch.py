"""Switch distributions over adaptive Markov orders, capped at depth ``s``.

Mass ``P(x_1^n, k)`` sits on each order ``k = -1 .. s`` and a bucket collects
every order above ``s``.  Per symbol, a fraction ``q_n`` of each order's mass
moves up one order, the remaining ``p_n`` stays, and everything is multiplied
by that order's conditional probability of the symbol:

    P(x^{n+1}, k) = [p_n P(x^n, k) + q_n P(x^n, k-1)] B(x_{n+1} | x^n, k)
    P(x^{n+1}, *) = [P(x^n, *)     + q_n P(x^n, s)  ] B(x_{n+1} | x^n, s)

with ``p_n = exp(-(n+1)^-alpha)``.  The recursion starts from unit mass on
order -1 before the first symbol.  All mass arithmetic is in natural log.

:class:`SwitchState` consumes one symbol at a time from a
:class:`~switchcode.counts.CountStore`.  :class:`SwitchModel` evaluates whole
sequences from bulk counts and a compiled kernel; the two agree to rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numba
import numpy as np

from ._logspace import LOG2E, NEG_INF, log1mexp, logaddexp, logsumexp
from .counts import CountStore, CountTable, Mode, TrainingError, context_counts, train
from .markov import ConfigurationError, check_alphabet, check_smoothing, conditional, ladder_logprobs
from .symbols import SymbolError, as_symbols

AUTO = None


@dataclass(frozen=True)
class ModelConfig:
    """Parameters of one switch distribution.

    ``depth=None`` selects the automatic depth: the longest repeated
    substring of the evaluated text (training data included), which makes
    the cap exact.
    """

    alphabet_size: int = 256
    alpha: float = 1.001
    depth: int | None = 7
    mode: Mode = Mode.PLAIN
    smoothing: str = "lower"
    training: bytes | np.ndarray | None = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "mode", Mode(self.mode))
        check_alphabet(self.alphabet_size)
        check_smoothing(self.smoothing)
        if not self.alpha > 1:
            raise ConfigurationError(f"alpha must exceed 1, got {self.alpha}")
        if self.depth is not None and self.depth < 0:
            raise ConfigurationError(f"depth must be nonnegative, got {self.depth}")
        if self.mode is not Mode.PLAIN:
            if self.training is None:
                raise TrainingError(f"{self.mode.value} mode needs training data")
            if len(self.training) == 0:
                raise TrainingError("training corpus is empty")

    def with_depth(self, depth: int | None) -> ModelConfig:
        return ModelConfig(self.alphabet_size, self.alpha, depth, self.mode, self.smoothing, self.training)


def transition_weight(n: int, alpha: float) -> float:
    """Probability ``p_n = exp(-(n+1)^-alpha)`` of staying at the current order."""
    if not alpha > 1:
        raise ConfigurationError(f"alpha must exceed 1, got {alpha}")
    if n < 0:
        raise ValueError("step index must be nonnegative")
    return math.exp(-((n + 1.0) ** -alpha))


def log_transition_weights(n: int, alpha: float) -> tuple[np.ndarray, np.ndarray]:
    """Arrays ``log p_i`` and ``log q_i`` for ``i = 0 .. n-1``."""
    if not alpha > 1:
        raise ConfigurationError(f"alpha must exceed 1, got {alpha}")
    logp = -np.power(np.arange(1, n + 1, dtype=np.float64), -alpha)
    logq = np.log(-np.expm1(logp))
    return logp, logq


class SwitchState:
    """Streaming evaluator of one switch distribution.

    ``logmass[k + 1]`` is ``log P(x_1^n, k)`` for ``k = -1 .. s``; ``bullet``
    is the log mass of all orders above ``s``.
    """

    def __init__(self, config: ModelConfig, store: CountStore) -> None:
        if config.depth is None:
            raise ConfigurationError("a streaming state needs a concrete depth")
        self.config = config
        self.depth = config.depth
        self.store = store
        self.n = 0
        self.logmass = [0.0] + [NEG_INF] * (self.depth + 1)
        self.bullet = NEG_INF
        self.window: list[int] = []

    @classmethod
    def init(cls, config: ModelConfig, store: CountStore | None = None) -> SwitchState:
        """Fresh state; builds the training store from ``config.training`` unless given."""
        if config.depth is None:
            raise ConfigurationError("a streaming state needs a concrete depth")
        if store is None:
            if config.mode is Mode.PLAIN:
                store = CountStore(config.depth, Mode.PLAIN)
            else:
                if config.training is None:
                    raise TrainingError(f"{config.mode.value} mode needs training data")
                y = as_symbols(config.training, config.alphabet_size)
                store = train(y.tolist(), config.depth, config.mode)
        elif config.mode is Mode.PREADAPTED:
            store = store.copy()
        return cls(config, store)

    def _masses(self, symbol: int) -> tuple[list[float], float]:
        """Order masses and bucket after reading ``symbol``; the state is untouched."""
        cfg = self.config
        if not 0 <= symbol < cfg.alphabet_size:
            raise SymbolError(f"symbol {symbol} outside alphabet of size {cfg.alphabet_size}")
        t, s = self.n, self.depth
        kmax = min(t, s)
        ladder = conditional(self.store, self.window, symbol, cfg.alphabet_size, cfg.smoothing)
        log_b = [math.log(v) for v in ladder.values]
        lp = -((t + 1.0) ** -cfg.alpha)
        lq = log1mexp(lp)
        prev = self.logmass
        new = [NEG_INF] * (s + 2)
        for i in range(kmax + 2):
            up = lq + prev[i - 1] if i else NEG_INF
            new[i] = logaddexp(lp + prev[i], up) + log_b[i]
        bullet = self.bullet
        if t >= s + 1:
            bullet = logaddexp(bullet, lq + prev[s + 1]) + log_b[s + 1]
        return new, bullet

    def step(self, symbol: int) -> SwitchState:
        symbol = int(symbol)
        self.logmass, self.bullet = self._masses(symbol)
        if self.config.mode is not Mode.FIXED:
            self.store.append(symbol)
        if self.depth:
            self.window.append(symbol)
            if len(self.window) > self.depth:
                del self.window[0]
        self.n += 1
        return self

    def next_logprobs(self) -> np.ndarray:
        """``log P(x_1^n a)`` for every symbol ``a``, without consuming anything."""
        out = np.empty(self.config.alphabet_size)
        for a in range(out.size):
            masses, bullet = self._masses(a)
            out[a] = logsumexp(masses + [bullet])
        return out

    def feed(self, symbols: Sequence[int]) -> SwitchState:
        for a in symbols:
            self.step(a)
        return self

    def total_logprob(self) -> float:
        """Natural log of ``P(x_1^n)``."""
        if self.n == 0:
            raise ValueError("no symbols consumed")
        return logsumexp(self.logmass + [self.bullet])

    def code_length(self) -> float:
        return -self.total_logprob() * LOG2E

    def order_mass(self) -> list[float]:
        """Posterior share of each order ``-1 .. s`` followed by the bucket."""
        total = self.total_logprob()
        return [math.exp(v - total) for v in self.logmass + [self.bullet]]

    def copy(self) -> SwitchState:
        other = SwitchState.__new__(SwitchState)
        other.config = self.config
        other.depth = self.depth
        other.store = self.store if self.store.frozen else self.store.copy()
        other.n = self.n
        other.logmass = list(self.logmass)
        other.bullet = self.bullet
        other.window = list(self.window)
        return other


@numba.njit(cache=True)
def _lae(a, b):
    if a == -np.inf:
        return b
    if b == -np.inf:
        return a
    if a < b:
        a, b = b, a
    return a + np.log1p(np.exp(b - a))


@numba.njit(cache=True)
def _switch_kernel(log_b, logp, logq, s, totals, final):
    n = log_b.shape[0]
    prev = np.full(s + 2, -np.inf)
    cur = np.full(s + 2, -np.inf)
    prev[0] = 0.0
    bullet = -np.inf
    for t in range(n):
        kmax = t if t < s else s
        lp = logp[t]
        lq = logq[t]
        for i in range(kmax + 2):
            up = lq + prev[i - 1] if i > 0 else -np.inf
            cur[i] = _lae(lp + prev[i], up) + log_b[t, i]
        if t >= s + 1:
            bullet = _lae(bullet, lq + prev[s + 1]) + log_b[t, s + 1]
        top = bullet
        for i in range(kmax + 2):
            if cur[i] > top:
                top = cur[i]
        acc = 0.0
        for i in range(kmax + 2):
            acc += np.exp(cur[i] - top)
        if bullet > -np.inf:
            acc += np.exp(bullet - top)
        totals[t] = top + np.log(acc)
        for i in range(s + 2):
            prev[i] = cur[i]
    for i in range(s + 2):
        final[i] = prev[i]
    final[s + 2] = bullet


class SwitchModel:
    """Bulk evaluator for one configuration; caches the training count table."""

    def __init__(self, config: ModelConfig, table: CountTable | None = None) -> None:
        self.config = config
        self.name = config.mode.value
        self._training = (
            as_symbols(config.training, config.alphabet_size) if config.training is not None else None
        )
        self._table = table

    @property
    def training(self) -> np.ndarray | None:
        return self._training

    def resolve_depth(self, x: Sequence[int] | np.ndarray) -> int:
        """The configured depth, or the exact depth for ``x`` in automatic mode."""
        if self.config.depth is not None:
            return self.config.depth
        from .repeats import max_repeat_length

        x = as_symbols(x, self.config.alphabet_size)
        z = x if self._training is None else np.concatenate([self._training, x])
        return max_repeat_length(z).depth

    def with_depth(self, depth: int) -> SwitchModel:
        other = SwitchModel(self.config.with_depth(depth), self._table)
        other._training = self._training
        return other

    def table(self, depth: int | None = None) -> CountTable | None:
        if self._training is None:
            return None
        depth = self.config.depth if depth is None else depth
        if self._table is None or self._table.depth < depth:
            self._table = CountTable.from_corpus(self._training, depth, self.config.alphabet_size)
        return self._table

    def _run(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray, int]:
        cfg = self.config
        x = as_symbols(x, cfg.alphabet_size)
        if x.size == 0:
            raise ValueError("cannot evaluate an empty sequence")
        s = self.resolve_depth(x)
        # orders at or above len(x) never receive mass and the bucket stays
        # empty until len(x) > s, so a shorter cap gives the same values
        s = min(s, x.size - 1)
        occ, ext = context_counts(x, s, cfg.alphabet_size, cfg.mode, self.table(s))
        log_b = ladder_logprobs(occ, ext, cfg.alphabet_size, cfg.smoothing)
        del occ, ext
        logp, logq = log_transition_weights(x.size, cfg.alpha)
        totals = np.empty(x.size, dtype=np.float64)
        final = np.empty(s + 3, dtype=np.float64)
        _switch_kernel(log_b, logp, logq, s, totals, final)
        return totals, final, s

    def prefix_logprobs(self, x: Sequence[int] | np.ndarray) -> np.ndarray:
        """``log P(x_1^t)`` (natural log) for ``t = 1 .. len(x)``."""
        return self._run(x)[0]

    def logprob(self, x: Sequence[int] | np.ndarray) -> float:
        return float(self.prefix_logprobs(x)[-1])

    def code_length(self, x: Sequence[int] | np.ndarray) -> float:
        """``-log2 P(x)`` in bits."""
        return -self.logprob(x) * LOG2E

    def code_lengths(self, x: Sequence[int] | np.ndarray, ns: Sequence[int]) -> np.ndarray:
        """Code lengths in bits of the prefixes of ``x`` with the given lengths, from one pass."""
        ns = np.asarray(ns, dtype=np.int64)
        totals = self.prefix_logprobs(x)
        if ns.size and (ns.min() < 1 or ns.max() > totals.size):
            raise ValueError("checkpoint outside 1..len(x)")
        return -totals[ns - 1] * LOG2E

    def order_mass(self, x: Sequence[int] | np.ndarray) -> np.ndarray:
        """Final share of mass on orders ``-1 .. s`` and the bucket after reading ``x``."""
        totals, final, s = self._run(x)
        full = self.resolve_depth(x)
        if s < full:
            final = np.concatenate([final[:-1], np.full(full - s, -np.inf), final[-1:]])
        return np.exp(final - totals[-1])

    def new_state(self) -> SwitchState:
        if self.config.depth is None:
            raise ConfigurationError("a streaming state needs a concrete depth")
        return SwitchState.init(self.config)
