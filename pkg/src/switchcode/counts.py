"""Substring occurrence statistics for the adaptive Markov conditionals.

Two representations live here.  :class:`CountStore` is the incremental,
dictionary-backed store that is updated one symbol at a time and is what the
streaming :class:`~switchcode.switch.SwitchState` consults.  For whole-corpus
work the same numbers are produced in bulk by :func:`context_counts`, which
ranks every gram of length ``1..s+1`` with a stable sort and reads off, for
each position, how many times the gram occurred before it.  A training corpus
is condensed into a :class:`CountTable` once and reused across evaluations.

Counting convention, for a string ``z`` of length ``m``:
``count(w, z)`` is the number of (overlapping) start positions of ``w`` in
``z``; the empty word occurs ``m + 1`` times; any word occurs zero times in
the "string of length -1".
"""

from __future__ import annotations

import enum
import hashlib
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import BinaryIO, Iterable, Iterator, Sequence

import numpy as np

Gram = tuple[int, ...]

TABLE_FORMAT_VERSION = 1


class Mode(str, enum.Enum):
    PLAIN = "plain"
    FIXED = "fixed"
    PREADAPTED = "preadapted"


class FrozenStoreError(RuntimeError):
    """Raised when appending to a store whose training counts are frozen."""


class TrainingError(ValueError):
    """Raised for missing or empty training data."""


def count(w: Sequence[int] | bytes | str, z: Sequence[int] | bytes | str) -> int:
    """Number of positions ``i`` with ``z[i:i+len(w)] == w``; ``len(z)+1`` for empty ``w``."""
    w, z = list(w), list(z)
    k, n = len(w), len(z)
    if k > n:
        return 0
    return sum(1 for i in range(n - k + 1) if z[i : i + k] == w)


class CountStore:
    """Occurrence (``occ``) and extension (``ext``) counts of grams up to length ``depth + 1``.

    ``occ[w]`` counts occurrences of ``w`` in the counted string; ``ext[w]``
    counts occurrences followed by at least one more symbol, which equals
    ``count(w, counted_string[:-1])``.  Both are keyed by tuples of ints.
    """

    def __init__(self, depth: int, mode: Mode | str = Mode.PLAIN) -> None:
        if depth < 0:
            raise ValueError("depth must be nonnegative")
        self.depth = depth
        self.mode = Mode(mode)
        self.occ: dict[Gram, int] = {}
        self.ext: dict[Gram, int] = {}
        self.history: deque[int] = deque(maxlen=depth)
        self.appended = 0
        self.frozen = False

    def append(self, a: int) -> None:
        if self.frozen:
            raise FrozenStoreError("fixed-mode training counts are immutable")
        a = int(a)
        occ, ext = self.occ, self.ext
        hist = tuple(self.history)
        h = len(hist)
        for l in range(h + 1):
            w = hist[h - l :]
            ext[w] = ext.get(w, 0) + 1
            wa = w + (a,)
            occ[wa] = occ.get(wa, 0) + 1
        if self.depth:
            self.history.append(a)
        self.appended += 1

    def extend(self, symbols: Iterable[int]) -> None:
        for a in symbols:
            self.append(a)

    def freeze(self) -> None:
        self.frozen = True

    def occurrences(self, w: Gram) -> int:
        return self.occ.get(w, 0)

    def extensions(self, w: Gram) -> int:
        return self.ext.get(w, 0)

    def copy(self) -> CountStore:
        other = CountStore(self.depth, self.mode)
        other.occ = dict(self.occ)
        other.ext = dict(self.ext)
        other.history = deque(self.history, maxlen=self.depth)
        other.appended = self.appended
        other.frozen = self.frozen
        return other

    def __repr__(self) -> str:
        return (
            f"CountStore(depth={self.depth}, mode={self.mode.value}, "
            f"appended={self.appended}, grams={len(self.occ)}, frozen={self.frozen})"
        )


def train(corpus: Sequence[int] | bytes, depth: int, mode: Mode | str = Mode.PREADAPTED) -> CountStore:
    """Build a store over ``corpus`` as if every symbol had been appended.

    Fixed stores are frozen afterwards; preadapted stores keep their history
    so grams spanning the training/input junction get counted.
    """
    mode = Mode(mode)
    if len(corpus) == 0:
        raise TrainingError("training corpus is empty")
    store = CountStore(depth, mode)
    store.extend(corpus)
    if mode is Mode.FIXED:
        store.freeze()
    return store


# ---------------------------------------------------------------------------
# Bulk counting


def _rank(keys: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Dense ids, prior-occurrence counts and sorted unique keys of ``keys``."""
    order = np.argsort(keys, kind="stable")
    sk = keys[order]
    new = np.empty(sk.size, dtype=bool)
    new[:1] = True
    np.not_equal(sk[1:], sk[:-1], out=new[1:])
    group = np.cumsum(new) - 1
    starts = np.flatnonzero(new)
    ids = np.empty(keys.size, dtype=np.int64)
    ids[order] = group
    prior = np.empty(keys.size, dtype=np.int64)
    prior[order] = np.arange(sk.size) - starts[group]
    return ids, prior, sk[new]


def gram_levels(
    z: np.ndarray, max_len: int, alphabet_size: int
) -> Iterator[tuple[int, np.ndarray, np.ndarray, np.ndarray]]:
    """Yield ``(l, ids, prior, keys)`` for gram lengths ``l = 1..max_len``.

    Arrays are aligned to end positions ``l-1 .. len(z)-1``: entry ``i``
    describes the gram ``z[i : i+l]``.  ``ids`` are dense ranks, ``prior``
    counts earlier occurrences of the same gram, and ``keys`` are the sorted
    unique level keys (``parent_id * D + last_symbol``).
    """
    z = np.asarray(z, dtype=np.int64)
    ids = None
    for l in range(1, max_len + 1):
        if z.size < l:
            return
        if ids is None:
            keys = z
        else:
            keys = ids[:-1] * alphabet_size + z[l - 1 :]
        ids, prior, uniq = _rank(keys)
        yield l, ids, prior, uniq


@dataclass
class CountTable:
    """Frozen gram counts of a training corpus, indexed for bulk lookup.

    ``keys[l-1]`` holds the sorted keys of all grams of length ``l`` (the
    index of a key is the gram's id at that level) and ``counts[l-1]`` their
    occurrence counts in the corpus.  ``last_ids[l-1]`` is the id of the gram
    ending at the final corpus position, whose count drops by one when the
    last symbol is removed.
    """

    depth: int
    alphabet_size: int
    length: int
    keys: list[np.ndarray]
    counts: list[np.ndarray]
    last_ids: list[int]
    tail: np.ndarray
    digest: str = ""

    @classmethod
    def from_corpus(cls, corpus: Sequence[int] | bytes | np.ndarray, depth: int, alphabet_size: int) -> CountTable:
        y = np.asarray(
            np.frombuffer(bytes(corpus), dtype=np.uint8) if isinstance(corpus, (bytes, bytearray)) else corpus,
            dtype=np.int64,
        )
        if y.size == 0:
            raise TrainingError("training corpus is empty")
        keys, counts, last_ids = [], [], []
        for _, ids, _, uniq in gram_levels(y, depth + 1, alphabet_size):
            cnt = np.bincount(ids, minlength=uniq.size)
            keys.append(uniq)
            counts.append(cnt.astype(np.int64))
            last_ids.append(int(ids[-1]))
        tail = y[max(0, y.size - depth) :].copy() if depth else y[:0].copy()
        return cls(depth, alphabet_size, int(y.size), keys, counts, last_ids, tail, corpus_digest(y))

    def lookup(self, x: np.ndarray, max_len: int | None = None) -> list[np.ndarray]:
        """Ids of the grams of ``x`` in this table (``-1`` when absent), per length.

        Element ``l-1`` is aligned like :func:`gram_levels` output.
        """
        x = np.asarray(x, dtype=np.int64)
        max_len = self.depth + 1 if max_len is None else max_len
        out: list[np.ndarray] = []
        prev = None
        for l in range(1, max_len + 1):
            if x.size < l:
                break
            if l > len(self.keys):
                # Corpus shorter than l: no gram of this length occurs in it.
                prev = np.full(x.size - l + 1, -1, dtype=np.int64)
                out.append(prev)
                continue
            if prev is None:
                keys = x
                ok = np.ones(x.size, dtype=bool)
            else:
                parent = prev[:-1]
                ok = parent >= 0
                keys = np.where(ok, parent, 0) * self.alphabet_size + x[l - 1 :]
            table = self.keys[l - 1]
            idx = np.searchsorted(table, keys)
            idx_c = np.minimum(idx, max(table.size - 1, 0))
            found = ok & (idx < table.size)
            if table.size:
                found &= table[idx_c] == keys
            prev = np.where(found, idx_c, -1)
            out.append(prev)
        return out

    def gram_counts(self, ids: np.ndarray, level: int, minus_last: bool = False) -> np.ndarray:
        """Corpus counts for gram ids at ``level`` (0 where the id is ``-1``)."""
        if level > len(self.counts):
            return np.zeros(ids.size, dtype=np.int64)
        cnt = self.counts[level - 1]
        got = np.where(ids >= 0, cnt[np.maximum(ids, 0)], 0)
        if minus_last:
            got = got - (ids == self.last_ids[level - 1])
        return got

    def save(self, path: str | Path | BinaryIO) -> None:
        if not isinstance(path, (str, Path)):
            self._write(path)
            return
        with open(path, "wb") as fh:
            self._write(fh)

    def _write(self, fh: BinaryIO) -> None:
        arrays = {f"keys{i}": k for i, k in enumerate(self.keys)}
        arrays.update({f"counts{i}": c for i, c in enumerate(self.counts)})
        np.savez(
            fh,
            version=np.int64(TABLE_FORMAT_VERSION),
            meta=np.array([self.depth, self.alphabet_size, self.length], dtype=np.int64),
            last_ids=np.array(self.last_ids, dtype=np.int64),
            tail=self.tail,
            digest=np.array(self.digest),
            **arrays,
        )

    @classmethod
    def load(cls, path: str | Path) -> CountTable:
        with np.load(path, allow_pickle=False) as data:
            if int(data["version"]) != TABLE_FORMAT_VERSION:
                raise ValueError(f"unsupported count table version {int(data['version'])}")
            depth, alphabet_size, length = (int(v) for v in data["meta"])
            levels = len(data["last_ids"])
            return cls(
                depth,
                alphabet_size,
                length,
                [data[f"keys{i}"] for i in range(levels)],
                [data[f"counts{i}"] for i in range(levels)],
                [int(v) for v in data["last_ids"]],
                data["tail"],
                str(data["digest"]),
            )


def corpus_digest(y: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(y, dtype=np.int64).tobytes()).hexdigest()


def context_counts(
    x: np.ndarray,
    depth: int,
    alphabet_size: int,
    mode: Mode | str = Mode.PLAIN,
    table: CountTable | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Numerator and denominator counts for every position and order.

    Returns ``(occ, ext)`` of shape ``(len(x), depth + 1)``.  Row ``t`` column
    ``k`` holds, for predicting ``x[t]`` from the order-``k`` context
    ``x[t-k:t]``, the count of ``x[t-k:t+1]`` in the counted prefix and the
    count of ``x[t-k:t]`` in that prefix minus its last symbol.  Entries with
    ``k > t`` are zero; they are never reached by the switch recursion.
    """
    mode = Mode(mode)
    x = np.asarray(x, dtype=np.int64)
    n, s = x.size, depth
    occ = np.zeros((n, s + 1), dtype=np.int64)
    ext = np.zeros((n, s + 1), dtype=np.int64)
    if n == 0:
        return occ, ext
    t = np.arange(n, dtype=np.int64)

    if mode is Mode.PLAIN:
        ext[:, 0] = t
        for l, _, prior, _ in gram_levels(x, s + 1, alphabet_size):
            occ[l - 1 :, l - 1] = prior
            if l <= s:
                ext[l:, l] = prior[:-1]
        return occ, ext

    if table is None:
        raise TrainingError(f"{mode.value} mode needs a training table")
    if table.alphabet_size != alphabet_size or table.depth < s:
        raise TrainingError(
            f"table built for D={table.alphabet_size}, depth={table.depth}; need D={alphabet_size}, depth>={s}"
        )
    J = table.length
    yids = table.lookup(x, s + 1)

    if mode is Mode.FIXED:
        ext[:, 0] = J
        for l, ids in enumerate(yids, start=1):
            occ[l - 1 :, l - 1] = table.gram_counts(ids, l)
            if l <= s:
                ext[l:, l] = table.gram_counts(ids, l, minus_last=True)[:-1]
        return occ, ext

    # Preadapted: counts over the concatenation y + x.  Occurrences lying
    # wholly in y come from the table; those ending inside x (including grams
    # that straddle the junction) come from ranking tail(y) + x.
    ext[:, 0] = J + t
    tail = np.asarray(table.tail[max(0, table.tail.size - s) :] if s else table.tail[:0], dtype=np.int64)
    T = tail.size
    zz = np.concatenate([tail, x])
    local = {}
    for l, ids, prior, uniq in gram_levels(zz, s + 1, alphabet_size):
        before = max(T - l + 1, 0)
        in_tail = np.bincount(ids[:before], minlength=uniq.size)
        full = np.zeros(n, dtype=np.int64)
        start = max(l - 1 - T, 0)
        full[start:] = prior[before:] - in_tail[ids[before:]]
        local[l] = full
    for l, ids in enumerate(yids, start=1):
        ycnt = table.gram_counts(ids, l)
        occ[l - 1 :, l - 1] = ycnt + local[l][l - 1 :]
        if l <= s:
            ext[l:, l] = ycnt[:-1] + local[l][l - 1 : -1]
    return occ, ext
