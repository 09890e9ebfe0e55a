"""Depth of a string: the length of its longest substring occurring twice.

Occurrences may overlap, so ``"aaaa"`` has depth 3.  The default method is a
suffix automaton (linear in the input length, with dictionary transitions);
for inputs of many millions of symbols a rank-doubling search on numpy arrays
uses far less memory.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

AUTOMATON_LIMIT = 2_000_000


@dataclass(frozen=True)
class DepthResult:
    depth: int
    offset: int
    witness: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.witness) != self.depth:
            raise ValueError("witness length must equal depth")


def _automaton_depth(z: Sequence[int]) -> tuple[int, int]:
    length = [0]
    link = [-1]
    trans: list[dict[int, int]] = [{}]
    firstpos = [-1]
    endpos = [0]
    last = 0
    for i, c in enumerate(z):
        cur = len(length)
        length.append(length[last] + 1)
        link.append(-1)
        trans.append({})
        firstpos.append(i)
        endpos.append(1)
        p = last
        while p != -1 and c not in trans[p]:
            trans[p][c] = cur
            p = link[p]
        if p == -1:
            link[cur] = 0
        else:
            q = trans[p][c]
            if length[p] + 1 == length[q]:
                link[cur] = q
            else:
                clone = len(length)
                length.append(length[p] + 1)
                link.append(link[q])
                trans.append(dict(trans[q]))
                firstpos.append(firstpos[q])
                endpos.append(0)
                while p != -1 and trans[p].get(c) == q:
                    trans[p][c] = clone
                    p = link[p]
                link[q] = clone
                link[cur] = clone
        last = cur

    # Accumulate end-position counts from longer states to their suffix links.
    buckets: list[list[int]] = [[] for _ in range(len(z) + 1)]
    for v in range(1, len(length)):
        buckets[length[v]].append(v)
    best, best_end = 0, -1
    for l in range(len(z), 0, -1):
        for v in buckets[l]:
            if endpos[v] >= 2 and l > best:
                best, best_end = l, firstpos[v]
            endpos[link[v]] += endpos[v]
    return best, best_end


def _repeats_at(z: np.ndarray, k: int, ranks: dict[int, np.ndarray]) -> int:
    """Start of a repeated length-``k`` gram, or -1."""
    a = 1 << (k.bit_length() - 1)
    base = ranks[a]
    m = z.size - k + 1
    keys = base[:m] * (int(base.max()) + 1) + base[k - a : k - a + m]
    order = np.argsort(keys, kind="stable")
    sk = keys[order]
    dup = np.flatnonzero(sk[1:] == sk[:-1])
    return int(order[dup[0]]) if dup.size else -1


def _doubling_depth(z: np.ndarray) -> tuple[int, int]:
    z = np.asarray(z, dtype=np.int64)
    n = z.size
    ranks = {1: np.unique(z, return_inverse=True)[1].astype(np.int64)}
    if _repeats_at(z, 1, ranks) < 0:
        return 0, -1
    lo, hi = 1, None
    a = 1
    while hi is None:
        nxt = 2 * a
        if nxt > n - 1:
            hi = n
            break
        prev = ranks[a]
        m = n - nxt + 1
        keys = prev[:m] * (int(prev.max()) + 1) + prev[a : a + m]
        ranks[nxt] = np.unique(keys, return_inverse=True)[1].astype(np.int64)
        if _repeats_at(z, nxt, ranks) >= 0:
            lo, a = nxt, nxt
        else:
            hi = nxt
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _repeats_at(z, mid, ranks) >= 0:
            lo = mid
        else:
            hi = mid
    return lo, _repeats_at(z, lo, ranks) + lo - 1


def max_repeat_length(z: Sequence[int] | bytes | np.ndarray, method: str = "auto") -> DepthResult:
    """Longest substring of ``z`` with at least two (possibly overlapping) occurrences.

    ``method`` is ``"automaton"``, ``"doubling"`` or ``"auto"`` (automaton up
    to :data:`AUTOMATON_LIMIT` symbols).
    """
    if isinstance(z, (bytes, bytearray)):
        seq = list(z)
    else:
        seq = np.asarray(z, dtype=np.int64).tolist()
    if method == "auto":
        method = "automaton" if len(seq) <= AUTOMATON_LIMIT else "doubling"
    if len(seq) <= 1:
        return DepthResult(0, -1, ())
    if method == "automaton":
        depth, end = _automaton_depth(seq)
    elif method == "doubling":
        depth, end = _doubling_depth(np.asarray(seq, dtype=np.int64))
    else:
        raise ValueError(f"unknown method {method!r}")
    if depth == 0:
        return DepthResult(0, -1, ())
    start = end - depth + 1
    return DepthResult(depth, start, tuple(seq[start : end + 1]))
