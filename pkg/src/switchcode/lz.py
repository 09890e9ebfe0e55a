"""Incremental (LZ78) parsing and its idealized code length.

Each phrase is the longest previously parsed phrase extended by one literal.
Phrase ``i`` (1-based) costs ``log2(i) + log2(D)`` bits: a pointer to one of
the ``i`` possible prefixes (the empty phrase included) plus the literal.
A trailing phrase that ends the input before becoming new is coded the same
way, with its last symbol as the literal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .symbols import as_symbols

LN2 = math.log(2.0)


@dataclass
class LzParse:
    phrases: list[tuple[int, int]]
    alphabet_size: int

    @property
    def code_bits(self) -> float:
        return phrase_cost(len(self.phrases), self.alphabet_size)

    def decode(self) -> list[int]:
        table: list[tuple[int, ...]] = [()]
        out: list[int] = []
        for prefix, literal in self.phrases:
            phrase = table[prefix] + (literal,)
            table.append(phrase)
            out.extend(phrase)
        return out


def phrase_cost(c: int, alphabet_size: int) -> float:
    """Bits for ``c`` phrases: ``sum_{i<=c} log2 i + c log2 D``."""
    return math.lgamma(c + 1) / LN2 + c * math.log2(alphabet_size)


def lz_parse(z: Sequence[int] | bytes | np.ndarray, alphabet_size: int = 256) -> LzParse:
    seq = as_symbols(z, alphabet_size).tolist()
    if not seq:
        raise ValueError("cannot parse an empty input")
    trie: dict[tuple[int, int], int] = {}
    phrases: list[tuple[int, int]] = []
    node = 0
    parent = 0
    for a in seq:
        child = trie.get((node, a))
        if child is None:
            phrases.append((node, a))
            trie[(node, a)] = len(phrases)
            node = 0
        else:
            parent, node = node, child
    if node:
        phrases.append((parent, seq[-1]))
    return LzParse(phrases, alphabet_size)


def lz_code_length(z: Sequence[int] | bytes | np.ndarray, alphabet_size: int = 256) -> float:
    return lz_parse(z, alphabet_size).code_bits


def lz_prefix_phrase_counts(z: Sequence[int] | bytes | np.ndarray, alphabet_size: int = 256) -> np.ndarray:
    """Number of phrases in the parse of each prefix ``z[:t]``, ``t = 1 .. len(z)``."""
    seq = as_symbols(z, alphabet_size).tolist()
    ids: dict[tuple[int, int], int] = {}
    out = np.empty(len(seq), dtype=np.int64)
    done = 0
    node = 0
    for t, a in enumerate(seq):
        child = ids.get((node, a))
        if child is not None:
            node = child
            out[t] = done + 1
        else:
            done += 1
            ids[(node, a)] = done
            node = 0
            out[t] = done
    return out


class LzCode:
    """LZ78 code lengths behind the same interface as :class:`~switchcode.switch.SwitchModel`."""

    name = "lz"

    def __init__(self, alphabet_size: int = 256) -> None:
        self.alphabet_size = alphabet_size

    def code_length(self, x: Sequence[int] | np.ndarray) -> float:
        return lz_code_length(x, self.alphabet_size)

    def code_lengths(self, x: Sequence[int] | np.ndarray, ns: Sequence[int]) -> np.ndarray:
        counts = lz_prefix_phrase_counts(x, self.alphabet_size)
        ns = np.asarray(ns, dtype=np.int64)
        if ns.size and (ns.min() < 1 or ns.max() > counts.size):
            raise ValueError("checkpoint outside 1..len(x)")
        return np.array([phrase_cost(int(counts[n - 1]), self.alphabet_size) for n in ns])
