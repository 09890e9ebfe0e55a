"""Conversion of raw inputs into integer symbol arrays."""

from __future__ import annotations

from typing import Sequence, Union

import numpy as np

SymbolSource = Union[bytes, bytearray, memoryview, str, Sequence[int], np.ndarray]

LETTERS27 = 27


class SymbolError(ValueError):
    """Raised when a symbol falls outside the configured alphabet."""


def as_symbols(data: SymbolSource, alphabet_size: int = 256) -> np.ndarray:
    """Return ``data`` as a 1-D int64 array, checking every symbol is < D.

    Strings are encoded as latin-1 so each character maps to one byte.
    """
    if isinstance(data, str):
        data = data.encode("latin-1")
    if isinstance(data, (bytes, bytearray, memoryview)):
        arr = np.frombuffer(bytes(data), dtype=np.uint8).astype(np.int64)
    else:
        arr = np.asarray(data, dtype=np.int64).reshape(-1)
    if arr.size and (arr.min() < 0 or arr.max() >= alphabet_size):
        bad = int(arr[(arr < 0) | (arr >= alphabet_size)][0])
        raise SymbolError(f"symbol {bad} outside alphabet of size {alphabet_size}")
    return arr


def filter27(raw: bytes) -> np.ndarray:
    """Lowercase letters to 0..25; every run of other bytes becomes one space (26)."""
    arr = np.frombuffer(raw, dtype=np.uint8)
    lower = np.where((arr >= 65) & (arr <= 90), arr + 32, arr)
    is_letter = (lower >= 97) & (lower <= 122)
    out = np.where(is_letter, lower.astype(np.int64) - 97, 26)
    if out.size == 0:
        return out
    keep = np.ones(out.size, dtype=bool)
    keep[1:] = ~((out[1:] == 26) & (out[:-1] == 26))
    return out[keep]
