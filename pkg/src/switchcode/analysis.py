"""Code-length series, pointwise mutual information and power-law fits.

Blocks are the prefixes ``x_1^n`` of one text at ``n = 2, 4, 8, ...``.  The
mutual information of a block is

    mi(n) = bits(x_1^{n/2}) + bits(x_{n/2+1}^n) - bits(x_1^n)

where the second half is coded from a fresh model (counts back at their
initial or trained state), so it is its marginal code length.  It can be
negative.  Power laws ``y = c n^gamma`` are fitted over the points with
``y > 0``, either by least squares on the raw values (the default) or by
ordinary least squares of ``log2 y`` on ``log2 n``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import IO, Iterable, Protocol, Sequence

import numpy as np
from scipy.optimize import curve_fit

from .lz import LzCode
from .switch import ModelConfig, SwitchModel
from .symbols import as_symbols

DEFAULT_FIT_MIN_N = 8
FIT_METHODS = ("linear", "loglog")


class FitError(ValueError):
    """Raised when too few positive points are available for a fit."""


class CodeModel(Protocol):
    name: str

    def code_length(self, x: Sequence[int] | np.ndarray) -> float: ...

    def code_lengths(self, x: Sequence[int] | np.ndarray, ns: Sequence[int]) -> np.ndarray: ...


@dataclass
class CodeLengthSeries:
    model: str
    points: list[tuple[int, float]]
    source: str = ""

    def rates(self) -> list[tuple[int, float]]:
        return [(n, bits / n) for n, bits in self.points]


@dataclass
class MiSeries:
    model: str
    points: list[tuple[int, float]]
    source: str = ""


@dataclass
class PowerLawFit:
    c: float
    gamma: float
    n_range: tuple[float, float]
    residual: float
    model: str = ""
    fitted: list[tuple[int, float]] = field(default_factory=list, repr=False)

    def __call__(self, n: float) -> float:
        return self.c * n**self.gamma


def as_model(model: CodeModel | ModelConfig | str, alphabet_size: int = 256) -> CodeModel:
    if isinstance(model, ModelConfig):
        return SwitchModel(model)
    if model == "lz":
        return LzCode(alphabet_size)
    return model


def doubling_lengths(max_n: int) -> list[int]:
    """``[2, 4, ..., 2^floor(log2 max_n)]``."""
    if max_n < 2:
        raise ValueError("block lengths start at 2")
    out, n = [], 2
    while n <= max_n:
        out.append(n)
        n *= 2
    return out


def _prepare(model, corpus, max_n: int | None):
    model = as_model(model)
    alphabet = model.config.alphabet_size if isinstance(model, SwitchModel) else getattr(model, "alphabet_size", 256)
    x = as_symbols(corpus, alphabet)
    if x.size < 2:
        raise ValueError("corpus must hold at least 2 symbols")
    max_n = x.size if max_n is None else max_n
    if max_n > x.size:
        raise ValueError(f"max_n={max_n} exceeds corpus length {x.size}")
    ns = doubling_lengths(max_n)
    x = x[: ns[-1]]
    if isinstance(model, SwitchModel) and model.config.depth is None:
        # One depth for every block: exact for all of them, since a block's
        # depth never exceeds that of the text containing it.
        model = model.with_depth(model.resolve_depth(x))
    return model, x, ns


def code_length_series(
    model: CodeModel | ModelConfig | str,
    corpus: Sequence[int] | bytes | np.ndarray,
    max_n: int | None = None,
    source: str = "",
) -> CodeLengthSeries:
    """Code lengths of the prefixes of lengths 2, 4, ..., from one sequential pass."""
    model, x, ns = _prepare(model, corpus, max_n)
    bits = model.code_lengths(x, ns)
    return CodeLengthSeries(model.name, [(n, float(b)) for n, b in zip(ns, bits)], source)


def mi_series(
    model: CodeModel | ModelConfig | str,
    corpus: Sequence[int] | bytes | np.ndarray,
    max_n: int | None = None,
    source: str = "",
    with_rates: bool = False,
) -> MiSeries | tuple[MiSeries, CodeLengthSeries]:
    model, x, ns = _prepare(model, corpus, max_n)
    checkpoints = sorted(set(ns) | {n // 2 for n in ns})
    bits = dict(zip(checkpoints, model.code_lengths(x, checkpoints)))
    points = []
    for n in ns:
        second = model.code_length(x[n // 2 : n])
        points.append((n, float(bits[n // 2] + second - bits[n])))
    mi = MiSeries(model.name, points, source)
    if with_rates:
        return mi, CodeLengthSeries(model.name, [(n, float(bits[n])) for n in ns], source)
    return mi


def parse_range(text: str | None) -> tuple[float, float] | None:
    """``"8:524288"``, ``"8:"`` or ``":4096"`` to a closed interval."""
    if not text:
        return None
    lo, _, hi = text.partition(":")
    return (float(lo) if lo else 0.0, float(hi) if hi else math.inf)


def fit_power_law(
    points: Iterable[tuple[float, float]],
    n_range: tuple[float, float] | None = None,
    model: str = "",
    method: str = "linear",
) -> PowerLawFit:
    """Fit ``y = c n^gamma`` to the points with ``y > 0`` and ``n`` in ``n_range``.

    ``method="linear"`` minimizes the squared error of ``y`` itself, so the
    largest blocks dominate; ``method="loglog"`` is ordinary least squares of
    ``log2 y`` on ``log2 n``.  The linear fit starts from the log-log one.
    ``n_range`` defaults to ``n >= 8``.  The reported residual is the RMS
    deviation in log2 space for either method.
    """
    if method not in FIT_METHODS:
        raise ValueError(f"fit method must be one of {FIT_METHODS}, got {method!r}")
    lo, hi = n_range if n_range is not None else (DEFAULT_FIT_MIN_N, math.inf)
    pts = [(n, y) for n, y in points if y > 0 and lo <= n <= hi]
    if len(pts) < 3:
        raise FitError(f"need at least 3 positive points in [{lo}, {hi}], got {len(pts)}")
    n = np.array([p[0] for p in pts], dtype=float)
    y = np.array([p[1] for p in pts], dtype=float)
    gamma, intercept = np.polyfit(np.log2(n), np.log2(y), 1)
    c = 2.0**intercept
    if method == "linear":
        (c, gamma), _ = curve_fit(lambda t, c, g: c * t**g, n, y, p0=(c, gamma), maxfev=20000)
        if not (np.isfinite(c) and np.isfinite(gamma) and c > 0):
            raise FitError("least-squares fit did not converge")
    resid = np.log2(y) - np.log2(c * n**gamma)
    return PowerLawFit(
        c=float(c),
        gamma=float(gamma),
        n_range=(float(n.min()), float(n.max())),
        residual=float(np.sqrt(np.mean(resid**2))),
        model=model,
        fitted=pts,
    )


def _fmt(v: float) -> str:
    return repr(float(v))


def write_rates_csv(series: Iterable[CodeLengthSeries], out: IO[str]) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["n", "model", "bits", "rate_bpc"])
    for s in series:
        for n, bits in s.points:
            w.writerow([n, s.model, _fmt(bits), _fmt(bits / n)])


def write_mi_csv(series: Iterable[MiSeries], out: IO[str]) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["n", "model", "mi_bits"])
    for s in series:
        for n, mi in s.points:
            w.writerow([n, s.model, _fmt(mi)])


def write_fits_csv(fits: Iterable[PowerLawFit], out: IO[str]) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["model", "c", "gamma", "residual", "n_min", "n_max"])
    for f in fits:
        w.writerow([f.model, _fmt(f.c), _fmt(f.gamma), _fmt(f.residual), int(f.n_range[0]), int(f.n_range[1])])


def write_plot_data(fits: Iterable[PowerLawFit], out: IO[str]) -> None:
    """Whitespace-separated ``model log2_n log2_y log2_fit`` rows for log-log plots."""
    out.write("# model log2_n log2_y log2_fit\n")
    for f in fits:
        for n, y in f.fitted:
            out.write(f"{f.model} {_fmt(math.log2(n))} {_fmt(math.log2(y))} {_fmt(math.log2(f(n)))}\n")
