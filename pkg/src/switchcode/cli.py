"""Command-line front end.

Defaults follow the reference experiment: raw bytes (D=256), alpha=1.001,
depth 7.  Every result file gets a ``<out>.manifest`` companion listing the
configuration and the length and SHA-256 of each input.
"""

from __future__ import annotations

import argparse
import hashlib
import io
import logging
import os
import sys
import tempfile
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import __version__, sources
from .analysis import (
    FIT_METHODS,
    code_length_series,
    fit_power_law,
    mi_series,
    parse_range,
    write_fits_csv,
    write_mi_csv,
    write_plot_data,
    write_rates_csv,
)
from .counts import CountTable, Mode, corpus_digest
from .lz import LzCode, lz_parse
from .repeats import max_repeat_length
from .switch import ModelConfig, SwitchModel
from .symbols import LETTERS27, as_symbols, filter27

log = logging.getLogger("switchcode")

MODELS = ("plain", "fixed", "preadapted", "lz")


class UsageError(Exception):
    pass


def _depth(text: str) -> int | None:
    if text == "auto":
        return None
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("depth must be nonnegative or 'auto'")
    return value


def _models(text: str) -> list[str]:
    names = [m.strip() for m in text.split(",") if m.strip()]
    for m in names:
        if m not in MODELS:
            raise argparse.ArgumentTypeError(f"unknown model {m!r}; choose from {', '.join(MODELS)}")
    return names


def atomic_write(path: str | Path, data: bytes | str) -> None:
    path = Path(path)
    mode = "wb" if isinstance(data, bytes) else "w"
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, mode) as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def _file_facts(path: str | None, raw: bytes | None) -> dict[str, str]:
    if path is None or raw is None:
        return {}
    return {"path": str(path), "bytes": str(len(raw)), "sha256": hashlib.sha256(raw).hexdigest()}


def write_manifest(out: str | Path, entries: dict[str, object]) -> None:
    lines = [f"{k}={entries[k]}" for k in sorted(entries)]
    atomic_write(f"{out}.manifest", "\n".join(lines) + "\n")


def _read(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc


def _load_symbols(raw: bytes, letters: bool) -> tuple[np.ndarray, int]:
    if letters:
        return filter27(raw), LETTERS27
    return as_symbols(raw, 256), 256


def _table(cache: str | None, y: np.ndarray, depth: int, alphabet: int) -> CountTable:
    if cache is None:
        return CountTable.from_corpus(y, depth, alphabet)
    digest = corpus_digest(y)
    path = Path(cache) / f"counts-{digest[:20]}-D{alphabet}-s{depth}.npz"
    if path.exists():
        table = CountTable.load(path)
        if table.digest == digest and table.depth >= depth and table.alphabet_size == alphabet:
            log.info("loaded count table %s", path)
            return table
    table = CountTable.from_corpus(y, depth, alphabet)
    Path(cache).mkdir(parents=True, exist_ok=True)
    buf = io.BytesIO()
    table.save(buf)
    atomic_write(path, buf.getvalue())
    return table


def _build_models(args, x: np.ndarray, alphabet: int, y: np.ndarray | None):
    built = []
    for name in args.model:
        if name == "lz":
            built.append(LzCode(alphabet))
            continue
        if name != "plain" and y is None:
            raise UsageError(f"model {name!r} needs --train FILE")
        cfg = ModelConfig(
            alphabet_size=alphabet,
            alpha=args.alpha,
            depth=args.depth,
            mode=Mode(name),
            smoothing=args.smoothing,
            training=None if name == "plain" else y,
        )
        model = SwitchModel(cfg)
        if cfg.depth is None:
            n = len(x) if args.max_n is None else args.max_n
            model = model.with_depth(model.resolve_depth(x[: max(n, 1)]))
            log.info("%s: automatic depth %d", name, model.config.depth)
        if y is not None and name != "plain":
            model = SwitchModel(model.config, _table(args.cache, y, model.config.depth, alphabet))
        built.append(model)
    return built


def _inputs(args):
    raw = _read(args.input)
    x, alphabet = _load_symbols(raw, args.letters)
    raw_train = y = None
    if args.train is not None:
        raw_train = _read(args.train)
        y, _ = _load_symbols(raw_train, args.letters)
        if y.size == 0:
            raise UsageError("training file is empty")
    if x.size < 2:
        raise UsageError("input must hold at least 2 symbols")
    if args.max_n is not None and not 2 <= args.max_n <= x.size:
        raise UsageError(f"--max-n must lie in [2, {x.size}]")
    return raw, x, alphabet, raw_train, y


def _manifest_base(args, alphabet: int, raw: bytes, raw_train: bytes | None) -> dict[str, object]:
    entries: dict[str, object] = {
        "command": args.command,
        "tool_version": __version__,
        "alphabet_size": alphabet,
        "alpha": repr(args.alpha),
        "depth": "auto" if args.depth is None else args.depth,
        "models": ",".join(args.model),
        "smoothing": args.smoothing,
        "letters27": args.letters,
        "max_n": args.max_n if args.max_n is not None else "all",
    }
    entries.update({f"input_{k}": v for k, v in _file_facts(args.input, raw).items()})
    entries.update({f"train_{k}": v for k, v in _file_facts(args.train, raw_train).items()})
    return entries


def _emit(args, text: str, manifest: dict[str, object]) -> None:
    if args.out is None:
        sys.stdout.write(text)
        return
    atomic_write(args.out, text)
    write_manifest(args.out, manifest)


def cmd_rate(args) -> int:
    raw, x, alphabet, raw_train, y = _inputs(args)
    series = [code_length_series(m, x, args.max_n, source=args.input) for m in _build_models(args, x, alphabet, y)]
    buf = io.StringIO()
    write_rates_csv(series, buf)
    _emit(args, buf.getvalue(), _manifest_base(args, alphabet, raw, raw_train))
    return 0


def cmd_mi(args) -> int:
    raw, x, alphabet, raw_train, y = _inputs(args)
    series = [mi_series(m, x, args.max_n, source=args.input) for m in _build_models(args, x, alphabet, y)]
    buf = io.StringIO()
    write_mi_csv(series, buf)
    _emit(args, buf.getvalue(), _manifest_base(args, alphabet, raw, raw_train))
    return 0


def cmd_gamma(args) -> int:
    raw, x, alphabet, raw_train, y = _inputs(args)
    n_range = parse_range(args.fit_range)
    fits = []
    for m in _build_models(args, x, alphabet, y):
        mi = mi_series(m, x, args.max_n, source=args.input)
        fits.append(fit_power_law(mi.points, n_range, model=m.name, method=args.fit_method))
    buf = io.StringIO()
    write_fits_csv(fits, buf)
    manifest = _manifest_base(args, alphabet, raw, raw_train)
    manifest["fit_range"] = args.fit_range or "8:"
    manifest["fit_method"] = args.fit_method
    _emit(args, buf.getvalue(), manifest)
    if args.plot_data:
        plot = io.StringIO()
        write_plot_data(fits, plot)
        atomic_write(args.plot_data, plot.getvalue())
    return 0


def cmd_depth(args) -> int:
    raw = _read(args.input)
    x, alphabet = _load_symbols(raw, args.letters)
    if args.train is not None:
        raw_train = _read(args.train)
        y, _ = _load_symbols(raw_train, args.letters)
        x = np.concatenate([y, x])
    else:
        raw_train = None
    result = max_repeat_length(x)
    text = f"depth={result.depth}\noffset={result.offset}\n"
    if args.out is None:
        sys.stdout.write(text)
    else:
        atomic_write(args.out, text)
        entries = {"command": "depth", "tool_version": __version__, "letters27": args.letters}
        entries.update({f"input_{k}": v for k, v in _file_facts(args.input, raw).items()})
        entries.update({f"train_{k}": v for k, v in _file_facts(args.train, raw_train).items()})
        write_manifest(args.out, entries)
    return 0


def cmd_lz(args) -> int:
    raw = _read(args.input)
    x, alphabet = _load_symbols(raw, args.letters)
    if x.size == 0:
        raise UsageError("input is empty")
    parse = lz_parse(x, alphabet)
    text = (
        f"symbols={x.size}\nphrases={len(parse.phrases)}\n"
        f"bits={parse.code_bits!r}\nrate_bpc={parse.code_bits / x.size!r}\n"
    )
    if args.out is None:
        sys.stdout.write(text)
    else:
        atomic_write(args.out, text)
        entries = {"command": "lz", "tool_version": __version__, "alphabet_size": alphabet, "letters27": args.letters}
        entries.update({f"input_{k}": v for k, v in _file_facts(args.input, raw).items()})
        write_manifest(args.out, entries)
    return 0


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",")]


def cmd_gen(args) -> int:
    if args.kind == "iid":
        probs = _floats(args.probs) if args.probs else [1.0 / args.alphabet] * args.alphabet
        spec = sources.iid(probs, args.seed)
    elif args.entropy_rate is not None:
        spec = sources.binary_markov(args.entropy_rate, args.seed)
    else:
        if not args.table:
            raise UsageError("markov sources need --table or --entropy-rate")
        rows = [_floats(r) for r in args.table.split(";")]
        spec = sources.markov(rows, args.order, args.seed)
    if spec.alphabet_size > 256:
        raise UsageError("generated symbols must fit in one byte")
    data = sources.generate(spec, args.length).astype(np.uint8).tobytes()
    atomic_write(args.out, data)
    write_manifest(
        args.out,
        {
            "command": "gen",
            "tool_version": __version__,
            "kind": spec.kind,
            "alphabet_size": spec.alphabet_size,
            "order": spec.order,
            "seed": spec.seed,
            "length": args.length,
            "entropy_rate_bits": repr(spec.entropy_rate),
            "prng": "numpy PCG64",
            "output_sha256": hashlib.sha256(data).hexdigest(),
        },
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="switchcode", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    corpus = argparse.ArgumentParser(add_help=False)
    corpus.add_argument("--input", required=True, help="text to code, read as raw bytes")
    corpus.add_argument("--train", help="training corpus for fixed/preadapted models")
    corpus.add_argument("--letters", action="store_true", help="lowercase, map to a-z plus one space (D=27)")
    corpus.add_argument("--out", help="result file (default: stdout, no manifest)")

    model = argparse.ArgumentParser(add_help=False, parents=[corpus])
    model.add_argument("--model", type=_models, default=["plain"], help="comma list of plain,fixed,preadapted,lz")
    model.add_argument("--alpha", type=float, default=1.001)
    model.add_argument("--depth", type=_depth, default=7, help="depth cap s, or 'auto' for the exact depth")
    model.add_argument("--max-n", type=int, dest="max_n", help="largest block length (default: whole input)")
    model.add_argument("--smoothing", choices=("lower", "laplace", "kt"), default="lower")
    model.add_argument("--cache", help="directory for cached training count tables")

    sub.add_parser("rate", parents=[model], help="code lengths and rates at n=2,4,8,...").set_defaults(func=cmd_rate)
    sub.add_parser("mi", parents=[model], help="pointwise mutual information of block halves").set_defaults(func=cmd_mi)
    g = sub.add_parser("gamma", parents=[model], help="power-law fit of the MI series")
    g.add_argument("--fit-range", dest="fit_range", help="n interval LO:HI (default 8:)")
    g.add_argument("--fit-method", dest="fit_method", choices=FIT_METHODS, default="linear")
    g.add_argument("--plot-data", dest="plot_data", help="write log-log points and fitted line")
    g.set_defaults(func=cmd_gamma)
    sub.add_parser("depth", parents=[corpus], help="longest repeated substring").set_defaults(func=cmd_depth)
    sub.add_parser("lz", parents=[corpus], help="LZ78 parse summary").set_defaults(func=cmd_lz)

    gen = sub.add_parser("gen", help="write a synthetic source sample as raw bytes")
    gen.add_argument("--kind", choices=("iid", "markov"), default="iid")
    gen.add_argument("--alphabet", type=int, default=2)
    gen.add_argument("--length", type=int, required=True)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--probs", help="iid symbol probabilities, comma separated")
    gen.add_argument("--order", type=int, default=1)
    gen.add_argument("--table", help="markov rows 'p00,p01;p10,p11' (rows indexed by context)")
    gen.add_argument("--entropy-rate", type=float, dest="entropy_rate", help="binary symmetric chain with this rate")
    gen.add_argument("--out", required=True)
    gen.set_defaults(func=cmd_gen)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    func: Callable = args.func
    try:
        return func(args)
    except (UsageError, ValueError) as exc:
        print(f"switchcode {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
