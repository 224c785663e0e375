"""Command-line interface.

Exit codes: 0 success, 2 bad input, 3 domain violation (proper power or
trivial word), 4 I/O failure, 130 interrupted (checkpoints are kept).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from pathlib import Path

from sicgram import census as census_mod
from sicgram.diagnostics import diagnostics
from sicgram.intersection import PUNCTURED_TORUS, SurfaceOrder, self_intersection
from sicgram.plot import save_figure, write_svg
from sicgram.report import ReportFormatError, export, load_histogram
from sicgram.words import (
    WordParseError,
    count_classes,
    cyclic_reduce,
    enumerate_classes,
    format_word,
    parse_word,
    primitive_root,
)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_DOMAIN = 3
EXIT_IO = 4
EXIT_INTERRUPTED = 130

log = logging.getLogger("sicgram.cli")


class UsageError(Exception):
    pass


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _non_negative(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {value}")
    return value


def _surface_order(text: str) -> SurfaceOrder:
    try:
        return SurfaceOrder.from_text(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _default_workers() -> int:
    raw = os.environ.get("SICGRAM_WORKERS")
    if not raw:
        return 1
    try:
        return _positive(raw)
    except argparse.ArgumentTypeError as exc:
        raise UsageError(f"SICGRAM_WORKERS: {exc}") from None


def _warn_order(order: SurfaceOrder) -> None:
    if order != PUNCTURED_TORUS:
        log.warning(
            "surface order %s is not the validated punctured-torus order %s; "
            "results are experimental",
            order.to_text(),
            PUNCTURED_TORUS.to_text(),
        )


def cmd_word(args) -> int:
    letters = parse_word(args.word)
    _, core = cyclic_reduce(letters)
    print(f"canonical: {core}")
    print(f"length: {core.length}")
    if core.length == 0:
        print("primitive: false")
        print("note: trivial class, no curve to measure")
        return EXIT_DOMAIN
    if not core.primitive:
        root, power = primitive_root(core.letters)
        print("primitive: false")
        print(f"root: {format_word(root)}")
        print(f"power: {power}")
        print("note: proper power; self-intersection is only computed for primitive classes")
        return EXIT_DOMAIN
    _warn_order(args.surface_order)
    print("primitive: true")
    print(f"sic: {self_intersection(core, args.surface_order)}")
    return EXIT_OK


def cmd_count(args) -> int:
    n = args.length
    formula = count_classes(n, primitive_only=True)
    print(f"length: {n}")
    print(f"formula: {formula}")
    print(f"all_classes: {count_classes(n, primitive_only=False)}")
    if n <= args.enumerate_cap:
        enumerated = sum(1 for _ in enumerate_classes(n))
        print(f"enumerated: {enumerated}")
        print(f"verdict: {'match' if enumerated == formula else 'mismatch'}")
        return EXIT_OK if enumerated == formula else 1
    print(f"enumerated: skipped (length above cap {args.enumerate_cap})")
    return EXIT_OK


def cmd_census(args) -> int:
    order = args.surface_order
    _warn_order(order)
    started = time.perf_counter()

    def progress(name: str, hist) -> None:
        log.info("shard %s: %d classes", name or "(all)", hist.total)

    hist = census_mod.census(
        args.length,
        order,
        workers=args.workers,
        prefix_len=args.prefix_len,
        checkpoint_dir=args.checkpoint,
        checkpoint_every=args.checkpoint_every,
        progress=progress,
    )
    diag = diagnostics(hist)
    payload = export(hist, diag, args.format, order=order)
    elapsed = time.perf_counter() - started
    if args.out is None:
        sys.stdout.buffer.write(payload)
        sys.stdout.flush()
        summary = sys.stderr
    else:
        Path(args.out).write_bytes(payload)
        summary = sys.stdout
    if args.figure is not None:
        save_figure(hist, args.figure)
    for key, value in (
        ("length", args.length),
        ("total", diag.total),
        ("mean", diag.mean),
        ("variance", diag.variance),
        ("skewness", diag.skewness),
        ("fit_distance", diag.fit_distance),
        ("wall_seconds", round(elapsed, 3)),
    ):
        print(f"{key}: {value}", file=summary)
    return EXIT_OK


def cmd_stats(args) -> int:
    hist = load_histogram(args.input)
    if not hist.bins:
        raise ReportFormatError(f"{args.input}: histogram is empty")
    print(json.dumps(diagnostics(hist).to_json(), indent=2))
    return EXIT_OK


def cmd_plot(args) -> int:
    hist = load_histogram(args.input)
    if not hist.bins:
        raise ReportFormatError(f"{args.input}: histogram is empty")
    if args.length is not None:
        hist.length = args.length
    write_svg(hist, args.out)
    if args.figure is not None:
        save_figure(hist, args.figure)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sicgram",
        description="Self-intersection census of curves on the punctured torus.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="progress on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    order_help = (
        "EXPERT, unvalidated: cyclic order of the letters around the puncture, "
        f"written as the linear root order (default {PUNCTURED_TORUS.to_text()})"
    )

    p = sub.add_parser("word", help="canonical form and self-intersection of one word")
    p.add_argument("word", help="word over a, b, A, B (capitals are inverses)")
    p.add_argument("--surface-order", type=_surface_order, default=PUNCTURED_TORUS, help=order_help)
    p.set_defaults(func=cmd_word)

    p = sub.add_parser("count", help="number of primitive classes of a length")
    p.add_argument("--length", type=_positive, required=True)
    p.add_argument("--enumerate-cap", type=_non_negative, default=14,
                   help="also enumerate when length <= this (default 14)")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("census", help="histogram of self-intersection over all classes")
    p.add_argument("--length", type=_positive, required=True)
    p.add_argument("--workers", type=_positive, default=None,
                   help="worker processes (default $SICGRAM_WORKERS or 1)")
    p.add_argument("--prefix-len", type=_non_negative, default=census_mod.DEFAULT_PREFIX_LEN)
    p.add_argument("--checkpoint", type=Path, default=None, metavar="DIR")
    p.add_argument("--checkpoint-every", type=_positive, default=census_mod.CHECKPOINT_EVERY,
                   help=argparse.SUPPRESS)
    p.add_argument("--out", type=Path, default=None, help="output file (default stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--figure", type=Path, default=None, help="also render a figure (png, pdf, svg)")
    p.add_argument("--surface-order", type=_surface_order, default=PUNCTURED_TORUS, help=order_help)
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("stats", help="distribution diagnostics of a histogram file")
    p.add_argument("--in", dest="input", type=Path, required=True)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("plot", help="SVG bar chart of a histogram file")
    p.add_argument("--in", dest="input", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--length", type=_positive, default=None, help="length for the title (CSV input)")
    p.add_argument("--figure", type=Path, default=None, help="also render with matplotlib")
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(name)s: %(message)s"))
    log.handlers[:] = [handler]
    log.setLevel(logging.INFO if args.verbose else logging.WARNING)
    log.propagate = False
    try:
        if getattr(args, "workers", 0) is None:
            args.workers = _default_workers()
        return args.func(args)
    except WordParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ReportFormatError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except census_mod.CheckpointMismatch as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except KeyboardInterrupt:
        print("interrupted; checkpoints kept", file=sys.stderr)
        return EXIT_INTERRUPTED


if __name__ == "__main__":
    sys.exit(main())
