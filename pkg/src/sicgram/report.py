"""Histogram CSV and report JSON, both byte-stable for a fixed input."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

from sicgram.census import ENGINE_VERSION, Histogram, dump_json
from sicgram.diagnostics import DistributionDiagnostics
from sicgram.intersection import PUNCTURED_TORUS, SurfaceOrder

CSV_HEADER = "sic,count"


class ReportFormatError(ValueError):
    pass


def to_csv(h: Histogram) -> str:
    lines = [CSV_HEADER] + [f"{k},{count}" for k, count in h.items()]
    return "\n".join(lines) + "\n"


def to_json(
    h: Histogram,
    d: DistributionDiagnostics,
    order: SurfaceOrder = PUNCTURED_TORUS,
    engine_version: str = ENGINE_VERSION,
) -> str:
    doc = {
        "length": h.length,
        "order": order.to_text(),
        "engine_version": engine_version,
        "bins": [[k, count] for k, count in h.items()],
        "diagnostics": d.to_json(),
    }
    return dump_json(doc)


def export(h: Histogram, d: DistributionDiagnostics, fmt: str = "csv", **kwargs) -> bytes:
    if fmt == "csv":
        return to_csv(h).encode("ascii")
    if fmt == "json":
        return to_json(h, d, **kwargs).encode("ascii")
    raise ValueError(f"unknown format {fmt!r}")


def from_csv(text: str, length: int | None = None) -> Histogram:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or ",".join(rows[0]).strip() != CSV_HEADER:
        raise ReportFormatError(f"expected header {CSV_HEADER!r}")
    h = Histogram(length)
    seen = set()
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        try:
            k, count = (int(x) for x in row)
        except ValueError:
            raise ReportFormatError(f"line {lineno}: expected two integers, got {row}") from None
        if k < 0 or count < 0 or k in seen:
            raise ReportFormatError(f"line {lineno}: invalid or repeated bin {row}")
        seen.add(k)
        h.add(k, count)
    return h


def from_json(text: str) -> tuple[Histogram, dict]:
    """Parse a report; returns the histogram and the full document."""
    try:
        doc = json.loads(text)
        h = Histogram.from_json(doc)
    except (ValueError, KeyError, TypeError) as exc:
        raise ReportFormatError(f"not a histogram report: {exc}") from None
    return h, doc


def load_histogram(path: str | Path) -> Histogram:
    """Read a histogram from a CSV or JSON report, chosen by content."""
    try:
        text = Path(path).read_text(encoding="ascii")
    except UnicodeDecodeError:
        raise ReportFormatError(f"{path}: not an ASCII file") from None
    if text.lstrip().startswith("{"):
        return from_json(text)[0]
    return from_csv(text)
