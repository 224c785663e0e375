"""Bar charts of census histograms.

:func:`histogram_svg` writes the SVG by hand with fixed geometry so the bytes
depend only on the histogram.  :func:`save_figure` renders the same chart
with matplotlib for raster or PDF output.
"""

from __future__ import annotations

import math
from pathlib import Path
from xml.sax.saxutils import escape

from sicgram.census import Histogram

WIDTH, HEIGHT = 720, 420
LEFT, RIGHT, TOP, BOTTOM = 80, 24, 48, 56
BAR_FILL = 0.8
X_LABEL = "self-intersection number k"
Y_LABEL = "number of classes"


def _title(h: Histogram) -> str:
    if h.length is None:
        return "Self-intersection histogram"
    return f"Self-intersection histogram, length {h.length}"


def nice_step(span: float, target: int = 5) -> int:
    """Smallest 1, 2 or 5 times a power of ten giving at most ``target`` intervals."""
    if span <= 0:
        return 1
    raw = span / target
    mag = 10 ** math.floor(math.log10(raw))
    for m in (1, 2, 5, 10):
        if m * mag >= raw:
            return max(1, int(m * mag))
    return max(1, int(10 * mag))


def _f(x: float) -> str:
    return f"{x:.2f}"


def histogram_svg(h: Histogram) -> str:
    if not h.bins:
        raise ValueError("cannot plot an empty histogram")
    top_k = max(h.bins)
    top_count = max(h.bins.values())
    plot_w = WIDTH - LEFT - RIGHT
    plot_h = HEIGHT - TOP - BOTTOM
    slot = plot_w / (top_k + 1)
    y_step = nice_step(top_count)
    y_max = math.ceil(top_count / y_step) * y_step
    x_base = LEFT
    y_base = TOP + plot_h

    def y_of(v: float) -> float:
        return y_base - plot_h * v / y_max

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<text class="title" x="{_f(WIDTH / 2)}" y="24" text-anchor="middle" '
        f'font-size="16">{escape(_title(h))}</text>',
        '<g class="bars" fill="#444444">',
    ]
    for k, count in h.items():
        x = x_base + slot * k + slot * (1 - BAR_FILL) / 2
        y = y_of(count)
        out.append(
            f'<rect class="bar" x="{_f(x)}" y="{_f(y)}" width="{_f(slot * BAR_FILL)}" '
            f'height="{_f(y_base - y)}" data-k="{k}" data-count="{count}"/>'
        )
    out.append("</g>")
    out.append('<g class="axes" stroke="#000000" stroke-width="1">')
    out.append(f'<line x1="{x_base}" y1="{_f(y_base)}" x2="{WIDTH - RIGHT}" y2="{_f(y_base)}"/>')
    out.append(f'<line x1="{x_base}" y1="{TOP}" x2="{x_base}" y2="{_f(y_base)}"/>')
    out.append("</g>")

    out.append('<g class="xticks" text-anchor="middle">')
    for k in range(0, top_k + 1, nice_step(top_k + 1, 10)):
        cx = x_base + slot * (k + 0.5)
        out.append(f'<text x="{_f(cx)}" y="{_f(y_base + 16)}">{k}</text>')
    out.append("</g>")
    out.append('<g class="yticks" text-anchor="end">')
    for v in range(0, y_max + 1, y_step):
        out.append(f'<text x="{x_base - 6}" y="{_f(y_of(v) + 4)}">{v}</text>')
    out.append("</g>")
    out.append(
        f'<text class="xlabel" x="{_f(x_base + plot_w / 2)}" y="{HEIGHT - 14}" '
        f'text-anchor="middle">{X_LABEL}</text>'
    )
    out.append(
        f'<text class="ylabel" x="18" y="{_f(TOP + plot_h / 2)}" text-anchor="middle" '
        f'transform="rotate(-90 18 {_f(TOP + plot_h / 2)})">{Y_LABEL}</text>'
    )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_svg(h: Histogram, path: str | Path) -> None:
    Path(path).write_text(histogram_svg(h), encoding="utf-8", newline="\n")


def save_figure(h: Histogram, path: str | Path, dpi: int = 150) -> None:
    """Render the histogram with matplotlib; the format follows the file suffix."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    if not h.bins:
        raise ValueError("cannot plot an empty histogram")
    ks, counts = zip(*h.items())
    fig, ax = plt.subplots(figsize=(8, 4.5))
    try:
        ax.bar(ks, counts, width=BAR_FILL, color="#444444")
        ax.set_xlim(-0.5, max(ks) + 0.5)
        ax.set_xlabel(X_LABEL)
        ax.set_ylabel(Y_LABEL)
        ax.set_title(_title(h))
        ax.spines[["top", "right"]].set_visible(False)
        fig.tight_layout()
        fig.savefig(path, dpi=dpi)
    finally:
        plt.close(fig)
