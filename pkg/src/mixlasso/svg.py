"""Standalone SVG line plots for path and BIC CSV files."""

from __future__ import annotations

import csv
import io
import math
from xml.sax.saxutils import escape

from .errors import MalformedInput

PATH_HEADER = ["lambda", "feature", "coefficient"]
BIC_HEADER = ["K", "loglik", "n_params", "bic", "display"]

PALETTE = (
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)


def _float(text, row):
    try:
        v = float(text)
    except ValueError:
        raise MalformedInput(row, f"not a number: {text!r}") from None
    if not math.isfinite(v):
        raise MalformedInput(row, f"not finite: {text!r}")
    return v


def _rows(text):
    rows = [r for r in csv.reader(io.StringIO(text)) if r]
    if not rows:
        raise MalformedInput(1, "empty file")
    if len(rows) == 1:
        raise MalformedInput(2, "no data rows")
    return [h.strip() for h in rows[0]], rows[1:]


def read_series(text):
    """Parse a path or BIC CSV into ``(kind, {name: [(x, y), ...]}, xlabel, ylabel)``."""
    header, body = _rows(text)
    series = {}
    if header == PATH_HEADER:
        for i, row in enumerate(body, start=2):
            if len(row) != 3:
                raise MalformedInput(i, "expected 3 cells")
            series.setdefault(row[1], []).append((_float(row[0], i), _float(row[2], i)))
        return "path", series, "lambda", "coefficient"
    if header == BIC_HEADER:
        pts = []
        for i, row in enumerate(body, start=2):
            if len(row) != 5:
                raise MalformedInput(i, "expected 5 cells")
            pts.append((_float(row[0], i), _float(row[4], i)))
        return "bic", {"log(BIC - min BIC + 1)": pts}, "K", "log(BIC - min BIC + 1)"
    raise MalformedInput(1, f"unrecognized header {header}")


def _ticks(lo, hi, n=5):
    if hi == lo:
        return [lo]
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


def render(series, xlabel, ylabel, width=720, height=480, reverse_x=False, title=""):
    if width <= 0 or height <= 0:
        raise ValueError("width and height must be positive")
    left, right, top, bottom = 70, 150, 40 if title else 20, 50
    pw, ph = max(width - left - right, 1), max(height - top - bottom, 1)
    xs = [x for pts in series.values() for x, _ in pts]
    ys = [y for pts in series.values() for _, y in pts]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    if y0 == y1:
        y0, y1 = y0 - 1.0, y1 + 1.0

    def sx(x):
        if x1 == x0:
            return left + pw / 2
        f = (x - x0) / (x1 - x0)
        return left + pw * ((1.0 - f) if reverse_x else f)

    def sy(y):
        return top + ph * (1.0 - (y - y0) / (y1 - y0))

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{width / 2:.1f}" y="20" text-anchor="middle" font-size="13">{escape(title)}</text>')
    out.append(f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="#444"/>')
    for t in _ticks(x0, x1):
        out.append(f'<text x="{sx(t):.2f}" y="{top + ph + 16}" text-anchor="middle">{t:.4g}</text>')
    for t in _ticks(y0, y1):
        out.append(f'<text x="{left - 6}" y="{sy(t) + 4:.2f}" text-anchor="end">{t:.4g}</text>')
    if y0 < 0 < y1:
        out.append(f'<line x1="{left}" y1="{sy(0):.2f}" x2="{left + pw}" y2="{sy(0):.2f}" stroke="#bbb" stroke-dasharray="4,3"/>')
    out.append(f'<text x="{left + pw / 2:.1f}" y="{height - 12}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(
        f'<text x="16" y="{top + ph / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 16 {top + ph / 2:.1f})">{escape(ylabel)}</text>'
    )

    for i, (name, pts) in enumerate(series.items()):
        color = PALETTE[i % len(PALETTE)]
        coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in pts)
        out.append(
            f'<polyline data-series="{escape(name, {chr(34): "&quot;"})}" points="{coords}" '
            f'fill="none" stroke="{color}" stroke-width="1.5"/>'
        )
        ly = top + 12 + 16 * i
        lx = left + pw + 12
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 18}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 24}" y="{ly + 4}">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def plot_csv(text, width=720, height=480, title=""):
    """SVG for a path CSV (lambda decreasing left to right) or a BIC CSV."""
    kind, series, xlabel, ylabel = read_series(text)
    return render(series, xlabel, ylabel, width, height, reverse_x=(kind == "path"), title=title)
