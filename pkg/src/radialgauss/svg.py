"""Minimal self-contained SVG charts (scatter, histogram, line chart).

Output is deterministic text: coordinates are rounded to 0.01 px.
"""

from __future__ import annotations

import math
import os
from html import escape
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

__all__ = ["scatter_svg", "histogram_svg", "line_chart_svg", "write_svg"]

W, H = 480, 360
ML, MR, MT, MB = 60, 20, 30, 45
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _f(x: float) -> str:
    return f"{x:.2f}"


def _nice_ticks(lo: float, hi: float, count: int = 5):
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
        return [lo]
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=raw)
    start = math.ceil(lo / step) * step
    ticks = []
    t = start
    while t <= hi + 1e-9 * step:
        ticks.append(round(t, 12))
        t += step
    return ticks


class _Frame:
    def __init__(self, xlim, ylim, title, xlabel, ylabel, log_x=False):
        self.log_x = log_x
        x0, x1 = xlim
        if log_x:
            x0, x1 = math.log10(x0), math.log10(x1)
        if x1 <= x0:
            x0, x1 = x0 - 0.5, x1 + 0.5
        y0, y1 = ylim
        if y1 <= y0:
            y0, y1 = y0 - 0.5, y1 + 0.5
        self.x0, self.x1, self.y0, self.y1 = x0, x1, y0, y1
        self.parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
            f'viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">',
            f'<rect width="{W}" height="{H}" fill="white"/>',
            f'<text x="{W / 2}" y="18" text-anchor="middle" font-size="13">{escape(title)}</text>',
            f'<text x="{W / 2}" y="{H - 8}" text-anchor="middle">{escape(xlabel)}</text>',
            f'<text x="14" y="{H / 2}" text-anchor="middle" '
            f'transform="rotate(-90 14 {H / 2})">{escape(ylabel)}</text>',
            f'<rect x="{ML}" y="{MT}" width="{W - ML - MR}" height="{H - MT - MB}" '
            f'fill="none" stroke="#444"/>',
        ]
        self._axes()

    def px(self, x):
        if self.log_x:
            x = math.log10(x)
        return ML + (x - self.x0) / (self.x1 - self.x0) * (W - ML - MR)

    def py(self, y):
        return H - MB - (y - self.y0) / (self.y1 - self.y0) * (H - MT - MB)

    def _axes(self):
        if self.log_x:
            xt = [10.0**k for k in range(math.ceil(self.x0), math.floor(self.x1) + 1)]
            if not xt:
                xt = [10**self.x0, 10**self.x1]
        else:
            xt = _nice_ticks(self.x0, self.x1)
        for t in xt:
            x = self.px(t)
            self.parts.append(f'<line x1="{_f(x)}" y1="{H - MB}" x2="{_f(x)}" y2="{H - MB + 4}" stroke="#444"/>')
            self.parts.append(f'<text x="{_f(x)}" y="{H - MB + 16}" text-anchor="middle">{t:g}</text>')
        for t in _nice_ticks(self.y0, self.y1):
            y = self.py(t)
            self.parts.append(f'<line x1="{ML - 4}" y1="{_f(y)}" x2="{ML}" y2="{_f(y)}" stroke="#444"/>')
            self.parts.append(f'<text x="{ML - 6}" y="{_f(y + 4)}" text-anchor="end">{t:g}</text>')

    def polyline(self, xs, ys, color, width=1.5, dash=None):
        pts = " ".join(f"{_f(self.px(x))},{_f(self.py(y))}" for x, y in zip(xs, ys)
                       if math.isfinite(x) and math.isfinite(y))
        extra = f' stroke-dasharray="{dash}"' if dash else ""
        self.parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                          f'stroke-width="{width}"{extra}/>')

    def legend(self, entries: Sequence[Tuple[str, str]]):
        for k, (label, color) in enumerate(entries):
            y = MT + 14 + 14 * k
            self.parts.append(f'<line x1="{W - MR - 110}" y1="{y - 4}" x2="{W - MR - 94}" '
                              f'y2="{y - 4}" stroke="{color}" stroke-width="2"/>')
            self.parts.append(f'<text x="{W - MR - 90}" y="{y}">{escape(label)}</text>')

    def text(self) -> str:
        return "\n".join(self.parts + ["</svg>"]) + "\n"


def _limits(values, pad=0.05):
    v = np.asarray(values, dtype=float)
    v = v[np.isfinite(v)]
    if v.size == 0:
        return 0.0, 1.0
    lo, hi = float(v.min()), float(v.max())
    span = hi - lo or 1.0
    return lo - pad * span, hi + pad * span


def scatter_svg(Z, title="samples", max_points: int = 5000, extra: Optional[np.ndarray] = None) -> str:
    """2-D scatter; ``extra`` (optional) is drawn underneath in grey.

    At most ``max_points`` rows are drawn (evenly strided, so deterministic).
    """
    Z = np.asarray(Z, dtype=float)[:, :2]
    layers = [Z] if extra is None else [np.asarray(extra, dtype=float)[:, :2], Z]
    both = np.vstack(layers)
    lim = max(abs(v) for v in _limits(both.ravel()))
    fr = _Frame((-lim, lim), (-lim, lim), title, "x0", "x1")
    for k, L in enumerate(layers):
        color = "#bbbbbb" if (extra is not None and k == 0) else PALETTE[0]
        stride = max(1, int(math.ceil(L.shape[0] / max_points)))
        for x, y in L[::stride]:
            fr.parts.append(f'<circle cx="{_f(fr.px(x))}" cy="{_f(fr.py(y))}" r="1.2" '
                            f'fill="{color}" fill-opacity="0.5"/>')
    return fr.text()


def histogram_svg(edges, heights, title="histogram", xlabel="value",
                  overlay: Optional[Tuple[np.ndarray, np.ndarray]] = None,
                  overlay_label: str = "reference") -> str:
    """Bars from ``(edges, heights)`` plus an optional density polyline."""
    edges = np.asarray(edges, dtype=float)
    heights = np.asarray(heights, dtype=float)
    ymax = float(heights.max()) if heights.size else 1.0
    if overlay is not None:
        ymax = max(ymax, float(np.nanmax(overlay[1])))
    fr = _Frame((edges[0], edges[-1]), (0.0, 1.08 * ymax or 1.0), title, xlabel, "density")
    for a, b, h in zip(edges[:-1], edges[1:], heights):
        x, y = fr.px(a), fr.py(h)
        fr.parts.append(f'<rect x="{_f(x)}" y="{_f(y)}" width="{_f(fr.px(b) - x)}" '
                        f'height="{_f(fr.py(0) - y)}" fill="{PALETTE[0]}" fill-opacity="0.55" '
                        f'stroke="white" stroke-width="0.5"/>')
    entries = [("samples", PALETTE[0])]
    if overlay is not None:
        fr.polyline(overlay[0], overlay[1], PALETTE[1], 2.0)
        entries.append((overlay_label, PALETTE[1]))
    fr.legend(entries)
    return fr.text()


def line_chart_svg(series: Dict[str, Tuple[Sequence[float], Sequence[float]]], title="",
                   xlabel="x", ylabel="y", log_x=False, markers=True) -> str:
    """One polyline (with point markers) per named series."""
    xs = np.concatenate([np.asarray(x, dtype=float) for x, _ in series.values()]) if series else [0, 1]
    ys = np.concatenate([np.asarray(y, dtype=float) for _, y in series.values()]) if series else [0, 1]
    if log_x:
        xv = np.asarray(xs)[np.asarray(xs) > 0]
        xlim = (float(xv.min()) / 1.5, float(xv.max()) * 1.5) if xv.size else (0.1, 10.0)
    else:
        xlim = _limits(xs)
    fr = _Frame(xlim, _limits(ys), title, xlabel, ylabel, log_x=log_x)
    entries = []
    for k, (name, (x, y)) in enumerate(series.items()):
        color = PALETTE[k % len(PALETTE)]
        order = np.argsort(np.asarray(x, dtype=float), kind="stable")
        xo = np.asarray(x, dtype=float)[order]
        yo = np.asarray(y, dtype=float)[order]
        fr.polyline(xo, yo, color)
        if markers:
            for a, b in zip(xo, yo):
                if math.isfinite(a) and math.isfinite(b):
                    fr.parts.append(f'<circle cx="{_f(fr.px(a))}" cy="{_f(fr.py(b))}" r="3" fill="{color}"/>')
        entries.append((name, color))
    fr.legend(entries)
    return fr.text()


def write_svg(path, text: str) -> None:
    parent = os.path.dirname(os.fspath(path))
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
