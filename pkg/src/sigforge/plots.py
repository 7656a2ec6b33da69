"""Static SVG plots: density histogram and empirical CDF against a reference law.

Every curve is a single ``<polyline>``; histogram bars are ``<rect>`` elements.
"""
from __future__ import annotations

from typing import Optional
from xml.sax.saxutils import escape

import numpy as np

from sigforge import stats

WIDTH, HEIGHT = 640, 400
MARGIN = 50
CURVE_POINTS = 400
MAX_ECDF_POINTS = 1000


class _Frame:
    def __init__(self, x0: float, x1: float, y0: float, y1: float):
        self.x0, self.x1 = x0, x1
        self.y0, self.y1 = y0, y1 if y1 > y0 else y0 + 1.0

    def px(self, x: float) -> float:
        return MARGIN + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - 2 * MARGIN)

    def py(self, y: float) -> float:
        return HEIGHT - MARGIN - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - 2 * MARGIN)

    def points(self, xs, ys) -> str:
        return " ".join(f"{self.px(x):.2f},{self.py(y):.2f}" for x, y in zip(xs, ys))


def _header(title: str) -> list[str]:
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.0f}" y="24" text-anchor="middle" font-family="sans-serif" '
        f'font-size="14">{escape(title)}</text>',
    ]


def _axes(fr: _Frame, xlabel: str, ylabel: str) -> list[str]:
    left, bottom = MARGIN, HEIGHT - MARGIN
    out = [
        f'<line x1="{left}" y1="{bottom}" x2="{WIDTH - MARGIN}" y2="{bottom}" stroke="black"/>',
        f'<line x1="{left}" y1="{bottom}" x2="{left}" y2="{MARGIN}" stroke="black"/>',
    ]
    for x in np.linspace(fr.x0, fr.x1, 5):
        out.append(
            f'<text x="{fr.px(x):.2f}" y="{bottom + 16}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="10">{x:.2g}</text>'
        )
    for y in np.linspace(fr.y0, fr.y1, 5):
        out.append(
            f'<text x="{left - 6}" y="{fr.py(y) + 3:.2f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="10">{y:.2g}</text>'
        )
    out.append(
        f'<text x="{WIDTH / 2:.0f}" y="{HEIGHT - 12}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12">{escape(xlabel)}</text>'
    )
    out.append(
        f'<text x="14" y="{HEIGHT / 2:.0f}" text-anchor="middle" font-family="sans-serif" '
        f'font-size="12" transform="rotate(-90 14 {HEIGHT / 2:.0f})">{escape(ylabel)}</text>'
    )
    return out


def histogram_svg(hist: stats.Histogram, law: Optional[stats.ReferenceLaw], title: str = "") -> str:
    edges = hist.edges
    x0, x1 = float(edges[0]), float(edges[-1])
    xs = np.linspace(x0, x1, CURVE_POINTS)
    ref = law.pdf(xs) if law is not None else None
    ymax = float(hist.densities.max()) if hist.densities.size else 0.0
    if ref is not None:
        ymax = max(ymax, float(ref.max()))
    fr = _Frame(x0, x1, 0.0, ymax * 1.05)
    out = _header(title) + _axes(fr, "normalized time", "density")
    for lo, hi, d in hist.rows():
        top = fr.py(d)
        out.append(
            f'<rect x="{fr.px(lo):.2f}" y="{top:.2f}" width="{fr.px(hi) - fr.px(lo):.2f}" '
            f'height="{fr.py(0) - top:.2f}" fill="#9ecae1" stroke="#3182bd" stroke-width="0.5"/>'
        )
    if ref is not None:
        out.append(
            f'<polyline fill="none" stroke="#d62728" stroke-width="2" points="{fr.points(xs, ref)}"/>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def cdf_svg(sample: stats.SampleSet, law: Optional[stats.ReferenceLaw], title: str = "") -> str:
    x, F = stats.ecdf(sample)
    if x.size > MAX_ECDF_POINTS:
        idx = np.unique(np.linspace(0, x.size - 1, MAX_ECDF_POINTS).astype(np.int64))
        x, F = x[idx], F[idx]
    x0, x1 = float(x[0]), float(x[-1])
    if not x1 > x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    fr = _Frame(x0, x1, 0.0, 1.0)
    out = _header(title) + _axes(fr, "normalized time", "cumulative probability")
    # Empirical CDF drawn as a staircase.
    sx = np.repeat(x, 2)[1:]
    sy = np.repeat(F, 2)[:-1]
    out.append(
        f'<polyline fill="none" stroke="#1f77b4" stroke-width="1.5" points="{fr.points(sx, sy)}"/>'
    )
    if law is not None:
        xs = np.linspace(x0, x1, CURVE_POINTS)
        out.append(
            f'<polyline fill="none" stroke="#d62728" stroke-width="2" '
            f'points="{fr.points(xs, law.cdf(xs))}"/>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"
