"""Tiny static SVG renderer: line plots and heatmaps, no plotting dependency.

Data files are the primary interface; these renderings exist so a sweep can
be eyeballed without further tooling.
"""

from __future__ import annotations

import math
from typing import Mapping, Sequence

_W, _H = 640, 420
_ML, _MR, _MT, _MB = 60, 20, 30, 45

_COLORS = ["#1f6fb4", "#d1495b", "#2e8b57", "#8d5a97", "#c98b1e", "#4c4c4c"]


def _finite(vals: Sequence[float]) -> list[float]:
    return [v for v in vals if v is not None and math.isfinite(v)]


def _scale(lo: float, hi: float) -> tuple[float, float]:
    if hi <= lo:
        hi = lo + 1.0
    pad = 0.05 * (hi - lo)
    return lo - pad, hi + pad


def _axes(title: str, xlabel: str, ylabel: str, xlo, xhi, ylo, yhi) -> list[str]:
    parts = [
        f'<rect x="{_ML}" y="{_MT}" width="{_W - _ML - _MR}" height="{_H - _MT - _MB}"'
        ' fill="none" stroke="#333" stroke-width="1"/>',
        f'<text x="{_W / 2:.0f}" y="18" text-anchor="middle" font-size="14">{title}</text>',
        f'<text x="{_W / 2:.0f}" y="{_H - 8}" text-anchor="middle" font-size="12">{xlabel}</text>',
        f'<text x="14" y="{_H / 2:.0f}" text-anchor="middle" font-size="12"'
        f' transform="rotate(-90 14 {_H / 2:.0f})">{ylabel}</text>',
    ]
    for frac in (0.0, 0.5, 1.0):
        xv = xlo + frac * (xhi - xlo)
        yv = ylo + frac * (yhi - ylo)
        px = _ML + frac * (_W - _ML - _MR)
        py = _H - _MB - frac * (_H - _MT - _MB)
        parts.append(
            f'<text x="{px:.1f}" y="{_H - _MB + 16}" text-anchor="middle" font-size="10">{xv:.3g}</text>'
        )
        parts.append(
            f'<text x="{_ML - 6}" y="{py + 3:.1f}" text-anchor="end" font-size="10">{yv:.3g}</text>'
        )
    return parts


def _document(body: list[str]) -> str:
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}"'
        f' viewBox="0 0 {_W} {_H}">\n<rect width="100%" height="100%" fill="white"/>\n'
        + "\n".join(body)
        + "\n</svg>\n"
    )


def line_plot(
    series: Mapping[str, tuple[Sequence[float], Sequence[float]]],
    title: str,
    xlabel: str,
    ylabel: str,
) -> str:
    xs_all = [x for xs, _ in series.values() for x in _finite(xs)]
    ys_all = [y for _, ys in series.values() for y in _finite(ys)]
    if not xs_all or not ys_all:
        return _document(['<text x="20" y="40">no data</text>'])
    xlo, xhi = _scale(min(xs_all), max(xs_all))
    ylo, yhi = _scale(min(ys_all), max(ys_all))

    def px(x: float) -> float:
        return _ML + (x - xlo) / (xhi - xlo) * (_W - _ML - _MR)

    def py(y: float) -> float:
        return _H - _MB - (y - ylo) / (yhi - ylo) * (_H - _MT - _MB)

    body = _axes(title, xlabel, ylabel, xlo, xhi, ylo, yhi)
    for i, (label, (xs, ys)) in enumerate(series.items()):
        color = _COLORS[i % len(_COLORS)]
        pts = " ".join(
            f"{px(x):.1f},{py(y):.1f}"
            for x, y in zip(xs, ys)
            if y is not None and math.isfinite(y)
        )
        body.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        body.append(
            f'<text x="{_W - _MR - 6}" y="{_MT + 16 + 14 * i}" text-anchor="end"'
            f' font-size="11" fill="{color}">{label}</text>'
        )
    return _document(body)


def heatmap(
    xs: Sequence[float],
    ys: Sequence[float],
    values: Mapping[tuple[float, float], float | None],
    title: str,
    xlabel: str,
    ylabel: str,
) -> str:
    """Cells colored blue-to-red over the value range; missing cells gray."""
    finite = _finite(list(values.values()))
    lo = min(finite) if finite else 0.0
    hi = max(finite) if finite else 1.0
    if hi <= lo:
        hi = lo + 1.0
    cw = (_W - _ML - _MR) / max(1, len(xs))
    ch = (_H - _MT - _MB) / max(1, len(ys))

    def color(v: float) -> str:
        t = (v - lo) / (hi - lo)
        r = int(40 + 190 * t)
        b = int(210 - 170 * t)
        return f"rgb({r},60,{b})"

    body = _axes(title, xlabel, ylabel, min(xs), max(xs), min(ys), max(ys))
    for i, x in enumerate(xs):
        for j, y in enumerate(ys):
            v = values.get((x, y))
            fill = "#cccccc" if v is None or not math.isfinite(v) else color(v)
            px = _ML + i * cw
            py = _H - _MB - (j + 1) * ch
            body.append(
                f'<rect x="{px:.1f}" y="{py:.1f}" width="{cw + 0.5:.1f}"'
                f' height="{ch + 0.5:.1f}" fill="{fill}"/>'
            )
    body.append(
        f'<text x="{_W - _MR - 6}" y="{_MT + 14}" text-anchor="end" font-size="10">'
        f"range [{lo:.3g}, {hi:.3g}]</text>"
    )
    return _document(body)
