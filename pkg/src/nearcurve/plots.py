"""Self-contained SVG log-log scatter plots; no plotting dependency."""

from __future__ import annotations

import math
from typing import Optional, Sequence

_W, _H = 640, 480
_MARGIN = 60


def _ticks(lo: float, hi: float) -> list[int]:
    return list(range(math.floor(lo), math.ceil(hi) + 1))


def svg_loglog(path, xs: Sequence[float], ys: Sequence[float],
               slope: Optional[float] = None, intercept: Optional[float] = None,
               title: str = "", xlabel: str = "", ylabel: str = "") -> None:
    """Scatter of (log10 x, log10 y) with an optional fitted line (natural-log fit)."""
    if len(xs) != len(ys) or not xs:
        raise ValueError("need matching nonempty coordinate lists")
    lx = [math.log10(v) for v in xs]
    ly = [math.log10(v) for v in ys]
    x0, x1 = min(lx), max(lx)
    y0, y1 = min(ly), max(ly)
    x0, x1 = x0 - 0.05 * (x1 - x0 + 1e-9) - 0.05, x1 + 0.05 * (x1 - x0 + 1e-9) + 0.05
    y0, y1 = y0 - 0.05 * (y1 - y0 + 1e-9) - 0.05, y1 + 0.05 * (y1 - y0 + 1e-9) + 0.05

    def px(v: float) -> float:
        return _MARGIN + (v - x0) / (x1 - x0) * (_W - 2 * _MARGIN)

    def py(v: float) -> float:
        return _H - _MARGIN - (v - y0) / (y1 - y0) * (_H - 2 * _MARGIN)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W / 2:.1f}" y="24" text-anchor="middle" font-size="15">{title}</text>',
    ]
    axis = (
        f'<line x1="{_MARGIN}" y1="{_H - _MARGIN}" x2="{_W - _MARGIN}" y2="{_H - _MARGIN}" '
        'stroke="black"/>'
        f'<line x1="{_MARGIN}" y1="{_MARGIN}" x2="{_MARGIN}" y2="{_H - _MARGIN}" stroke="black"/>'
    )
    parts.append(axis)
    for t in _ticks(x0, x1):
        if x0 <= t <= x1:
            parts.append(
                f'<line x1="{px(t):.1f}" y1="{_H - _MARGIN}" x2="{px(t):.1f}" '
                f'y2="{_H - _MARGIN + 5}" stroke="black"/>'
                f'<text x="{px(t):.1f}" y="{_H - _MARGIN + 18}" text-anchor="middle" '
                f'font-size="11">1e{t}</text>'
            )
    for t in _ticks(y0, y1):
        if y0 <= t <= y1:
            parts.append(
                f'<line x1="{_MARGIN - 5}" y1="{py(t):.1f}" x2="{_MARGIN}" y2="{py(t):.1f}" '
                'stroke="black"/>'
                f'<text x="{_MARGIN - 8}" y="{py(t) + 4:.1f}" text-anchor="end" '
                f'font-size="11">1e{t}</text>'
            )
    parts.append(
        f'<text x="{_W / 2:.1f}" y="{_H - 12}" text-anchor="middle" font-size="13">{xlabel}</text>'
    )
    parts.append(
        f'<text x="16" y="{_H / 2:.1f}" text-anchor="middle" font-size="13" '
        f'transform="rotate(-90 16 {_H / 2:.1f})">{ylabel}</text>'
    )
    if slope is not None and intercept is not None:
        # fit was done in natural logs: ln y = slope ln x + intercept
        ln10 = math.log(10.0)
        yl0 = (slope * (x0 * ln10) + intercept) / ln10
        yl1 = (slope * (x1 * ln10) + intercept) / ln10
        parts.append(
            f'<line x1="{px(x0):.1f}" y1="{py(yl0):.1f}" x2="{px(x1):.1f}" y2="{py(yl1):.1f}" '
            'stroke="firebrick" stroke-width="1.5"/>'
        )
        parts.append(
            f'<text x="{_W - _MARGIN:.1f}" y="{_MARGIN - 8}" text-anchor="end" font-size="12" '
            f'fill="firebrick">slope {slope:.3f}</text>'
        )
    for vx, vy in zip(lx, ly):
        parts.append(f'<circle cx="{px(vx):.1f}" cy="{py(vy):.1f}" r="3" fill="steelblue"/>')
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(parts) + "\n")
