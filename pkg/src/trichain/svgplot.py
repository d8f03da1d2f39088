"""Minimal self-contained SVG line plots (no plotting dependency).

Polyline plots with axes, tick labels and optional point markers with error
bars; enough for field curves.  Output is deterministic for identical input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

__all__ = ["Series", "line_plot_svg"]

_WIDTH, _HEIGHT = 640, 440
_ML, _MR, _MT, _MB = 72, 20, 36, 52  # margins
_COLORS = ("#1a1a1a", "#c02020", "#2050c0", "#208040")


@dataclass(frozen=True)
class Series:
    x: list = field(default_factory=list)
    y: list = field(default_factory=list)
    label: str = ""
    marker: bool = False  # points (with y_err bars when given) instead of a line
    y_err: list | None = None


def _nice_ticks(lo: float, hi: float, target: int = 6) -> list[float]:
    if not (math.isfinite(lo) and math.isfinite(hi)):
        return [0.0]
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / target
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        if raw <= mult * mag:
            step = mult * mag
            break
    first = math.ceil(lo / step) * step
    ticks = []
    v = first
    while v <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(v) < 1e-12 * step else v)
        v += step
    return ticks


def _fmt(v: float) -> str:
    return f"{v:.6g}"


def line_plot_svg(series: list[Series], title: str, xlabel: str, ylabel: str) -> str:
    xs = [float(v) for s in series for v in s.x]
    ys = [float(v) for s in series for v in s.y]
    for s in series:
        if s.y_err is not None:
            ys.extend(float(y) + float(e) for y, e in zip(s.y, s.y_err))
            ys.extend(float(y) - float(e) for y, e in zip(s.y, s.y_err))
    if not xs:
        xs, ys = [0.0, 1.0], [0.0, 1.0]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    if x_hi <= x_lo:
        x_hi = x_lo + 1.0
    if y_hi <= y_lo:
        y_hi = y_lo + 1.0
    pad = 0.04 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad, y_hi + pad

    pw = _WIDTH - _ML - _MR
    ph = _HEIGHT - _MT - _MB

    def px(x: float) -> float:
        return _ML + (x - x_lo) / (x_hi - x_lo) * pw

    def py(y: float) -> float:
        return _MT + (y_hi - y) / (y_hi - y_lo) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<text x="{_WIDTH / 2:.1f}" y="22" text-anchor="middle" '
        f'font-family="sans-serif" font-size="15">{title}</text>',
    ]
    axis = 'stroke="#404040" stroke-width="1"'
    grid = 'stroke="#d8d8d8" stroke-width="0.5"'
    for tx in _nice_ticks(x_lo, x_hi):
        x = px(tx)
        out.append(f'<line x1="{x:.1f}" y1="{_MT}" x2="{x:.1f}" y2="{_MT + ph}" {grid}/>')
        out.append(
            f'<text x="{x:.1f}" y="{_MT + ph + 18}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{_fmt(tx)}</text>'
        )
    for ty in _nice_ticks(y_lo, y_hi):
        y = py(ty)
        out.append(f'<line x1="{_ML}" y1="{y:.1f}" x2="{_ML + pw}" y2="{y:.1f}" {grid}/>')
        out.append(
            f'<text x="{_ML - 6}" y="{y + 4:.1f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{_fmt(ty)}</text>'
        )
    out.append(f'<rect x="{_ML}" y="{_MT}" width="{pw}" height="{ph}" fill="none" {axis}/>')
    out.append(
        f'<text x="{_ML + pw / 2:.1f}" y="{_HEIGHT - 14}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="13">{xlabel}</text>'
    )
    out.append(
        f'<text x="18" y="{_MT + ph / 2:.1f}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="13" '
        f'transform="rotate(-90 18 {_MT + ph / 2:.1f})">{ylabel}</text>'
    )

    for k, s in enumerate(series):
        color = _COLORS[k % len(_COLORS)]
        if s.marker:
            for j, (x, y) in enumerate(zip(s.x, s.y)):
                cx, cy = px(float(x)), py(float(y))
                if s.y_err is not None:
                    e = float(s.y_err[j])
                    out.append(
                        f'<line x1="{cx:.1f}" y1="{py(float(y) - e):.1f}" '
                        f'x2="{cx:.1f}" y2="{py(float(y) + e):.1f}" '
                        f'stroke="{color}" stroke-width="1"/>'
                    )
                out.append(f'<circle cx="{cx:.1f}" cy="{cy:.1f}" r="2.4" fill="{color}"/>')
        else:
            pts = " ".join(f"{px(float(x)):.2f},{py(float(y)):.2f}" for x, y in zip(s.x, s.y))
            out.append(
                f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>'
            )
        if s.label:
            ly = _MT + 16 + 16 * k
            out.append(
                f'<line x1="{_ML + pw - 120}" y1="{ly - 4}" x2="{_ML + pw - 96}" '
                f'y2="{ly - 4}" stroke="{color}" stroke-width="2"/>'
            )
            out.append(
                f'<text x="{_ML + pw - 90}" y="{ly}" font-family="sans-serif" '
                f'font-size="11">{s.label}</text>'
            )
    out.append("</svg>")
    return "\n".join(out) + "\n"
