"""Minimal standalone SVG line charts (no plotting dependency).

Produces a self-contained SVG with axes, tick labels, a legend, and exactly
one ``<polyline>`` per data series, so downstream checks can count curves.
Output is deterministic: same input, same bytes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigurationError

PALETTE = ("#2e7d32", "#1565c0", "#c62828", "#6a1b9a", "#ef6c00", "#00838f",
           "#ad1457", "#4e342e", "#9e9d24", "#283593")


@dataclass(frozen=True)
class ChartSeries:
    label: str
    x: tuple[float, ...]
    y: tuple[float, ...]
    color: str
    stroke_width: float = 1.5
    dash: str | None = None


def _nice_step(span: float, target_ticks: int = 5) -> float:
    raw = span / max(target_ticks, 1)
    power = 10.0 ** math.floor(math.log10(raw)) if raw > 0 else 1.0
    for mult in (1.0, 2.0, 5.0, 10.0):
        if raw <= mult * power:
            return mult * power
    return 10.0 * power


def _ticks(lo: float, hi: float) -> list[float]:
    if hi <= lo:
        return [lo]
    step = _nice_step(hi - lo)
    first = math.ceil(lo / step) * step
    out = []
    v = first
    while v <= hi + 1e-9 * step:
        out.append(round(v, 10))
        v += step
    return out


def _fmt(v: float) -> str:
    return f"{v:.2f}".rstrip("0").rstrip(".")


def render_line_chart(
    series: list[ChartSeries],
    title: str = "",
    x_label: str = "",
    y_label: str = "",
    width: int = 960,
    height: int = 540,
    comments: list[str] | None = None,
) -> str:
    """Render the series as one SVG document string."""
    if not series or any(len(s.x) == 0 or len(s.x) != len(s.y) for s in series):
        raise ConfigurationError("every chart series needs matching, nonempty x and y")

    x_min = min(min(s.x) for s in series)
    x_max = max(max(s.x) for s in series)
    y_min = 0.0
    y_max = max(max(s.y) for s in series)
    if x_max == x_min:
        x_max = x_min + 1.0
    if y_max <= y_min:
        y_max = y_min + 1.0
    y_max *= 1.05

    left, right, top, bottom = 72, 24, 48, 52
    pw, ph = width - left - right, height - top - bottom

    def sx(v: float) -> float:
        return left + (v - x_min) / (x_max - x_min) * pw

    def sy(v: float) -> float:
        return top + ph - (v - y_min) / (y_max - y_min) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {width} {height}" '
        f'width="{width}" height="{height}" font-family="sans-serif">'
    ]
    for c in comments or []:
        out.append(f"<!-- {c} -->")
    out.append(f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>')
    if title:
        out.append(
            f'<text x="{width / 2:.1f}" y="24" text-anchor="middle" font-size="16">{title}</text>'
        )

    # axes and ticks
    out.append(
        f'<g stroke="#444" stroke-width="1">'
        f'<line x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}"/>'
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}"/>'
        f"</g>"
    )
    for tx in _ticks(x_min, x_max):
        px = sx(tx)
        out.append(f'<line x1="{px:.2f}" y1="{top + ph}" x2="{px:.2f}" y2="{top + ph + 5}" stroke="#444"/>')
        out.append(
            f'<text x="{px:.2f}" y="{top + ph + 20}" text-anchor="middle" font-size="11">{_fmt(tx)}</text>'
        )
    for ty in _ticks(y_min, y_max):
        py = sy(ty)
        out.append(f'<line x1="{left - 5}" y1="{py:.2f}" x2="{left}" y2="{py:.2f}" stroke="#444"/>')
        out.append(
            f'<text x="{left - 8}" y="{py + 4:.2f}" text-anchor="end" font-size="11">{_fmt(ty)}</text>'
        )
    if x_label:
        out.append(
            f'<text x="{left + pw / 2:.1f}" y="{height - 10}" text-anchor="middle" font-size="12">{x_label}</text>'
        )
    if y_label:
        out.append(
            f'<text x="18" y="{top + ph / 2:.1f}" text-anchor="middle" font-size="12" '
            f'transform="rotate(-90 18 {top + ph / 2:.1f})">{y_label}</text>'
        )

    for s in series:
        points = " ".join(f"{sx(px):.2f},{sy(py):.2f}" for px, py in zip(s.x, s.y))
        dash = f' stroke-dasharray="{s.dash}"' if s.dash else ""
        out.append(
            f'<polyline fill="none" stroke="{s.color}" stroke-width="{s.stroke_width}"{dash} '
            f'points="{points}"/>'
        )

    # legend, top-right inside the plot area
    for i, s in enumerate(series):
        ly = top + 14 + 16 * i
        lx = left + pw - 150
        dash = f' stroke-dasharray="{s.dash}"' if s.dash else ""
        out.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 22}" y2="{ly - 4}" stroke="{s.color}" stroke-width="2"{dash}/>')
        out.append(f'<text x="{lx + 28}" y="{ly}" font-size="11">{s.label}</text>')

    out.append("</svg>")
    return "\n".join(out) + "\n"
