"""Matplotlib report figures, rendered to files next to the CSV outputs.

Uses the same :class:`~epiwave.svgchart.ChartSeries` bundles as the SVG
writer so the PNG report and the standalone SVG always show the same data.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .svgchart import ChartSeries


def save_line_chart(
    path,
    series: list[ChartSeries],
    title: str = "",
    x_label: str = "",
    y_label: str = "",
    boundary: float | None = None,
    dpi: int = 120,
    fmt: str | None = None,
) -> None:
    """Render the series to ``path``; ``boundary`` draws a vertical marker
    (e.g. the last fitted day before a forecast window). ``fmt`` overrides
    the format inferred from the suffix (needed for temp-then-rename writes).
    """
    fig, ax = plt.subplots(figsize=(9.6, 5.4))
    try:
        for s in series:
            ax.plot(
                s.x, s.y,
                color=s.color,
                linewidth=s.stroke_width,
                linestyle="--" if s.dash else "-",
                label=s.label,
            )
        if boundary is not None:
            ax.axvline(boundary, color="#888888", linewidth=1.0, linestyle=":")
        ax.set_title(title)
        ax.set_xlabel(x_label)
        ax.set_ylabel(y_label)
        ax.set_ylim(bottom=0)
        ax.grid(True, alpha=0.3)
        ax.legend(loc="upper right", fontsize=9)
        fig.tight_layout()
        fig.savefig(path, dpi=dpi, format=fmt)
    finally:
        plt.close(fig)
