"""Deterministic SVG export of contour sets."""

from __future__ import annotations

import numpy as np

from .errors import BladekitError, EmptyPlot
from .geometry import Contour

CANVAS_W = 800
CANVAS_H = 600
MARGIN = 20
_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2")


def render_svg(contours: list[Contour], shifts: "list[tuple[float, float]] | None" = None) -> str:
    """Render closed polylines on a fixed 800x600 canvas, equal aspect.

    ``shifts[k]`` translates contour k before plotting (the first entry is
    conventionally (0, 0)); output bytes depend only on the inputs.
    """
    if not contours:
        raise EmptyPlot("no contours to plot")
    if shifts is None:
        shifts = [(0.0, 0.0)] * len(contours)
    if len(shifts) != len(contours):
        raise EmptyPlot("need one shift per contour")

    moved = [c.points + np.array([sx, sy]) for c, (sx, sy) in zip(contours, shifts)]
    allpts = np.vstack(moved)
    x0, y0 = allpts.min(axis=0)
    x1, y1 = allpts.max(axis=0)
    w = max(x1 - x0, 1e-300)
    h = max(y1 - y0, 1e-300)
    scale = min((CANVAS_W - 2 * MARGIN) / w, (CANVAS_H - 2 * MARGIN) / h)
    cx = 0.5 * (x0 + x1)
    cy = 0.5 * (y0 + y1)

    def to_canvas(pts):
        px = (pts[:, 0] - cx) * scale + CANVAS_W / 2
        py = CANVAS_H / 2 - (pts[:, 1] - cy) * scale
        return px, py

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{CANVAS_W}" '
        f'height="{CANVAS_H}" viewBox="0 0 {CANVAS_W} {CANVAS_H}">',
        f'<rect width="{CANVAS_W}" height="{CANVAS_H}" fill="white"/>',
    ]
    for k, pts in enumerate(moved):
        px, py = to_canvas(pts)
        coords = " ".join(f"{float(a)!r},{float(b)!r}" for a, b in zip(px, py))
        color = _COLORS[k % len(_COLORS)]
        lines.append(
            f'<polygon points="{coords}" fill="none" stroke="{color}" stroke-width="1.5"/>'
        )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def export_svg(contours: list[Contour], path: str,
               shifts: "list[tuple[float, float]] | None" = None) -> None:
    text = render_svg(contours, shifts)
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise BladekitError(f"cannot write {path}: {exc}") from exc
