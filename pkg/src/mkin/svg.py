"""Byte-stable SVG output.

The viewport is the bounding box of all geometry plus a 5% margin, every
coordinate is rounded to 1e-6 and printed with 12 significant digits, and
elements are written in the order given, so equal input gives equal bytes.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import BadParams

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f")


@dataclass
class Polyline:
    name: str
    points: np.ndarray
    closed: bool = False
    color: str | None = None
    dashed: bool = False


def fmt(v: float) -> str:
    """Round to 1e-6 and print with 12 significant digits; negative zero prints as 0."""
    r = round(float(v), 6)
    if r == 0.0:
        r = 0.0
    return f"{r:.12g}"


def _path_data(pts: np.ndarray, closed: bool) -> str:
    segs, pen = [], False
    for x, y in pts:
        if not (np.isfinite(x) and np.isfinite(y)):
            pen = False
            continue
        segs.append(("L" if pen else "M") + f"{fmt(x)} {fmt(-y)}")
        pen = True
    if closed and segs:
        segs.append("Z")
    return " ".join(segs)


def render_svg(curves, points=(), width: int = 800) -> str:
    curves = [c if isinstance(c, Polyline) else Polyline(*c) for c in curves]
    allpts = [np.asarray(c.points, dtype=float).reshape(-1, 2) for c in curves]
    allpts += [np.asarray(p[1], dtype=float).reshape(1, 2) for p in points]
    stack = np.vstack(allpts) if allpts else np.empty((0, 2))
    stack = stack[np.all(np.isfinite(stack), axis=1)]
    if len(stack) == 0:
        raise BadParams("nothing to draw")
    lo, hi = stack.min(axis=0), stack.max(axis=0)
    span = np.maximum(hi - lo, 1e-9)
    pad = 0.05 * span
    x0, y0 = lo[0] - pad[0], -(hi[1] + pad[1])
    w, h = span[0] + 2 * pad[0], span[1] + 2 * pad[1]
    stroke = fmt(max(w, h) / 400.0)
    height = int(round(width * h / w)) or 1
    out = ['<?xml version="1.0" encoding="UTF-8"?>',
           f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="{fmt(x0)} {fmt(y0)} {fmt(w)} {fmt(h)}">']
    for i, c in enumerate(curves):
        color = c.color or PALETTE[i % len(PALETTE)]
        dash = f' stroke-dasharray="{fmt(4 * float(stroke))}"' if c.dashed else ""
        out.append(f'<path id="{c.name}" d="{_path_data(np.asarray(c.points, dtype=float), c.closed)}" '
                   f'fill="none" stroke="{color}" stroke-width="{stroke}"{dash}/>')
    r = fmt(3 * float(stroke))
    for label, (px, py) in points:
        out.append(f'<circle id="{label}" cx="{fmt(px)}" cy="{fmt(-py)}" r="{r}" fill="black"/>')
        out.append(f'<text x="{fmt(px)}" y="{fmt(-py)}" font-size="{fmt(12 * float(stroke))}">{label}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_svg(curves, points, path) -> Path:
    text = render_svg(curves, points)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return path
