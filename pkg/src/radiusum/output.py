"""Text, JSON and SVG renderings of solutions."""

from __future__ import annotations

import json
import math
from typing import Any, Optional, Sequence

import numpy as np

from radiusum.cover import CycleCover


def _num(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite number {x}")
    if x == 0:
        return "0"
    return format(x, ".17g")


def _dump(obj: Any) -> str:
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _num(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{_dump(str(k))}: {_dump(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_dump(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def emit_json(solution: dict) -> str:
    """Serialize a solution record.

    Keys come out in the order ``n, value, radii, cover, duals, certificate``
    followed by any mode-specific keys in insertion order. Floats carry 17
    significant digits, so parsing restores them bit for bit.
    """
    head = ["n", "value", "radii", "cover", "duals", "certificate"]
    ordered = {k: solution[k] for k in head if k in solution}
    ordered.update((k, v) for k, v in solution.items() if k not in ordered)
    return _dump(ordered) + "\n"


def solution_record(n: int, value: float, radii: Sequence[float],
                    cover: Optional[CycleCover], a: Sequence[float], b: Sequence[float],
                    certificate: Optional[str], **extra: Any) -> dict:
    rec = {
        "n": n,
        "value": float(value),
        "radii": [float(r) for r in radii],
        "cover": cover.to_list() if cover is not None else [],
        "duals": {"a": [float(x) for x in a], "b": [float(x) for x in b]},
        "certificate": certificate,
    }
    rec.update(extra)
    return rec


def _fmt(x: float) -> str:
    return format(float(x), ".15g")


def format_text(values: Sequence[float], label: str, total: float,
                extra: Sequence[str] = ()) -> str:
    lines = [f"{label}[{i}]={_fmt(v)}" for i, v in enumerate(values)]
    lines.extend(extra)
    lines.append(f"total={_fmt(total)}")
    return "\n".join(lines) + "\n"


def format_cover_text(cover: Optional[CycleCover]) -> str:
    if cover is None:
        return "weight=0\n"
    lines = [f"edge {i} {j} x{k}" for i, j, k in cover.edges]
    lines.append(f"weight={_fmt(cover.total_weight)}")
    return "\n".join(lines) + "\n"


def render_svg(points, radii: Sequence[float], cover: Optional[CycleCover] = None) -> str:
    """SVG 1.1 drawing of the disks and cover edges of a planar solution.

    One ``circle`` per point (a fixed-size filled dot when the radius is
    zero) and one ``g`` group per cover edge holding one line, or two
    parallel lines for a doubled edge. The view box fits every disk with a
    5% margin.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("SVG output needs two-dimensional points")
    r = np.asarray(radii, dtype=float)
    lo = (pts - r[:, None]).min(axis=0)
    hi = (pts + r[:, None]).max(axis=0)
    span = float(max(hi[0] - lo[0], hi[1] - lo[1])) or 1.0
    margin = 0.05 * span
    x0, y0 = lo - margin
    w, h = (hi - lo) + 2 * margin
    dot = 0.006 * span
    stroke = 0.003 * span
    # SVG y grows downward; mirror so the picture matches the coordinates.
    flip = lo[1] + hi[1]

    def y(v: float) -> float:
        return flip - v

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'viewBox="{_fmt(x0)} {_fmt(y0)} {_fmt(w)} {_fmt(h)}">',
        f'<g fill="none" stroke="#1f5fa8" stroke-width="{_fmt(stroke)}">',
    ]
    if cover is not None:
        for i, j, k in cover.edges:
            (xa, ya), (xb, yb) = pts[i], pts[j]
            out.append(f'<g class="edge" data-i="{i}" data-j="{j}" data-mult="{k}">')
            offsets = [0.0] if k == 1 else [-1.5 * stroke, 1.5 * stroke]
            length = math.hypot(xb - xa, yb - ya) or 1.0
            nx, ny = -(yb - ya) / length, (xb - xa) / length
            for o in offsets:
                out.append(f'<line x1="{_fmt(xa + o * nx)}" y1="{_fmt(y(ya + o * ny))}" '
                           f'x2="{_fmt(xb + o * nx)}" y2="{_fmt(y(yb + o * ny))}"/>')
            out.append("</g>")
    out.append("</g>")
    out.append(f'<g stroke="#333333" stroke-width="{_fmt(stroke)}">')
    for k, ((px, py), rk) in enumerate(zip(pts, r)):
        if rk > 0:
            out.append(f'<circle class="disk" data-i="{k}" cx="{_fmt(px)}" cy="{_fmt(y(py))}" '
                       f'r="{_fmt(rk)}" fill="#f2c14e" fill-opacity="0.5"/>')
        else:
            out.append(f'<circle class="dot" data-i="{k}" cx="{_fmt(px)}" cy="{_fmt(y(py))}" '
                       f'r="{_fmt(dot)}" fill="#333333"/>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
