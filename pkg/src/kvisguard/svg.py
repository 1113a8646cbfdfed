"""SVG 1.1 rendering of polygons, decompositions, guards and sweep
intervals.  Output is deterministic: fixed float formatting, no
timestamps, stable element order."""

from __future__ import annotations

from .geometry import PolygonWithHoles
from .decomposition import Decomposition
from .placement import GuardSet, PlacementTrace


def _f(v) -> str:
    return f"{float(v):.6g}"


def render_svg(
    poly: PolygonWithHoles,
    decomposition: Decomposition | None = None,
    guards: GuardSet | None = None,
    trace: PlacementTrace | None = None,
    width: int = 640,
) -> str:
    x0, y0, x1, y1 = poly.bbox()
    w = float(x1 - x0) or 1.0
    h = float(y1 - y0) or 1.0
    pad = 0.05 * max(w, h)
    vb = f"{_f(float(x0) - pad)} {_f(float(y0) - pad)} {_f(w + 2 * pad)} {_f(h + 2 * pad)}"
    height = int(width * (h + 2 * pad) / (w + 2 * pad)) or width
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" '
        f'height="{height}" viewBox="{vb}">',
        # Flip y so the polygon renders in the usual orientation.
        f'<g transform="translate(0 {_f(float(y0) + float(y1))}) scale(1 -1)">',
    ]
    stroke = 0.006 * max(w, h)

    def path_of(ring_):
        coords = " ".join(f"{_f(v.x)},{_f(v.y)}" for v in ring_.vertices)
        return f"M {coords} Z"

    d = " ".join(path_of(r) for r in poly.rings())
    lines.append(
        f'<path d="{d}" fill="#f2f2f2" stroke="black" stroke-width="{_f(stroke)}" '
        'fill-rule="evenodd"/>'
    )
    if decomposition is not None:
        for seg, _, _ in decomposition.diagonals:
            lines.append(
                f'<line class="diagonal" x1="{_f(seg.a.x)}" y1="{_f(seg.a.y)}" '
                f'x2="{_f(seg.b.x)}" y2="{_f(seg.b.y)}" stroke="#888" '
                f'stroke-width="{_f(stroke * 0.7)}" stroke-dasharray="{_f(stroke * 2)} {_f(stroke * 2)}"/>'
            )
    if trace is not None and trace.feasible_marks:
        # Highlight sweep-feasible intervals on their host edges.
        edges = poly.edges()
        for edge_idx, lo, hi in trace.feasible_marks:
            if not 0 <= edge_idx < len(edges):
                continue
            seg = edges[edge_idx]
            a = seg.point_at(lo)
            b = seg.point_at(hi)
            lines.append(
                f'<line class="feasible" x1="{_f(a.x)}" y1="{_f(a.y)}" '
                f'x2="{_f(b.x)}" y2="{_f(b.y)}" stroke="#f80" '
                f'stroke-width="{_f(stroke * 2.2)}" stroke-linecap="round" opacity="0.6"/>'
            )
    if guards is not None:
        r = stroke * 2.5
        colors = {"base": "#c00", "hole_edge": "#06c", "relocated": "#909"}
        for i, g in enumerate(guards.guards):
            c = colors.get(g.role, "#c00")
            lines.append(
                f'<circle class="guard" cx="{_f(g.position.x)}" cy="{_f(g.position.y)}" '
                f'r="{_f(r)}" fill="{c}" stroke="white" stroke-width="{_f(stroke * 0.5)}"/>'
            )
            lines.append(
                f'<text class="guard-label" x="{_f(float(g.position.x) + r)}" '
                f'y="{_f(float(g.position.y) + r)}" font-size="{_f(r * 2)}" '
                f'transform="scale(1 -1) translate(0 {_f(-2 * float(g.position.y) - 2 * r)})">{i}</text>'
            )
    lines.append("</g>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
