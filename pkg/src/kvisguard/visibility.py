"""k-visibility queries: crossing counts, point-pair visibility, and sampled
strong segment visibility on edges.

A sight segment crosses an obstacle only when the two open interiors meet
transversally.  Segments that graze a polygon vertex or run along an edge
are DEGENERATE: the caller perturbs and retries (the verifier does this
automatically).  All counting is exact; scene edges are pre-scaled to
integers and query points are homogenized to integer (nx, ny, d) triples so
the hot loop is pure int arithmetic.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import NamedTuple, Sequence

from .geometry import (
    Point,
    PolygonWithHoles,
    Ring,
    Segment,
    coerce_coord,
)


class DegenerateSightlineError(Exception):
    """Sight segment grazes a vertex or overlaps an obstacle edge."""

    def __init__(self, message: str, edge_index: int | None = None):
        super().__init__(message)
        self.edge_index = edge_index


class EdgeInterval(NamedTuple):
    """Parameter interval [t_lo, t_hi] on a scene edge, measured from the
    edge's first vertex."""

    edge: int
    t_lo: Fraction
    t_hi: Fraction

    def midpoint(self) -> Fraction:
        return (self.t_lo + self.t_hi) / 2

    def contains(self, t: Fraction) -> bool:
        return self.t_lo <= t <= self.t_hi


def _denominator(c) -> int:
    return c.denominator if isinstance(c, Fraction) else 1


class VisibilityQueryScene:
    """A polygon plus its flat obstacle-edge list, indexed stably (outer
    edges first, then each hole's edges in order).

    ``count_endpoint_edges`` switches to the alternative convention where an
    edge containing a query endpoint in its interior consumes one crossing.
    Default is the non-counting convention.
    """

    __slots__ = ("polygon", "obstacle_edges", "count_endpoint_edges", "scale", "_edges_i")

    def __init__(self, polygon: PolygonWithHoles, count_endpoint_edges: bool = False):
        self.polygon = polygon
        self.obstacle_edges: tuple[Segment, ...] = tuple(polygon.edges())
        self.count_endpoint_edges = count_endpoint_edges
        denoms = [1]
        for e in self.obstacle_edges:
            denoms.append(_denominator(e.a.x))
            denoms.append(_denominator(e.a.y))
            denoms.append(_denominator(e.b.x))
            denoms.append(_denominator(e.b.y))
        self.scale = lcm(*denoms)
        s = self.scale
        self._edges_i = [
            (int(e.a.x * s), int(e.a.y * s), int(e.b.x * s), int(e.b.y * s))
            for e in self.obstacle_edges
        ]

    def homogenize(self, p: Point) -> tuple[int, int, int]:
        """Integer (nx, ny, d) with p*scale == (nx/d, ny/d)."""
        sx = p.x * self.scale
        sy = p.y * self.scale
        dx, dy = _denominator(sx), _denominator(sy)
        d = lcm(dx, dy)
        return int(sx * d), int(sy * d), d


def _sign(v: int) -> int:
    if v > 0:
        return 1
    if v < 0:
        return -1
    return 0


def crossing_count_h(
    p_h: tuple[int, int, int],
    q_h: tuple[int, int, int],
    edges_i: Sequence[tuple[int, int, int, int]],
    count_endpoint_edges: bool = False,
) -> int:
    """Exact number of edges whose open interior transversally crosses the
    open segment pq, on homogenized integer points.  Raises on degeneracy."""
    pnx, pny, pd = p_h
    qnx, qny, qd = q_h
    # Direction of pq, cleared of denominators: (qx - px) * pd*qd.
    ux = qnx * pd - pnx * qd
    uy = qny * pd - pny * qd
    if ux == 0 and uy == 0:
        raise ValueError("crossing_count requires two distinct points")
    count = 0
    for idx, (ax, ay, bx, by) in enumerate(edges_i):
        # orient(P, Q, A) and orient(P, Q, B), scaled by positive factors.
        apx = ax * pd - pnx
        apy = ay * pd - pny
        oa = ux * apy - uy * apx
        bpx = bx * pd - pnx
        bpy = by * pd - pny
        ob = ux * bpy - uy * bpx
        sa, sb = _sign(oa), _sign(ob)
        if sa != 0 and sa == sb:
            continue  # both edge endpoints strictly on one side
        if sa == 0 and sb == 0:
            # Edge collinear with the sight line: overlap is degenerate,
            # single-point touch or disjoint contributes nothing.
            if _collinear_overlap(p_h, q_h, ax, ay, bx, by):
                raise DegenerateSightlineError(
                    f"sight segment collinear-overlaps edge {idx}", idx
                )
            continue
        if sa == 0:
            _vertex_on_open_segment_check(p_h, q_h, ax, ay, idx)
            continue
        if sb == 0:
            _vertex_on_open_segment_check(p_h, q_h, bx, by, idx)
            continue
        # Edge endpoints straddle line(pq); side of P and Q against line(AB).
        ex = bx - ax
        ey = by - ay
        op = ex * (pny - ay * pd) - ey * (pnx - ax * pd)
        oq = ex * (qny - ay * qd) - ey * (qnx - ax * qd)
        sp, sq = _sign(op), _sign(oq)
        if sp == 0 or sq == 0:
            # A query endpoint lies on this edge (interior, since sa*sb<0):
            # endpoint incidence, not a crossing.
            if count_endpoint_edges:
                count += 1
            continue
        if sp != sq:
            count += 1
    return count


def _collinear_overlap(p_h, q_h, ax, ay, bx, by) -> bool:
    # All four points on one line; exact 1-D interval overlap test (in the
    # common scale d = pd*qd to compare p, q, a, b).
    pnx, pny, pd = p_h
    qnx, qny, qd = q_h
    # Project on the dominant axis of pq.
    if abs(qnx * pd - pnx * qd) >= abs(qny * pd - pny * qd):
        p1, q1 = pnx * qd, qnx * pd
        a1, b1 = ax * pd * qd, bx * pd * qd
    else:
        p1, q1 = pny * qd, qny * pd
        a1, b1 = ay * pd * qd, by * pd * qd
    lo1, hi1 = (p1, q1) if p1 <= q1 else (q1, p1)
    lo2, hi2 = (a1, b1) if a1 <= b1 else (b1, a1)
    return max(lo1, lo2) < min(hi1, hi2)


def _vertex_on_open_segment_check(p_h, q_h, vx, vy, idx) -> None:
    pnx, pny, pd = p_h
    qnx, qny, qd = q_h
    # v equals p or q: endpoint incidence, fine.
    if vx * pd == pnx and vy * pd == pny:
        return
    if vx * qd == qnx and vy * qd == qny:
        return
    # v is collinear with pq here; strictly between p and q is degenerate.
    dot1 = (vx * pd - pnx) * (qnx * pd - pnx * qd) + (vy * pd - pny) * (
        qny * pd - pny * qd
    )
    dot2 = (vx * qd - qnx) * (pnx * qd - qnx * pd) + (vy * qd - qny) * (
        pny * qd - qny * pd
    )
    if dot1 > 0 and dot2 > 0:
        raise DegenerateSightlineError(
            f"sight segment passes through vertex of edge {idx}", idx
        )


def crossing_count(p: Point, q: Point, scene: VisibilityQueryScene) -> int:
    """Number of obstacle edges properly crossed by the open segment pq.

    Edges meeting p or q (at a vertex or along their interior) contribute 0
    under the default convention.  Raises DegenerateSightlineError when pq
    overlaps an edge or passes exactly through a polygon vertex.
    """
    if p == q:
        raise ValueError("crossing_count requires two distinct points")
    return crossing_count_h(
        scene.homogenize(p),
        scene.homogenize(q),
        scene._edges_i,
        scene.count_endpoint_edges,
    )


def k_visible(p: Point, q: Point, k: int, scene: VisibilityQueryScene) -> bool:
    """True iff the open segment pq crosses at most k obstacle edges."""
    return crossing_count(p, q, scene) <= k


def _toward(p: Point, target: Point, delta: Fraction) -> Point:
    """Exact point p + delta*(target - p)."""
    return Point(
        coerce_coord(p.x + delta * (target.x - p.x)),
        coerce_coord(p.y + delta * (target.y - p.y)),
    )


def default_epsilon(scene: VisibilityQueryScene) -> Fraction:
    """1e-6 of the bounding-box diagonal, as a rational."""
    diag = scene.polygon.bbox_diag()
    if diag == 0:
        return Fraction(1, 10**6)
    return Fraction(diag).limit_denominator(10**9) / 10**6


def region_boundary_samples(
    region: Ring, n_samples: int, nudge: Fraction
) -> list[Point]:
    """Points on (just inside) the region boundary: n_samples equally spaced
    per edge plus both endpoints, every sample pulled toward the centroid by
    the relative amount ``nudge`` to avoid vertex degeneracy."""
    if n_samples < 2:
        raise ValueError("need at least 2 samples per region edge")
    centroid = region.centroid()
    samples = []
    for e in region.edges():
        params = [Fraction(0), Fraction(1)]
        params += [Fraction(j + 1, n_samples + 1) for j in range(n_samples)]
        for t in params:
            base = e.point_at(t)
            if base == centroid:
                continue
            samples.append(_toward(base, centroid, nudge))
    return samples


def strongly_k_sees_region(
    p: Point,
    region: Ring,
    k: int,
    scene: VisibilityQueryScene,
    n_samples: int = 64,
    epsilon: Fraction | None = None,
) -> bool:
    """Sampled strong k-visibility: p must k-see every boundary sample of
    ``region``.  Degenerate samples are re-perturbed up to 8 times, then
    counted as failures."""
    eps = epsilon if epsilon is not None else default_epsilon(scene)
    rel = _relative_nudge(region, eps)
    centroid = region.centroid()
    for s in region_boundary_samples(region, n_samples, rel):
        ok = False
        attempt = s
        for retry in range(9):
            if attempt == p:
                ok = True
                break
            try:
                if crossing_count(p, attempt, scene) <= k:
                    ok = True
                break
            except DegenerateSightlineError:
                attempt = _toward(s, centroid, rel * (retry + 2))
        if not ok:
            return False
    return True


def _relative_nudge(region: Ring, eps: Fraction) -> Fraction:
    x0, y0, x1, y1 = region.bbox()
    span = max(x1 - x0, y1 - y0)
    if span <= 0:
        return Fraction(1, 1024)
    rel = Fraction(eps) / Fraction(span)
    if rel >= Fraction(1, 4):
        rel = Fraction(1, 1024)
    return rel


def strong_kvis_interval_on_edge(
    host_edge: int,
    region: Ring,
    k: int,
    scene: VisibilityQueryScene,
    n_samples: int = 64,
    region_samples: int = 64,
    epsilon: Fraction | None = None,
) -> list[EdgeInterval]:
    """Maximal parameter intervals on a scene edge whose sampled candidate
    positions all strongly k-see ``region``.

    Candidates sit at (2j+1)/(2n); qualifying runs are widened outward by the
    half-step so a fully qualifying edge reports [0, 1].  Returns [] when no
    candidate qualifies (callers fall back to the pocket sweep)."""
    edge = scene.obstacle_edges[host_edge]
    half = Fraction(1, 2 * n_samples)
    qualifying = []
    for j in range(n_samples):
        t = Fraction(2 * j + 1, 2 * n_samples)
        pos = edge.point_at(t)
        if strongly_k_sees_region(pos, region, k, scene, region_samples, epsilon):
            qualifying.append(t)
    intervals: list[EdgeInterval] = []
    run_start = None
    prev = None
    for t in qualifying:
        if run_start is None:
            run_start = t
        elif t - prev > 2 * half:
            intervals.append(
                EdgeInterval(host_edge, max(Fraction(0), run_start - half), min(Fraction(1), prev + half))
            )
            run_start = t
        prev = t
    if run_start is not None:
        intervals.append(
            EdgeInterval(host_edge, max(Fraction(0), run_start - half), min(Fraction(1), prev + half))
        )
    return intervals
