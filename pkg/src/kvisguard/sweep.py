"""Rotational sweep over a pocket's reflex chain: critical vertices and the
feasible guard sub-segment on a host edge.

The sweep ray originates at the chain endpoint opposite the host edge's
mouth vertex and rotates across the chain.  A chain vertex is critical when
the ray reaches it before any chain edge occludes it and both its incident
chain edges lie in one closed half-plane of the ray.  The feasible segment
runs from the ray through the chosen critical vertex to the mouth vertex of
the host edge, open at that vertex.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .geometry import (
    CW,
    Point,
    Segment,
    orientation,
    point_on_segment,
    segments_properly_cross,
)
from .decomposition import Pocket
from .visibility import EdgeInterval

OK = "ok"
SHORT = "short"  # fewer critical vertices than the k/2 budget
NO_CRITICAL_VERTICES = "no_critical_vertices"


@dataclass
class SweepResult:
    critical_vertices: tuple[Point, ...]
    chosen: Point | None
    ray_hit: Point | None
    feasible: EdgeInterval
    status: str


def _chain_for_sweep(pocket: Pocket, x: Point):
    """Chain ordered v1..vn with v1 == x (host-edge side).  Returns
    (chain, reversed_flag)."""
    chain = list(pocket.chain)
    if chain[0] == x:
        return chain, False
    if chain[-1] == x:
        return list(reversed(chain)), True
    raise ValueError("x must be a chain endpoint on the mouth")


def critical_vertices(pocket: Pocket, chain_reversed: bool = False) -> list[Point]:
    """Chain vertices hit by the rotating ray from v_n before any chain edge
    occludes them, whose incident chain edges share one closed half-plane of
    the ray.  Returned in chain order from v_n toward v_1.

    The chain is stored in the host ring's CCW walk order, so a vertex
    reflex in the polygon turns clockwise along the chain (counterclockwise
    when the caller flipped the chain to move the sweep origin)."""
    chain = list(pocket.chain)
    n = len(chain)
    if n < 3:
        return []
    vn = chain[-1]
    reflex_turn = -CW if chain_reversed else CW
    edges = [Segment(chain[i], chain[i + 1]) for i in range(n - 1)]
    out: list[Point] = []
    for idx in range(n - 2, 0, -1):
        u = chain[idx]
        if orientation(chain[idx - 1], u, chain[idx + 1]) != reflex_turn:
            continue
        if u == vn:
            continue
        sight = Segment(vn, u)
        occluded = False
        for ei, e in enumerate(edges):
            if ei in (idx - 1, idx):
                continue  # u's own incident edges
            if segments_properly_cross(sight, e):
                occluded = True
                break
            for endpoint in (e.a, e.b):
                if endpoint not in (vn, u) and point_on_segment(
                    endpoint, sight, closed=False
                ):
                    occluded = True
                    break
            if occluded:
                break
        if occluded:
            continue
        o_prev = orientation(vn, u, chain[idx - 1])
        o_next = orientation(vn, u, chain[idx + 1])
        if o_prev * o_next >= 0:
            out.append(u)
    return out


def _ray_segment_hit(origin: Point, through: Point, e: Segment):
    """Intersection of the ray origin->through (extended) with segment e.
    Returns (point, t on e) or None."""
    dx = through.x - origin.x
    dy = through.y - origin.y
    ex = e.b.x - e.a.x
    ey = e.b.y - e.a.y
    den = dx * ey - dy * ex
    if den == 0:
        return None
    # origin + s*(d) == e.a + t*(e_vec)
    ax = e.a.x - origin.x
    ay = e.a.y - origin.y
    s = Fraction(ax * ey - ay * ex, den)
    t = Fraction(dx * ay - dy * ax, -den)
    if s <= 0 or t < 0 or t > 1:
        return None
    return e.point_at(t), t


def sweep(
    pocket: Pocket,
    e: Segment,
    x: Point,
    k: int,
    epsilon_t: Fraction = Fraction(1, 4096),
) -> SweepResult:
    """Feasible sub-segment of host edge e for a k-visibility guard watching
    the pocket.  ``x`` is e's endpoint on the mouth; the interval is closed
    at the ray hit and pulled off x by ``epsilon_t`` (in edge parameters).

    With fewer critical vertices than the ceil(k/2) budget the last critical
    vertex is used and the interval widens accordingly; with none at all the
    whole edge is feasible.
    """
    if k < 2 or k % 2 != 0:
        raise ValueError("sweep requires an even k >= 2")
    if x == e.a:
        t_x = Fraction(0)
    elif x == e.b:
        t_x = Fraction(1)
    else:
        raise ValueError("x must be an endpoint of the host edge")
    chain, flipped = _chain_for_sweep(pocket, x)
    vn = chain[-1]
    crits = critical_vertices(Pocket(tuple(chain), pocket.mouth), chain_reversed=flipped)
    if not crits:
        lo, hi = _nudged(Fraction(0), Fraction(1), t_x, epsilon_t)
        return SweepResult(
            (), None, None, EdgeInterval(-1, lo, hi), NO_CRITICAL_VERTICES
        )
    need = (k + 1) // 2
    if len(crits) >= need:
        chosen = crits[need - 1]
        status = OK
    else:
        chosen = crits[-1]
        status = SHORT
    hit = _ray_segment_hit(vn, chosen, e)
    if hit is None:
        # Ray misses e entirely; e lies in one closed half-plane of the ray.
        # Feasible is the whole edge when e sits on the same side as x's
        # pocket approach, which is the only geometry that reaches here.
        lo, hi = _nudged(Fraction(0), Fraction(1), t_x, epsilon_t)
        return SweepResult(tuple(crits), chosen, None, EdgeInterval(-1, lo, hi), status)
    ray_hit, t_hit = hit
    lo, hi = _nudged(min(t_hit, t_x), max(t_hit, t_x), t_x, epsilon_t)
    return SweepResult(tuple(crits), chosen, ray_hit, EdgeInterval(-1, lo, hi), status)


def _nudged(lo: Fraction, hi: Fraction, t_x: Fraction, eps: Fraction):
    """Pull the x-end of [lo, hi] inward, keeping the interval nonempty."""
    span = hi - lo
    step = min(eps, span / 4) if span > 0 else Fraction(0)
    if t_x == hi:
        hi = hi - step
    elif t_x == lo:
        lo = lo + step
    if lo > hi:
        lo = hi
    return lo, hi
