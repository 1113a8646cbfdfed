import math
from fractions import Fraction

import pytest

from kvisguard.geometry import (
    Point,
    PolygonWithHoles,
    Ring,
    coerce_coord,
    pt,
    ring,
)
from kvisguard.generators import GenSpec, generate, l_ring


@pytest.fixture(scope="session")
def unit_square():
    return PolygonWithHoles(ring([(0, 0), (1, 0), (1, 1), (0, 1)]))


@pytest.fixture(scope="session")
def l_hexagon():
    return PolygonWithHoles(l_ring())


@pytest.fixture(scope="session")
def convex_pentagon():
    return PolygonWithHoles(ring([(0, 0), (4, 0), (5, 3), (2, 5), (-1, 3)]))


@pytest.fixture(scope="session")
def square_with_hole():
    hole = ring([(4, 4), (6, 4), (6, 6), (4, 6)]).reversed()
    return PolygonWithHoles(ring([(0, 0), (10, 0), (10, 10), (0, 10)]), [hole])


def star_ring(cx, cy, spikes, outer_r, inner_r, quantum=8) -> Ring:
    """Clockwise star polygon snapped to a 1/quantum lattice (hole-ready)."""
    pts = []
    for i in range(spikes * 2):
        ang = math.pi * i / spikes
        rad = outer_r if i % 2 == 0 else inner_r
        x = Fraction(round((cx + rad * math.cos(ang)) * quantum), quantum)
        y = Fraction(round((cy + rad * math.sin(ang)) * quantum), quantum)
        pts.append(Point(coerce_coord(x), coerce_coord(y)))
    r = Ring(pts)
    return r.reversed() if r.is_ccw() else r


@pytest.fixture(scope="session")
def l_with_star_hole():
    outer = ring([(0, 0), (20, 0), (20, 10), (10, 10), (10, 20), (0, 20)])
    return PolygonWithHoles(outer, [star_ring(14, 5, 6, 4, 0.5)])


def saw_polygon(steps: int) -> PolygonWithHoles:
    """Staircase tucked under a tall hull bridge.  Deep notches hide behind
    the overhangs, so only the topmost step is critical from the apex: good
    for exercising the occlusion logic and interval certification."""
    s = steps
    verts = [pt(0, 0), pt(s + 1, 0), pt(s + 1, 2 * s + 3)]
    for i in range(s, 0, -1):
        verts += [pt(i, i + 1), pt(i, i)]
    return PolygonWithHoles(Ring(verts))


def ceiling_saw_pocket(teeth: int):
    """Pocket whose chain is a box ceiling with ``teeth`` spikes, each
    front edge aimed radially at the sweep origin (0, 0): every tip is a
    critical vertex and every tip is visible from v_n.

    Returns (polygon, pocket, host segment, x) with the host on the right
    wall."""
    from kvisguard.decomposition import Pocket
    from kvisguard.geometry import Segment, coerce_coord

    w = 3 * teeth + 6
    chain = [pt(w, 8)]
    for i in range(teeth, 0, -1):
        tip_x = Fraction(3 * (3 * i + 2), 4)  # 3/4 of the ray to (3i+2, 8)
        chain += [pt(3 * i + 2, 8), Point(coerce_coord(tip_x), 6), pt(3 * i, 8)]
    chain += [pt(0, 8), pt(0, 0)]
    verts = [pt(0, 0), pt(w, 0)] + chain[:-1]
    poly = PolygonWithHoles(Ring(verts))
    pocket = Pocket(tuple(chain), Segment(chain[0], chain[-1]))
    host = Segment(pt(w, 0), pt(w, 8))
    return poly, pocket, host, pt(w, 8)


def steep_pocket_scene(steps: int):
    """Steep staircase whose notch corners are all visible from the far
    mouth endpoint (angles increase with depth), the Algorithm-2 pocket
    setting: mouth is a diagonal, host edge is the polygon bottom.

    Returns (polygon, pocket, host segment, x)."""
    from kvisguard.decomposition import Pocket
    from kvisguard.geometry import Segment

    s = steps
    w = 2 * s + 7
    top = 3 * s + 3
    descent = [pt(0, top)]
    for i in range(s):
        descent.append(pt(2 * i + 2, top - 3 * i))
        descent.append(pt(2 * i + 2, top - 1 - 3 * i))
    descent.append(pt(w, 0))
    chain = tuple(reversed(descent))  # ring-CCW walk order
    verts = [pt(0, 0)] + list(chain)
    poly = PolygonWithHoles(Ring(verts))
    pocket = Pocket(chain, Segment(chain[0], chain[-1]))
    # Host on the left wall: guards look through the mouth diagonal, the
    # Algorithm-2 configuration where the sweep's guarantee applies.
    host = Segment(pt(0, top), pt(0, 0))
    return poly, pocket, host, pt(0, top)


@pytest.fixture(scope="session")
def acceptance_corpus():
    """The fixed end-to-end corpus: named simple polygons."""
    return [
        ("pentagon", PolygonWithHoles(ring([(0, 0), (4, 0), (5, 3), (2, 5), (-1, 3)]))),
        ("l_hexagon", PolygonWithHoles(l_ring())),
        ("dart", generate(GenSpec("dart", 4, seed=7))),
        ("comb3", generate(GenSpec("comb", 12, seed=1))),
        ("comb5", generate(GenSpec("comb", 20, seed=1))),
        ("staircase4", generate(GenSpec("staircase", 11, seed=1))),
        ("spiral2", generate(GenSpec("spiral", 13, seed=1))),
        ("monotone16", generate(GenSpec("monotone", 16, seed=1))),
        ("random20a", generate(GenSpec("random_simple", 20, seed=1))),
        ("random20b", generate(GenSpec("random_simple", 20, seed=2))),
    ]
