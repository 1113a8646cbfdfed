"""Deterministic polygon generators for the test corpus.

Families: random simple polygons (2-opt untangling of a random cycle),
x-monotone polygons, combs, Greek-key spirals, staircases, darts, and
polygons with convex holes.  Same (family, n, seed) always yields the same
polygon; everything is integer-coordinate so downstream predicates run on
pure ints.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .geometry import (
    InvalidPolygonError,
    Point,
    PolygonWithHoles,
    Ring,
    Segment,
    is_convex,
    orientation,
    pt,
    ring_is_simple,
    segments_properly_cross,
)

RANDOM_SIMPLE = "random_simple"
MONOTONE = "monotone"
COMB = "comb"
SPIRAL = "spiral"
STAIRCASE = "staircase"
DART = "dart"
WITH_HOLES = "with_holes"

FAMILIES = (RANDOM_SIMPLE, MONOTONE, COMB, SPIRAL, STAIRCASE, DART, WITH_HOLES)


class GenerationError(Exception):
    """Generator could not produce a valid polygon within its retry budget."""


@dataclass(frozen=True)
class GenSpec:
    family: str
    n: int
    seed: int = 0
    param: int | None = None  # teeth / turns / steps / hole count

    def resolved_param(self) -> int:
        if self.param is not None:
            return self.param
        if self.family == COMB:
            if self.n % 4 != 0 or self.n < 8:
                raise ValueError(f"comb needs n = 4*teeth >= 8, got n={self.n}")
            return self.n // 4
        if self.family == SPIRAL:
            if (self.n - 5) % 4 != 0 or self.n < 9:
                raise ValueError(f"spiral needs n = 4*turns + 5 >= 9, got n={self.n}")
            return (self.n - 5) // 4
        if self.family == STAIRCASE:
            if self.n % 2 == 0 or self.n < 5:
                raise ValueError(f"staircase needs odd n = 2*steps + 3 >= 5, got n={self.n}")
            return (self.n - 3) // 2
        if self.family == WITH_HOLES:
            return 1
        return 0


def comb_ring(teeth: int) -> Ring:
    """Comb with ``teeth`` upward prongs: 4*teeth vertices, 2*teeth - 1
    reflex (the gap corners plus the stepped right side)."""
    if teeth < 2:
        raise ValueError("comb needs at least 2 teeth")
    t = teeth
    verts = [pt(0, 0), pt(2 * t, 0), pt(2 * t - 1, 1)]
    for i in range(t - 1, 0, -1):
        verts += [pt(2 * i + 1, 2), pt(2 * i, 2), pt(2 * i, 1), pt(2 * i - 1, 1)]
    verts.append(pt(1, 2))
    return Ring(verts)


def spiral_ring(turns: int) -> Ring:
    """Greek-key spiral corridor with ``turns`` full turns: 4*turns + 5
    vertices, 2*turns + 1 reflex."""
    if turns < 1:
        raise ValueError("spiral needs at least 1 turn")
    s = 4 * turns + 1
    dirs = [(1, 0), (0, 1), (-1, 0), (0, -1)]
    lengths = [s, s]
    while len(lengths) < 2 * turns + 2:
        lengths.append(lengths[-2] - 2)
    outbound = [(0, 0)]
    x = y = 0
    for i, ln in enumerate(lengths):
        dx, dy = dirs[i % 4]
        x += dx * ln
        y += dy * ln
        outbound.append((x, y))
    m = len(lengths)
    cap_dx, cap_dy = dirs[m % 4]
    offsets = {1: (-1, 1), 2: (-1, -1), 3: (1, -1), 0: (1, 1)}
    inbound = [(outbound[m][0] + cap_dx, outbound[m][1] + cap_dy)]
    for i in range(m - 1, 0, -1):
        ox, oy = offsets[i % 4]
        inbound.append((outbound[i][0] + ox, outbound[i][1] + oy))
    return Ring([pt(x, y) for x, y in outbound + inbound])


def staircase_ring(steps: int) -> Ring:
    """Right triangle-ish region with a staircase hypotenuse: 2*steps + 3
    vertices, ``steps`` reflex."""
    if steps < 1:
        raise ValueError("staircase needs at least 1 step")
    s = steps
    verts = [pt(0, 0), pt(s + 1, 0), pt(s + 1, s + 1)]
    for i in range(1, s + 1):
        verts += [pt(s + 1 - i, s + 2 - i), pt(s + 1 - i, s + 1 - i)]
    return Ring(verts)


def l_ring(scale: int = 1) -> Ring:
    """The canonical L-shaped hexagon, optionally scaled."""
    c = scale
    return Ring(
        [pt(0, 0), pt(2 * c, 0), pt(2 * c, c), pt(c, c), pt(c, 2 * c), pt(0, 2 * c)]
    )


def _random_dart(rng: random.Random, size: int = 64) -> Ring | None:
    for _ in range(64):
        a = pt(rng.randrange(size), rng.randrange(size))
        b = pt(rng.randrange(size), rng.randrange(size))
        c = pt(rng.randrange(size), rng.randrange(size))
        if orientation(a, b, c) <= 0:
            continue
        # Interior point pulled toward one vertex makes the reflex tip.
        px = (2 * a.x + b.x + c.x) // 4
        py = (2 * a.y + b.y + c.y) // 4
        p = pt(px, py)
        verts = [a, b, p, c]
        r = Ring(verts)
        if not r.is_ccw():
            continue
        if any(
            orientation(r[i - 1], r[i], r[i + 1]) == 0 for i in range(4)
        ):
            continue
        if not ring_is_simple(r):
            continue
        if is_convex(r):
            continue
        return r
    return None


def _random_monotone(rng: random.Random, n: int) -> Ring | None:
    width = 8 * n
    height = 40
    xs = rng.sample(range(1, width), n - 2)
    xs.sort()
    k_low = rng.randrange(1, n - 2) if n > 3 else 1
    idx = sorted(rng.sample(range(n - 2), k_low))
    lower = [(xs[i], -rng.randrange(1, height)) for i in idx]
    upper = [
        (xs[i], rng.randrange(1, height)) for i in range(n - 2) if i not in set(idx)
    ]
    verts = [pt(0, 0)] + [pt(x, y) for x, y in lower] + [pt(width, 0)]
    verts += [pt(x, y) for x, y in reversed(upper)]
    r = Ring(verts)
    if len(set(r.vertices)) != len(r.vertices):
        return None
    for i in range(len(r)):
        if orientation(r[i - 1], r[i], r[i + 1]) == 0:
            return None
    if not r.is_ccw():
        return None
    if not ring_is_simple(r):
        return None
    return r


def is_x_monotone(r: Ring) -> bool:
    """Boundary splits into one x-increasing and one x-decreasing chain."""
    n = len(r)
    xs = [v.x for v in r.vertices]
    changes = 0
    for i in range(n):
        a, b, c = xs[i - 1], xs[i], xs[(i + 1) % n]
        if (b - a) * (c - b) < 0:
            changes += 1
        elif b == a or c == b:
            return False  # vertical edges break strict x-monotonicity
    return changes == 2


def _random_simple(rng: random.Random, n: int) -> Ring | None:
    size = 16 * n
    points: list[Point] = []
    seen = set()
    while len(points) < n:
        p = (rng.randrange(size), rng.randrange(size))
        if p in seen:
            continue
        seen.add(p)
        points.append(pt(*p))
    verts = list(points)
    # 2-opt untangling: reverse the span between any two crossing edges.
    for _ in range(40 * n * n):
        m = len(verts)
        crossing = None
        for i in range(m):
            e1 = Segment(verts[i], verts[(i + 1) % m])
            for j in range(i + 1, m):
                if j == i + 1 or (i == 0 and j == m - 1):
                    continue
                e2 = Segment(verts[j], verts[(j + 1) % m])
                if segments_properly_cross(e1, e2):
                    crossing = (i, j)
                    break
            if crossing:
                break
        if crossing is None:
            break
        i, j = crossing
        verts[i + 1 : j + 1] = reversed(verts[i + 1 : j + 1])
    else:
        return None
    r = Ring(verts)
    if not r.is_ccw():
        r = r.reversed()
    for i in range(len(r)):
        if orientation(r[i - 1], r[i], r[i + 1]) == 0:
            return None
    if not ring_is_simple(r):
        return None
    return r


def _random_with_holes(rng: random.Random, n: int, count: int) -> PolygonWithHoles | None:
    side = 12 * (count + 1)
    outer = Ring([pt(0, 0), pt(side, 0), pt(side, side), pt(0, side)])
    holes = []
    cell = side // (count + 1)
    for h in range(count):
        cx = cell * (h + 1)
        cy = cell * (1 + (h % max(1, count - 1)) if count > 1 else 1)
        pts_h = []
        for _ in range(8):
            pts_h.append(
                pt(cx + rng.randrange(-cell // 3, cell // 3), cy + rng.randrange(-cell // 3, cell // 3))
            )
        from .geometry import convex_hull

        hull = convex_hull(pts_h)
        if len(hull) < 3:
            return None
        hole = Ring(hull).reversed()  # clockwise
        holes.append(hole)
    try:
        return PolygonWithHoles(outer, holes)
    except InvalidPolygonError:
        return None


def generate(spec: GenSpec) -> PolygonWithHoles:
    """Produce a valid polygon of the requested family; deterministic in
    (family, n, seed).  Raises GenerationError after bounded reseeding."""
    fam = spec.family
    if fam not in FAMILIES:
        raise ValueError(f"unknown family: {fam}")
    if fam == DART and spec.n != 4:
        raise ValueError("dart is a quadrilateral; n must be 4")
    if fam in (RANDOM_SIMPLE, MONOTONE) and spec.n < 3:
        raise ValueError("need n >= 3")
    param = spec.resolved_param()
    if fam == COMB and spec.n != 4 * param:
        raise ValueError(f"comb with {param} teeth has {4 * param} vertices, not {spec.n}")
    if fam == SPIRAL and spec.n != 4 * param + 5:
        raise ValueError(f"spiral with {param} turns has {4 * param + 5} vertices, not {spec.n}")
    if fam == STAIRCASE and spec.n != 2 * param + 3:
        raise ValueError(f"staircase with {param} steps has {2 * param + 3} vertices, not {spec.n}")

    if fam == COMB:
        return PolygonWithHoles(comb_ring(param))
    if fam == SPIRAL:
        return PolygonWithHoles(spiral_ring(param))
    if fam == STAIRCASE:
        return PolygonWithHoles(staircase_ring(param))

    attempts = []
    for retry in range(64):
        rng = random.Random(f"{spec.seed}:{fam}:{spec.n}:{retry}")
        if fam == DART:
            r = _random_dart(rng)
            poly = PolygonWithHoles(r) if r is not None else None
        elif fam == MONOTONE:
            r = _random_monotone(rng, spec.n)
            poly = PolygonWithHoles(r) if r is not None else None
            if poly is not None and not is_x_monotone(poly.outer):
                poly = None
        elif fam == RANDOM_SIMPLE:
            r = _random_simple(rng, spec.n)
            poly = PolygonWithHoles(r) if r is not None else None
        elif fam == WITH_HOLES:
            poly = _random_with_holes(rng, spec.n, param)
        else:  # pragma: no cover
            raise AssertionError(fam)
        if poly is not None:
            return poly
        attempts.append(retry)
    raise GenerationError(f"{fam} generation failed after {len(attempts)} retries")
