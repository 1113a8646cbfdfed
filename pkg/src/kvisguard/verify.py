"""Brute-force coverage oracle and geometric property checks.

The oracle never looks at placement internals: it samples interior points
(grid, seeded-uniform, and near-feature), counts k-visible guards per
sample with the exact crossing counter, and reports the minimum coverage,
a histogram, and every violation.  Degenerate sight lines are retried with
a seeded jitter, then the sample is re-drawn.
"""

from __future__ import annotations

import os
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .geometry import (
    INSIDE,
    Point,
    PolygonWithHoles,
    Ring,
    Segment,
    coerce_coord,
    point_in_polygon,
)
from .decomposition import Decomposition, pockets_of
from .visibility import (
    DegenerateSightlineError,
    VisibilityQueryScene,
    crossing_count,
    crossing_count_h,
    default_epsilon,
)

_QUANTUM = 1 << 20  # sample coordinates snap to this lattice (exact rationals)


@dataclass(frozen=True)
class SamplePlan:
    grid_density: int = 64
    random_count: int = 2000
    near_feature_count: int = 8
    seed: int = 0

    def __post_init__(self):
        if self.grid_density < 0 or self.random_count < 0 or self.near_feature_count < 0:
            raise ValueError("sample counts must be nonnegative")
        if self.grid_density == 0 and self.random_count == 0 and self.near_feature_count == 0:
            raise ValueError("sample plan would produce no samples")


@dataclass
class CoverageReport:
    per_sample: list[tuple[Point, int]]
    min_coverage: int
    histogram: dict[int, int]
    violations: list[tuple[Point, int]]
    guard_bound_ok: bool | None
    target_m: int
    degenerate_dropped: int = 0

    def ok(self) -> bool:
        return self.min_coverage >= self.target_m and not self.violations


def _quantize(x: float) -> Fraction:
    return Fraction(round(x * _QUANTUM), _QUANTUM)


def _grid_points(poly: PolygonWithHoles, density: int) -> list[Point]:
    if density <= 0:
        return []
    x0, y0, x1, y1 = poly.bbox()
    out = []
    for i in range(density):
        fx = Fraction(2 * i + 1, 2 * density)
        px = x0 + fx * (x1 - x0)
        for j in range(density):
            fy = Fraction(2 * j + 1, 2 * density)
            py = y0 + fy * (y1 - y0)
            p = Point(coerce_coord(px), coerce_coord(py))
            if point_in_polygon(p, poly) == INSIDE:
                out.append(p)
    return out


def _random_points(poly: PolygonWithHoles, count: int, rng: random.Random) -> list[Point]:
    if count <= 0:
        return []
    x0, y0, x1, y1 = poly.bbox()
    out = []
    tries = 0
    cap = 100 * count
    while len(out) < count and tries < cap:
        tries += 1
        p = Point(
            coerce_coord(Fraction(x0) + _quantize(rng.random()) * Fraction(x1 - x0)),
            coerce_coord(Fraction(y0) + _quantize(rng.random()) * Fraction(y1 - y0)),
        )
        if point_in_polygon(p, poly) == INSIDE:
            out.append(p)
    return out


def _near_feature_points(
    poly: PolygonWithHoles, per_feature: int, eps: Fraction
) -> list[Point]:
    if per_feature <= 0:
        return []
    out = []
    for ring_ in poly.rings():
        n = len(ring_)
        interior_sign = 1  # rings oriented so interior is on the left
        for i in range(n):
            a, b = ring_[i], ring_[i + 1]
            prev = ring_[i - 1]
            # Vertex probe: walk toward the neighbour midpoint (or away for
            # reflex corners) at shrinking distances.
            mid = Point(
                coerce_coord(Fraction(prev.x + b.x, 2)),
                coerce_coord(Fraction(prev.y + b.y, 2)),
            )
            out.extend(_probe_toward(poly, a, mid, per_feature, eps))
            # Edge-midpoint probe along the inward normal.
            em = Segment(a, b).midpoint()
            nx = -(b.y - a.y) * interior_sign
            ny = (b.x - a.x) * interior_sign
            target = Point(coerce_coord(em.x + nx), coerce_coord(em.y + ny))
            out.extend(_probe_toward(poly, em, target, per_feature, eps))
    return out


def _probe_toward(poly, origin: Point, target: Point, count: int, eps: Fraction):
    """Points roughly eps, 2*eps, ... inside the polygon from ``origin``
    along (or against) the direction to ``target``; misses are dropped."""
    if origin == target:
        return []
    dx = float(target.x - origin.x)
    dy = float(target.y - origin.y)
    norm = (dx * dx + dy * dy) ** 0.5
    if norm == 0:
        return []
    unit = Fraction(float(eps) / norm).limit_denominator(10**12)
    out = []
    for j in range(count):
        for sign in (1, -1):
            delta = sign * unit * (j + 1)
            p = Point(
                coerce_coord(origin.x + delta * (target.x - origin.x)),
                coerce_coord(origin.y + delta * (target.y - origin.y)),
            )
            if point_in_polygon(p, poly) == INSIDE:
                out.append(p)
                break
    return out


def sample_points(poly: PolygonWithHoles, plan: SamplePlan) -> list[Point]:
    """Strictly interior samples: grid + seeded-uniform + near-feature."""
    eps = Fraction(poly.bbox_diag()).limit_denominator(10**9) / 10**6
    rng = random.Random(f"{plan.seed}:random")
    samples = _grid_points(poly, plan.grid_density)
    samples += _random_points(poly, plan.random_count, rng)
    samples += _near_feature_points(poly, plan.near_feature_count, eps)
    return samples


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("KVIS_THREADS", "1")))
    except ValueError:
        return 1


def _count_visible(
    sample_h, guards_h, edges_i, k: int, count_endpoint_edges: bool
) -> int | None:
    """Visible-guard count for one homogenized sample; None on degeneracy."""
    n = 0
    for g_h in guards_h:
        try:
            if crossing_count_h(sample_h, g_h, edges_i, count_endpoint_edges) <= k:
                n += 1
        except DegenerateSightlineError:
            return None
    return n


def _coverage_chunk(args):
    samples_h, guards_h, edges_i, k, cee = args
    return [_count_visible(s, guards_h, edges_i, k, cee) for s in samples_h]


def coverage(
    poly: PolygonWithHoles,
    guards,
    plan: SamplePlan,
    piece_count: int | None = None,
    target_m: int | None = None,
) -> CoverageReport:
    """Count k-visible guards at every sample; report minimum coverage,
    histogram, violations and the guard bound when a piece count is known.

    ``guards`` is a GuardSet (its ``k`` and ``target_m`` drive the check).
    A degenerate query jitters its sample up to 8 times, then the sample is
    re-drawn from a reserve stream (both seeded).
    """
    if not guards.guards:
        raise ValueError("coverage requires a nonempty guard set")
    k = guards.k
    m = target_m if target_m is not None else guards.target_m
    scene = VisibilityQueryScene(poly)
    eps = default_epsilon(scene)
    samples = sample_points(poly, plan)
    guards_h = [scene.homogenize(g.position) for g in guards.guards]
    edges_i = scene._edges_i
    cee = scene.count_endpoint_edges

    def jittered(p: Point, rng: random.Random) -> Point:
        jx = Fraction(round((rng.random() * 2 - 1) * _QUANTUM), _QUANTUM)
        jy = Fraction(round((rng.random() * 2 - 1) * _QUANTUM), _QUANTUM)
        return Point(
            coerce_coord(p.x + jx * eps), coerce_coord(p.y + jy * eps)
        )

    reserve = random.Random(f"{plan.seed}:reserve")
    x0, y0, x1, y1 = poly.bbox()

    def redraw() -> Point | None:
        for _ in range(200):
            p = Point(
                coerce_coord(Fraction(x0) + _quantize(reserve.random()) * Fraction(x1 - x0)),
                coerce_coord(Fraction(y0) + _quantize(reserve.random()) * Fraction(y1 - y0)),
            )
            if point_in_polygon(p, poly) == INSIDE:
                return p
        return None

    threads = _threads()
    counts: list[int | None]
    if threads > 1 and len(samples) >= 256:
        from concurrent.futures import ProcessPoolExecutor

        chunks = [samples[i::threads] for i in range(threads)]
        args = [
            ([scene.homogenize(s) for s in ch], guards_h, edges_i, k, cee)
            for ch in chunks
        ]
        try:
            with ProcessPoolExecutor(max_workers=threads) as ex:
                results = list(ex.map(_coverage_chunk, args))
            counts = [None] * len(samples)
            for t, res in enumerate(results):
                for w, val in enumerate(res):
                    counts[t + w * threads] = val
        except Exception:
            counts = [
                _count_visible(scene.homogenize(s), guards_h, edges_i, k, cee)
                for s in samples
            ]
    else:
        counts = [
            _count_visible(scene.homogenize(s), guards_h, edges_i, k, cee)
            for s in samples
        ]

    per_sample: list[tuple[Point, int]] = []
    dropped = 0
    for idx, (s, c) in enumerate(zip(samples, counts)):
        if c is None:
            rng = random.Random(f"{plan.seed}:jitter:{idx}")
            fixed = None
            attempt = s
            for _ in range(8):
                attempt = jittered(s, rng)
                if point_in_polygon(attempt, poly) != INSIDE:
                    continue
                c2 = _count_visible(scene.homogenize(attempt), guards_h, edges_i, k, cee)
                if c2 is not None:
                    fixed = (attempt, c2)
                    break
            if fixed is None:
                repl = redraw()
                if repl is not None:
                    c3 = _count_visible(scene.homogenize(repl), guards_h, edges_i, k, cee)
                    if c3 is not None:
                        fixed = (repl, c3)
            if fixed is None:
                dropped += 1
                continue
            per_sample.append(fixed)
        else:
            per_sample.append((s, c))

    histogram: dict[int, int] = {}
    for _, c in per_sample:
        histogram[c] = histogram.get(c, 0) + 1
    min_cov = min((c for _, c in per_sample), default=0)
    violations = [(p, c) for p, c in per_sample if c < m]
    bound_ok = None
    if piece_count is not None:
        bound_ok = len(guards.guards) <= max(k * piece_count, k + 2)
    return CoverageReport(
        per_sample=per_sample,
        min_coverage=min_cov,
        histogram=dict(sorted(histogram.items())),
        violations=violations,
        guard_bound_ok=bound_ok,
        target_m=m,
        degenerate_dropped=dropped,
    )


def check_guard_bound(guards, d: Decomposition) -> bool:
    """|guards| <= max(k*C, k+2): the kC bound with the convex base case."""
    c = len(d.pieces)
    return len(guards.guards) <= max(guards.k * c, guards.k + 2)


@dataclass
class PropertyReport:
    cases: int
    violations: list
    detail: dict = field(default_factory=dict)

    def ok(self) -> bool:
        return not self.violations


def check_merge_crossing_bound(
    polys,
    pairs_per_union: int = 1000,
    seed: int = 0,
    mode: str = "minimal",
) -> PropertyReport:
    """Merging two adjacent convex pieces exposes at most one two-edge
    obstruction: sampled point pairs inside each union must cross at most 2
    of the union's own edges."""
    from .decomposition import decompose, merge

    violations = []
    cases = 0
    worst = 0
    for pi, poly in enumerate(polys):
        d = decompose(poly, mode)
        for diag_id in range(len(d.diagonals)):
            union_piece = None
            merged = merge(d, diag_id)
            seg, pa, pb = d.diagonals[diag_id]
            union_piece = merged.piece_by_id(min(pa, pb))
            u_ring = union_piece.ring
            u_poly = PolygonWithHoles(u_ring, validate=False)
            u_scene = VisibilityQueryScene(u_poly)
            rng = random.Random(f"{seed}:{pi}:{diag_id}")
            cases += 1
            got = 0
            x0, y0, x1, y1 = u_ring.bbox()
            attempts = 0
            while got < pairs_per_union and attempts < 100 * pairs_per_union:
                attempts += 1
                p = Point(
                    coerce_coord(Fraction(x0) + _quantize(rng.random()) * Fraction(x1 - x0)),
                    coerce_coord(Fraction(y0) + _quantize(rng.random()) * Fraction(y1 - y0)),
                )
                q = Point(
                    coerce_coord(Fraction(x0) + _quantize(rng.random()) * Fraction(x1 - x0)),
                    coerce_coord(Fraction(y0) + _quantize(rng.random()) * Fraction(y1 - y0)),
                )
                if p == q:
                    continue
                if point_in_polygon(p, u_poly) != INSIDE:
                    continue
                if point_in_polygon(q, u_poly) != INSIDE:
                    continue
                try:
                    c = crossing_count(p, q, u_scene)
                except DegenerateSightlineError:
                    continue
                got += 1
                worst = max(worst, c)
                if c > 2:
                    violations.append((pi, diag_id, p, q, c))
    return PropertyReport(cases=cases, violations=violations, detail={"max_crossings": worst})


def check_boundary_guarding(
    convex_ring: Ring, g: Point, samples: int = 64, seed: int = 0
) -> PropertyReport:
    """Exterior point vs convex polygon: every interior sample is reached
    with exactly one boundary crossing."""
    poly = PolygonWithHoles(convex_ring, validate=False)
    scene = VisibilityQueryScene(poly)
    rng = random.Random(seed)
    x0, y0, x1, y1 = convex_ring.bbox()
    violations = []
    got = 0
    attempts = 0
    while got < samples and attempts < 200 * samples:
        attempts += 1
        p = Point(
            coerce_coord(Fraction(x0) + _quantize(rng.random()) * Fraction(x1 - x0)),
            coerce_coord(Fraction(y0) + _quantize(rng.random()) * Fraction(y1 - y0)),
        )
        if point_in_polygon(p, poly) != INSIDE:
            continue
        try:
            c = crossing_count(g, p, scene)
        except DegenerateSightlineError:
            continue
        got += 1
        if c != 1:
            violations.append((p, c))
    return PropertyReport(cases=got, violations=violations)


def check_quad_pocket(quads) -> PropertyReport:
    """Non-convex simple quadrilaterals have exactly one pocket."""
    violations = []
    cases = 0
    for qi, quad in enumerate(quads):
        cases += 1
        ps = pockets_of(quad.outer if isinstance(quad, PolygonWithHoles) else quad)
        if len(ps) != 1:
            violations.append((qi, len(ps)))
    return PropertyReport(cases=cases, violations=violations)
