"""Edge-restricted guard placement in polygons with holes under
k-visibility, with a brute-force sampling oracle for coverage."""

from .geometry import (
    BOUNDARY,
    CCW,
    COLLINEAR,
    CW,
    INSIDE,
    OUTSIDE,
    InvalidPolygonError,
    Point,
    PolygonWithHoles,
    Ring,
    Segment,
    is_convex,
    is_reflex,
    orientation,
    point_in_polygon,
    pt,
    ring,
    segments_properly_cross,
)
from .visibility import (
    DegenerateSightlineError,
    EdgeInterval,
    VisibilityQueryScene,
    crossing_count,
    k_visible,
    strong_kvis_interval_on_edge,
    strongly_k_sees_region,
)
from .decomposition import (
    FAST,
    MINIMAL,
    ConvexPiece,
    Decomposition,
    DualGraph,
    NotATreeError,
    Pocket,
    decompose,
    dual_graph,
    ears,
    leftmost_ear,
    merge,
    pockets_of,
)
from .sweep import SweepResult, critical_vertices, sweep
from .placement import (
    Guard,
    GuardSet,
    PlacementTrace,
    RelocationFailedError,
    guard_convex_piece,
    guard_with_holes,
    place_guards,
    relocate_guard,
)
from .verify import (
    CoverageReport,
    SamplePlan,
    check_merge_crossing_bound,
    check_boundary_guarding,
    check_guard_bound,
    check_quad_pocket,
    coverage,
    sample_points,
)
from .generators import GenSpec, GenerationError, generate

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
