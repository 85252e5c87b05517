"""Exact TSP for alpha-spaced point sets in the hyperbolic plane."""

from .geometry import (
    EPS_GEOM,
    DegenerateSegmentsError,
    GeometryError,
    HLine,
    HSegment,
    KleinPoint,
    PoincarePoint,
    angle_of_parallelism,
    hyp_distance,
    hypercycle_arc_length,
    klein_to_poincare,
    perpendicular_foot,
    poincare_to_klein,
    reflect_through_point,
    segments_cross,
    side_of_line,
)
from .instances import (
    GenerationError,
    GridEmbedding,
    gen_grid_like,
    gen_random_alpha_spaced,
    gen_regular_ngon,
)
from .separator import (
    DoubleCone,
    HypercycleArc,
    SegmentClass,
    SeparatorBounds,
    SeparatorRegion,
    arc_position,
    bounds,
    build_region,
    build_region_for_boundary,
    centerpoint,
    classify_segment,
    empty_cone_line,
    qt_length,
    rho_choice,
)
from .solvers import (
    CapExceededError,
    SolveResult,
    SolverConfig,
    UnsupportedDensityError,
    brute_force_path_cover,
    enumerate_matchings,
    enumerate_scr,
    held_karp_path_cover,
    held_karp_tsp,
    hyperbolic_tsp_dnc,
    tsp_via_path_cover,
)
from .tour import (
    Instance,
    Matching,
    PathCover,
    PathCoverProblem,
    SegmentSet,
    Tour,
    min_spacing,
    path_cover_length,
    realizes,
    tour_is_noncrossing,
    tour_length,
    uncovered_split,
    verify_spacing,
)

__version__ = "0.1.0"
