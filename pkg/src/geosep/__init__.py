"""Balanced separators for intersection graphs of balls and spheres in R^d."""

from .balancing import SeparatorResult, balance_loop
from .ball import anchor_exact, anchor_sampled, radial_cut_round, separate_balls
from .constants import Constants, round_cap, unit_ball_volume, unit_sphere_area
from .errors import (
    GeosepError,
    InternalConsistencyError,
    SeparatorFailure,
    ValidationError,
)
from .geometry import (
    Body,
    BodyKind,
    SphereRelation,
    balls_intersect,
    body_crosses_sphere,
    cap_radius,
    dist,
    spheres_relation,
)
from .graph import (
    IntersectionGraph,
    build_graph,
    components,
    degeneracy,
    induced,
    write_edge_list,
)
from .instances import (
    Instance,
    gen_grid,
    gen_nested_bipartite,
    gen_nested_chain,
    gen_random,
    load,
    load_csv,
    save,
)
from .sphere import (
    classify_residual_component,
    nested_separator,
    pack_disjoint,
    select_small_cap_crossers,
    separate_spheres,
    trim_high_degree,
)
from .verify import (
    BoundReport,
    bounds,
    brute_force_min_separator,
    check_balanced,
    scaling_fit,
)

__version__ = "0.1.0"

__all__ = [
    "Body",
    "BodyKind",
    "BoundReport",
    "Constants",
    "GeosepError",
    "Instance",
    "IntersectionGraph",
    "InternalConsistencyError",
    "SeparatorFailure",
    "SeparatorResult",
    "SphereRelation",
    "ValidationError",
    "anchor_exact",
    "anchor_sampled",
    "balance_loop",
    "balls_intersect",
    "body_crosses_sphere",
    "bounds",
    "brute_force_min_separator",
    "build_graph",
    "cap_radius",
    "check_balanced",
    "classify_residual_component",
    "components",
    "degeneracy",
    "dist",
    "gen_grid",
    "gen_nested_bipartite",
    "gen_nested_chain",
    "gen_random",
    "induced",
    "load",
    "load_csv",
    "nested_separator",
    "pack_disjoint",
    "radial_cut_round",
    "round_cap",
    "save",
    "scaling_fit",
    "select_small_cap_crossers",
    "separate_balls",
    "separate_spheres",
    "spheres_relation",
    "trim_high_degree",
    "unit_ball_volume",
    "unit_sphere_area",
    "write_edge_list",
]
