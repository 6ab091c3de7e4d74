"""Numerical laboratory for loops on spheres and their reversal symmetry.

The package builds discretized loops, deforms them off the fixed set of
the reversal involution, embeds spheres into loop space equivariantly,
and searches for loops alpha with f(alpha) = f(reversed alpha) under a
vector of functionals f, certifying each find with a recomputable
residual.
"""

from .coincidence import (
    CoincidenceCertificate,
    OddMapProblem,
    SolverConfig,
    certificate_from_dict,
    family_demo,
    family_report,
    hemisphere_grid,
    load_certificate,
    odd_map_g,
    save_certificate,
    solve_bu,
    sphere_grid,
)
from .embeddings import (
    TfSphereParams,
    default_tf_params,
    embed_alpha,
    embed_beta,
    embed_gamma,
    h_lambda,
    tf_sphere_embed,
)
from .errors import (
    AntipodalPair,
    BaseMismatch,
    DegenerateCircle,
    DegenerateInput,
    GridMismatch,
    InsufficientBasis,
    InvalidLoopData,
    LoopspaceError,
    NoConvergence,
    RegimeError,
)
from .functionals import (
    FunctionalSpec,
    ReducedSystem,
    SquaredDistanceToPath,
    WeightedCoordinate,
    build_alpha_x,
    build_reduced_system,
    coincidence_gap,
    default_reduced_basis,
    eval_f,
    load_functional_spec,
    null_space,
    quadrature,
    read_beta_path,
    write_beta_path,
)
from .loops import (
    MIN_GRID,
    TF_TOL,
    Loop,
    PushoffArcs,
    as_grid_size,
    default_pushoff_arcs,
    load_loop,
    loop_from_dict,
    loop_to_dict,
    pushoff,
    pushoff_homotopy,
    save_loop,
)
from .sphere import (
    ANTIPODAL_TOL,
    UNIT_TOL,
    GeodesicArc,
    angle_between,
    circle_alpha,
    circle_beta,
    equator_base,
    meridian_arc,
    normalize,
    rotation_to_base,
    slerp,
    south_pole,
)

__version__ = "0.1.0"

__all__ = [
    "ANTIPODAL_TOL",
    "AntipodalPair",
    "BaseMismatch",
    "CoincidenceCertificate",
    "DegenerateCircle",
    "DegenerateInput",
    "FunctionalSpec",
    "GeodesicArc",
    "GridMismatch",
    "InsufficientBasis",
    "InvalidLoopData",
    "Loop",
    "LoopspaceError",
    "MIN_GRID",
    "NoConvergence",
    "OddMapProblem",
    "PushoffArcs",
    "ReducedSystem",
    "RegimeError",
    "SolverConfig",
    "SquaredDistanceToPath",
    "TF_TOL",
    "TfSphereParams",
    "UNIT_TOL",
    "WeightedCoordinate",
    "angle_between",
    "as_grid_size",
    "build_alpha_x",
    "build_reduced_system",
    "certificate_from_dict",
    "circle_alpha",
    "circle_beta",
    "coincidence_gap",
    "default_pushoff_arcs",
    "default_reduced_basis",
    "default_tf_params",
    "embed_alpha",
    "embed_beta",
    "embed_gamma",
    "equator_base",
    "eval_f",
    "family_demo",
    "family_report",
    "h_lambda",
    "hemisphere_grid",
    "load_certificate",
    "load_functional_spec",
    "load_loop",
    "loop_from_dict",
    "loop_to_dict",
    "meridian_arc",
    "normalize",
    "null_space",
    "odd_map_g",
    "pushoff",
    "pushoff_homotopy",
    "quadrature",
    "read_beta_path",
    "rotation_to_base",
    "save_certificate",
    "save_loop",
    "slerp",
    "solve_bu",
    "south_pole",
    "sphere_grid",
    "tf_sphere_embed",
    "write_beta_path",
]
