"""Optimal transport of vector fields over connection graphs.

Fields are ``n x d`` arrays (one row per vertex) and flows are ``m x d`` arrays
in edge order.
"""

from ._core import (
    ConnectionGraph,
    DimensionError,
    Error,
    InfeasibleError,
    NumericError,
    ParseError,
    ValidationError,
    active_edges,
    check_feasibility,
    connection_laplacian,
    distance_matrix,
    dual_gradient,
    dual_objective,
    edge_rings,
    epsilon_graph,
    feasibility_switching,
    fundamental_cycles,
    graph_laplacian,
    hop_diameter,
    incidence,
    interpolate,
    is_consistent,
    is_feasible,
    kernel,
    laplacian_spectrum,
    lift_to_ambient,
    local_pca,
    oracle_solve,
    parse_hurdat,
    path_product,
    primal_cost,
    procrustes_align,
    project_feasible,
    project_to_tangent,
    pseudo_dirac,
    sample_sphere_patch,
    sample_torus,
    solve,
    spectral_cluster,
    switch_field,
    switch_graph,
    wasserstein,
)

__version__ = "0.1.0"
