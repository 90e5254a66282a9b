"""Complementary-cone geometry for linear complementarity problems.

Solve LCP(M, q) by cone enumeration, classify planar matrices by their cone
arrangement, test regularity through the generalized Jacobian, and trace
solution branches along piecewise-linear parameter paths.
"""
from .bifurcation import (
    BifurcationDiagram,
    PwlPath,
    SolutionBranch,
    connected_components,
    detect_bifurcations,
    sample_diagram,
    sample_pwl_graph,
    trace_path,
)
from .cones import ConeSignature, arrangement, count_solutions_by_region, signature, signatures_match
from .core import (
    DEFAULT_TOL,
    DimensionError,
    IndexSet,
    LcpProblem,
    complementary_matrix,
    pwl_apply,
    x_to_zw,
    zw_to_x,
)
from .equivalence import Equivalence, classify_planar, equivalent, normal_forms, stability_2x2, verify_witness
from .interconnect import (
    InterconnectionSpec,
    PleatScenario,
    build_pleat_problem,
    interconnect,
    on_center_mu,
    scalar_ramp_solution,
)
from .singularity import classify_regularity, generalized_jacobian
from .solver import ContinuumSolution, Regularity, SolutionPoint, solve, solve_enumeration, verify_solution

__version__ = "0.1.0"
