"""Sandwich approximation of weakly nondominated sets for strictly
quasiconvex multiobjective programs.

The solver encloses the nondominated boundary of the outcome set between an
inner conormal hull of computed weakly efficient values and an outer
copolyblock refined by cutting cones, to any positive tolerance.
"""

from . import errors, problems
from .bounds import OutcomeBox, Simplex, ideal_point, make_box, simplex_bound
from .copolyblock import VertexSet
from .driver import (
    Membership,
    SolveResult,
    es_membership,
    gap_report,
    initial_vertex_set,
    result_from_dict,
    result_from_json,
    solve,
)
from .model import (
    ConvexOverConcaveFractional,
    ConvexQuadratic,
    FeasibleSet,
    LinearFractional,
    QvpProblem,
    evaluate,
    evaluate_constraints,
    load_problem,
    sublevel,
)
from .oracle import FeasibilityOutcome, check_feasible, minimize_linear
from .scalarize import ScalarizationResult, generate_wes, solve_chebyshev, verify_wes

__version__ = "0.1.0"

__all__ = [
    "ConvexOverConcaveFractional",
    "ConvexQuadratic",
    "FeasibilityOutcome",
    "FeasibleSet",
    "LinearFractional",
    "Membership",
    "OutcomeBox",
    "QvpProblem",
    "ScalarizationResult",
    "Simplex",
    "SolveResult",
    "VertexSet",
    "check_feasible",
    "errors",
    "es_membership",
    "evaluate",
    "evaluate_constraints",
    "gap_report",
    "generate_wes",
    "ideal_point",
    "initial_vertex_set",
    "load_problem",
    "make_box",
    "minimize_linear",
    "problems",
    "result_from_dict",
    "result_from_json",
    "simplex_bound",
    "solve",
    "solve_chebyshev",
    "sublevel",
    "verify_wes",
]
