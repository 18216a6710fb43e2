"""Exact rational LP over the assignment polytope, plus the anonymous QP."""

from .polytope import (
    HREP,
    VREP,
    OptimumOverP,
    PolytopeP,
    borda_weights,
    build_P,
    dominance_rows,
    optimize_over_P,
)
from .qp import QPResult, anonymous_objective, frank_wolfe_qp
from .simplex import (
    EQ,
    GE,
    INFEASIBLE,
    LE,
    OPTIMAL,
    UNBOUNDED,
    LinearProgram,
    LPResult,
    simplex,
    verify_farkas,
)

__all__ = [
    "EQ", "GE", "LE", "HREP", "VREP", "INFEASIBLE", "OPTIMAL", "UNBOUNDED",
    "LinearProgram", "LPResult", "OptimumOverP", "PolytopeP", "QPResult",
    "anonymous_objective", "borda_weights", "build_P", "dominance_rows",
    "frank_wolfe_qp", "optimize_over_P", "simplex", "verify_farkas",
]
