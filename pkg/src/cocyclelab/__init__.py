"""Exact symbolic toolkit for two-cocycles of Lie algebra actions on symplectic charts."""

from .cohomology import Cochain, canonical_cocycle, coboundary, coboundary_solve, is_cocycle, solve_coboundary
from .exactalg import Chart, Poly, RatFunc, Variable
from .formscalc import KForm, SignConvention, VectorField
from .liealg import ActionMap, LieAlgebra, tangent_lift
from .mechanics import LagrangianSystem, PhaseSystem, momentum_maps, remark1_reconcile, remark2_residual, verify_prop2
from .problem import ProblemSpec, load_problem, parse_problem

__version__ = "0.1.0"

__all__ = [
    "ActionMap",
    "Chart",
    "Cochain",
    "KForm",
    "LagrangianSystem",
    "LieAlgebra",
    "PhaseSystem",
    "Poly",
    "ProblemSpec",
    "RatFunc",
    "SignConvention",
    "Variable",
    "VectorField",
    "canonical_cocycle",
    "coboundary",
    "coboundary_solve",
    "is_cocycle",
    "load_problem",
    "momentum_maps",
    "parse_problem",
    "remark1_reconcile",
    "remark2_residual",
    "solve_coboundary",
    "tangent_lift",
    "verify_prop2",
]
