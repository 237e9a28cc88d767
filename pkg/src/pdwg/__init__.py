"""Primal-dual weak Galerkin solver for beta . grad(lambda) - c lambda = f."""
from .analysis import ErrorReport, RateTable, convergence_rates, error_norms
from .assembly import SaddleSystem, SchemeParams, assemble_global
from .cases import TestCase, builtin_case, list_cases
from .linsolve import SingularSystemError, Solution, factor_solve, solve
from .mesh import Mesh, build_coarse, build_mesh, classify_inflow, refine

__version__ = "0.1.0"

__all__ = [
    "ErrorReport", "RateTable", "convergence_rates", "error_norms",
    "SaddleSystem", "SchemeParams", "assemble_global",
    "TestCase", "builtin_case", "list_cases",
    "SingularSystemError", "Solution", "factor_solve", "solve",
    "Mesh", "build_coarse", "build_mesh", "classify_inflow", "refine",
]
