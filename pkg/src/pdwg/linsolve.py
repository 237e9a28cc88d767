"""Direct solution of the constrained saddle-point system."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .assembly import SaddleSystem, SchemeParams, assemble_global

RESIDUAL_TOL = 1e-10
PIVOT_TOL = 1e-13


class SolverError(RuntimeError):
    pass


class SingularSystemError(SolverError):
    """Raised when the LU factorisation meets a (numerically) zero pivot."""

    def __init__(self, msg: str, pivot: int | None = None):
        super().__init__(msg)
        self.pivot = pivot


@dataclass
class Solution:
    lambda0: np.ndarray      # (NT, nb)
    lambdab: np.ndarray      # (NE, k + 1)
    u: np.ndarray            # (NT, m)
    residual_norm: float
    system: SaddleSystem

    @property
    def mesh(self):
        return self.system.mesh

    def vector(self) -> np.ndarray:
        """All unknowns in global order, constrained values included."""
        return np.concatenate([self.lambda0.ravel(), self.lambdab.ravel(), self.u.ravel()])


def solve_sparse(A, b, pivot_tol: float = PIVOT_TOL,
                 residual_tol: float | None = RESIDUAL_TOL) -> tuple[np.ndarray, float]:
    """LU solve with a zero-pivot check and relative residual check.

    Returns the solution and ``||A x - b|| / max(||b||, 1)``.
    """
    A = sp.csc_matrix(A, dtype=float)
    b = np.asarray(b, dtype=float)
    if A.shape[0] != A.shape[1] or A.shape[0] != b.shape[0]:
        raise SolverError(f"shape mismatch: matrix {A.shape}, rhs {b.shape}")
    try:
        lu = splu(A)
    except RuntimeError as exc:
        # SuperLU reports "Factor is exactly singular" with a 1-based column
        raise SingularSystemError(f"singular system: {exc}") from exc
    diag = np.abs(lu.U.diagonal())
    scale = diag.max() if diag.size else 0.0
    if diag.size and diag.min() <= pivot_tol * scale:
        j = int(np.argmin(diag))
        col = int(lu.perm_c[j]) if lu.perm_c is not None else j
        raise SingularSystemError(
            f"near-zero pivot {diag[j]:.3e} (max {scale:.3e}) at column {col}", pivot=col)
    x = lu.solve(b)
    res = float(np.linalg.norm(A @ x - b) / max(np.linalg.norm(b), 1.0))
    if not np.all(np.isfinite(x)):
        raise SingularSystemError("non-finite solution")
    if residual_tol is not None and res > residual_tol:
        raise SolverError(f"relative residual {res:.3e} exceeds {residual_tol:.1e}")
    return x, res


def factor_solve(system: SaddleSystem, residual_tol: float | None = RESIDUAL_TOL) -> Solution:
    """Solve the assembled system and scatter the result back to the mesh."""
    x, res = solve_sparse(system.matrix, system.rhs, residual_tol=residual_tol)
    dm = system.dofmap
    full = np.zeros(dm.n_total)
    full[dm.free] = x
    full[dm.constrained] = dm.constrained_values
    lam0 = full[:dm.n_lambda0].reshape(dm.n_cells, dm.nb)
    lamb = full[dm.n_lambda0:dm.n_lambda].reshape(dm.n_edges, dm.ne)
    u = full[dm.n_lambda:].reshape(dm.n_cells, dm.m)
    return Solution(lam0, lamb, u, res, system)


def solve(mesh, case, params: SchemeParams) -> Solution:
    """Assemble and solve on one mesh."""
    return factor_solve(assemble_global(mesh, case, params))
