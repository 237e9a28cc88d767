"""Global saddle-point system of the primal-dual weak Galerkin scheme.

Unknowns are ordered ``[lambda_0 | lambda_b | u]``::

    lambda_0   element interiors, P_k, nb = (k+1)(k+2)/2 per element
    lambda_b   edges, P_k(e), k+1 per edge (one copy per interior edge)
    u          element-wise P_{k-1}, m = k(k+1)/2 per element

and the assembled matrix is

    [ S   B^T ]   [lambda]   [F_sigma]
    [ B   -D  ] . [  u   ] = [  F_v  ]

with
    s(rho, sigma) = sum_T h_T^-1 <rho_0 - rho_b, sigma_0 - sigma_b>_dT
                    + tau1 sum_T (beta.grad rho_0 - c rho_0, beta.grad sigma_0 - c sigma_0)_T
    b(sigma, v)   = sum_T (beta . grad_w sigma - c sigma_0, v)_T
    D             = tau2 h_T^2 (u, v)_T
    F_sigma       = tau1 sum_T (f, beta.grad sigma_0 - c sigma_0)_T     (lambda_0 rows)
    F_v           = (f, v)

Edge unknowns on the inflow boundary are fixed to Q_b g and eliminated
symmetrically (columns moved to the right-hand side, rows dropped).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.sparse as sp

from .basis import MeshBasis
from .mesh import InflowSet, Mesh, classify_inflow
from .weakcalc import project_edges, weak_gradient_tables


@dataclass(frozen=True)
class SchemeParams:
    k: int = 1
    tau1: float = 1.0
    tau2: float = 1.0

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise ValueError(f"polynomial degree must be an integer >= 1, got {self.k!r}")


@dataclass(frozen=True)
class DofMap:
    n_cells: int
    n_edges: int
    nb: int
    ne: int
    m: int
    cell_dofs: np.ndarray        # (NT, nloc) global lambda dofs of each element
    u_dofs: np.ndarray           # (NT, m)
    constrained: np.ndarray      # global ids of fixed lambda_b dofs
    constrained_values: np.ndarray

    @property
    def n_lambda0(self) -> int:
        return self.n_cells * self.nb

    @property
    def n_lambda(self) -> int:
        return self.n_lambda0 + self.n_edges * self.ne

    @property
    def n_total(self) -> int:
        return self.n_lambda + self.n_cells * self.m

    @property
    def n_free(self) -> int:
        return self.n_total - len(self.constrained)

    @property
    def free(self) -> np.ndarray:
        mask = np.ones(self.n_total, dtype=bool)
        mask[self.constrained] = False
        return np.flatnonzero(mask)

    def edge_dofs(self, edges) -> np.ndarray:
        edges = np.asarray(edges)
        return self.n_lambda0 + edges[..., None] * self.ne + np.arange(self.ne)


def build_dof_map(mesh: Mesh, params: SchemeParams, inflow: InflowSet, g,
                  mb: MeshBasis | None = None) -> DofMap:
    """Global numbering plus the inflow constraint lambda_b = Q_b g."""
    k = params.k
    mb = MeshBasis(mesh, k) if mb is None else mb
    nt, ne_total = mesh.n_cells, mesh.n_edges
    nb, ne, m = mb.nb, mb.ne, mb.m
    lam0 = np.arange(nt * nb).reshape(nt, nb)
    lamb = nt * nb + mesh.cell2edge[..., None] * ne + np.arange(ne)
    cell_dofs = np.concatenate([lam0, lamb.reshape(nt, -1)], axis=1)
    u_dofs = nt * nb + ne_total * ne + np.arange(nt * m).reshape(nt, m)
    edges = np.asarray(inflow.edges, dtype=np.int64)
    values = project_edges(mb, g, edges) if len(edges) else np.zeros((0, ne))
    constrained = (nt * nb + edges[:, None] * ne + np.arange(ne)).ravel()
    order = np.argsort(constrained)
    return DofMap(nt, ne_total, nb, ne, m, cell_dofs, u_dofs,
                  constrained[order], values.ravel()[order])


class LocalBlocks(NamedTuple):
    S: np.ndarray        # (NT, nloc, nloc)
    B: np.ndarray        # (NT, m, nloc)
    D: np.ndarray        # (NT, m, m)
    f_sigma: np.ndarray  # (NT, nloc)
    f_v: np.ndarray      # (NT, m)


def coefficients_at_quadrature(mb: MeshBasis, case):
    """beta, c and f at element quadrature points, branch chosen by centroid."""
    sel = mb.centers[:, None, :]
    beta = np.broadcast_to(case.beta(mb.qp, sel), mb.qp.shape)
    c = np.broadcast_to(case.c(mb.qp, sel), mb.qp.shape[:-1])
    f = np.broadcast_to(case.f(mb.qp, sel), mb.qp.shape[:-1])
    return beta, c, f


class StabilizerFactors(NamedTuple):
    """Pieces of s(., .) as point evaluations, so that s(v, v) is a sum of squares."""
    J: np.ndarray        # (NT, nv, nq_edge, nloc) trace mismatch v0 - vb at edge nodes
    ew: np.ndarray       # (NT, nv, nq_edge) edge weights divided by h_T
    L: np.ndarray        # (NT, nq, nb) beta.grad v0 - c v0 at element nodes
    w: np.ndarray        # (NT, nq) element weights


def stabilizer_factors(mb: MeshBasis, case) -> StabilizerFactors:
    nt, nb, nv, ne, nloc = mb.mesh.n_cells, mb.nb, mb.nv, mb.ne, mb.nloc
    beta, c, _ = coefficients_at_quadrature(mb, case)
    L = np.einsum("tqd,tqid->tqi", beta, mb.dphi) - c[..., None] * mb.phi
    J = np.zeros((nt, nv, mb.chi.shape[0], nloc))
    J[..., :nb] = mb.phi_edge
    for l in range(nv):
        J[:, l, :, nb + l * ne: nb + (l + 1) * ne] = -mb.chi
    return StabilizerFactors(J, mb.cell_eqw / mb.h[:, None, None], L, mb.qw)


def local_blocks(mb: MeshBasis, case, params: SchemeParams,
                 wg: np.ndarray | None = None) -> LocalBlocks:
    """Element matrices and loads for every cell at once."""
    wg = weak_gradient_tables(mb) if wg is None else wg
    nt, nb, m, nloc = mb.mesh.n_cells, mb.nb, mb.m, mb.nloc
    beta, c, f = coefficients_at_quadrature(mb, case)
    J, ew, L, w = stabilizer_factors(mb, case)

    S = np.einsum("tlq,tlqi,tlqj->tij", ew, J, J)
    S[:, :nb, :nb] += params.tau1 * np.einsum("tq,tqi,tqj->tij", w, L, L)
    S = 0.5 * (S + S.transpose(0, 2, 1))

    # beta . grad_w sigma - c sigma_0 at quadrature points
    psi = mb.psi
    gx = np.einsum("tqi,tin->tqn", psi, wg[:, :m])
    gy = np.einsum("tqi,tin->tqn", psi, wg[:, m:])
    conv = beta[..., 0, None] * gx + beta[..., 1, None] * gy
    conv[..., :nb] -= c[..., None] * mb.phi
    B = np.einsum("tq,tqj,tqn->tjn", w, psi, conv)

    D = params.tau2 * (mb.h ** 2)[:, None, None] * mb.mass_lower
    f_sigma = np.zeros((nt, nloc))
    f_sigma[:, :nb] = params.tau1 * np.einsum("tq,tq,tqi->ti", w, f, L)
    f_v = np.einsum("tq,tq,tqj->tj", w, f, psi)
    return LocalBlocks(S, B, D, f_sigma, f_v)


def assemble_local(mb: MeshBasis, t: int, case, params: SchemeParams,
                   wg: np.ndarray | None = None) -> LocalBlocks:
    """Blocks (S_T, B_T, D_T, f_sigma_T, f_v_T) of a single element ``t``."""
    blocks = local_blocks(mb, case, params, wg)
    return LocalBlocks(*(b[t] for b in blocks))


@dataclass
class SaddleSystem:
    matrix: sp.csr_matrix
    rhs: np.ndarray
    dofmap: DofMap
    inflow: InflowSet
    basis: MeshBasis
    blocks: LocalBlocks
    params: SchemeParams
    case: object

    @property
    def mesh(self) -> Mesh:
        return self.basis.mesh

    @property
    def free(self) -> np.ndarray:
        return self.dofmap.free

    @property
    def n_free(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_lambda_free(self) -> int:
        return self.dofmap.n_lambda - len(self.dofmap.constrained)

    def blocks_view(self):
        """Split the free-dof matrix into (S, B^T, B, -D)."""
        n = self.n_lambda_free
        A = self.matrix.tocsr()
        return A[:n, :n], A[:n, n:], A[n:, :n], A[n:, n:]


def _scatter(dm: DofMap, blocks: LocalBlocks):
    nt = dm.n_cells
    cd, ud = dm.cell_dofs, dm.u_dofs
    nloc, m = cd.shape[1], ud.shape[1]
    rows = [np.broadcast_to(cd[:, :, None], (nt, nloc, nloc)),
            np.broadcast_to(ud[:, :, None], (nt, m, nloc)),
            np.broadcast_to(cd[:, :, None], (nt, nloc, m)),
            np.broadcast_to(ud[:, :, None], (nt, m, m))]
    cols = [np.broadcast_to(cd[:, None, :], (nt, nloc, nloc)),
            np.broadcast_to(cd[:, None, :], (nt, m, nloc)),
            np.broadcast_to(ud[:, None, :], (nt, nloc, m)),
            np.broadcast_to(ud[:, None, :], (nt, m, m))]
    vals = [blocks.S, blocks.B, blocks.B.transpose(0, 2, 1), -blocks.D]
    n = dm.n_total
    A = sp.coo_matrix((np.concatenate([v.ravel() for v in vals]),
                       (np.concatenate([r.ravel() for r in rows]),
                        np.concatenate([c.ravel() for c in cols]))),
                      shape=(n, n)).tocsr()
    rhs = np.bincount(cd.ravel(), weights=blocks.f_sigma.ravel(), minlength=n)
    rhs += np.bincount(ud.ravel(), weights=blocks.f_v.ravel(), minlength=n)
    return A, rhs


def assemble_global(mesh: Mesh, case, params: SchemeParams,
                    mb: MeshBasis | None = None,
                    inflow: InflowSet | None = None) -> SaddleSystem:
    """Assemble and constrain the full system on ``mesh``."""
    mb = MeshBasis(mesh, params.k) if mb is None else mb
    if mb.k != params.k:
        raise ValueError(f"basis degree {mb.k} does not match scheme degree {params.k}")
    if inflow is None:
        inflow = classify_inflow(mesh, case.beta)
    dm = build_dof_map(mesh, params, inflow, case.g, mb)
    blocks = local_blocks(mb, case, params)
    expected = (mb.nloc, mb.m)
    if blocks.S.shape[1:] != (mb.nloc, mb.nloc) or blocks.B.shape[1:] != expected[::-1]:
        raise ValueError("inconsistent local block dimensions")
    A, rhs = _scatter(dm, blocks)

    free = dm.free
    Aff = A[free][:, free]
    r = rhs[free] - A[free][:, dm.constrained] @ dm.constrained_values
    # averaging with the transpose makes A == A.T bitwise
    Aff = ((Aff + Aff.T) * 0.5).tocsr()
    Aff.sort_indices()
    return SaddleSystem(Aff, r, dm, inflow, mb, blocks, params, case)
