"""Scaled monomial bases and quadrature rules on triangles, rectangles and edges.

Element functions use the centroid-centred scaled monomials

    phi_a(x, y) = ((x - x_T) / h_T) ** a[0] * ((y - y_T) / h_T) ** a[1]

ordered by total degree, so the first ``k (k + 1) / 2`` functions span
P_{k-1}.  Edge functions are monomials s**j of the parameter s in [-1, 1]
running from ``edges[e, 0]`` to ``edges[e, 1]``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import permutations

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

MAX_QUAD_DEGREE = 40


class QuadratureError(ValueError):
    pass


def dim_p(k: int) -> int:
    """Dimension of P_k in two variables."""
    return (k + 1) * (k + 2) // 2 if k >= 0 else 0


def default_quad_degree(k: int) -> int:
    return 2 * k + 4


@lru_cache(maxsize=None)
def monomial_exponents(k: int) -> tuple[tuple[int, int], ...]:
    return tuple((d - j, j) for d in range(k + 1) for j in range(d + 1))


def _n_gauss(degree: int) -> int:
    if degree < 0:
        raise QuadratureError("quadrature degree must be non-negative")
    if degree > MAX_QUAD_DEGREE:
        raise QuadratureError(f"no rule implemented beyond degree {MAX_QUAD_DEGREE}")
    return max(1, -(-(degree + 1) // 2))


@lru_cache(maxsize=None)
def gauss_line(degree: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes on [-1, 1] (weights sum to 2)."""
    s, w = roots_legendre(_n_gauss(degree))
    return s, w


@lru_cache(maxsize=None)
def reference_triangle_rule(degree: int) -> tuple[np.ndarray, np.ndarray]:
    """Fully symmetric rule on the simplex in barycentric coordinates.

    Built by averaging a collapsed Gauss-Jacobi x Gauss-Legendre product rule
    over the six vertex permutations.  Weights are positive and sum to 1.
    """
    n = _n_gauss(degree)
    t, wt = roots_jacobi(n, 1.0, 0.0)
    s, ws = roots_legendre(n)
    u = 0.5 * (1 + t)
    v = 0.5 * (1 + s)
    x = np.repeat(u, n)
    y = np.outer(1 - u, v).ravel()
    w = np.outer(wt / 4, ws / 2).ravel() * 2.0
    bary = np.column_stack([1 - x - y, x, y])
    pts = np.vstack([bary[:, list(p)] for p in permutations(range(3))])
    return pts, np.tile(w, 6) / 6.0


@lru_cache(maxsize=None)
def reference_square_rule(degree: int) -> tuple[np.ndarray, np.ndarray]:
    """Tensor Gauss rule on [0, 1]^2 (weights sum to 1)."""
    s, w = gauss_line(degree)
    x = 0.5 * (1 + s)
    X, Y = np.meshgrid(x, x, indexing="ij")
    W = np.outer(w, w) / 4
    return np.column_stack([X.ravel(), Y.ravel()]), W.ravel()


@dataclass(frozen=True)
class QuadratureRule:
    points: np.ndarray
    weights: np.ndarray
    degree: int

    def integrate(self, f) -> float:
        return float(np.dot(self.weights, f(self.points)))


def cell_quadrature(vertices: np.ndarray, degree: int) -> tuple[np.ndarray, np.ndarray]:
    """Physical points (NT, nq, 2) and weights (NT, nq) for a batch of cells.

    ``vertices`` has shape (NT, 3, 2) for triangles or (NT, 4, 2) for
    axis-aligned rectangles.
    """
    vertices = np.asarray(vertices, dtype=float)
    if vertices.shape[1] == 3:
        bary, w = reference_triangle_rule(degree)
        pts = np.einsum("qa,tad->tqd", bary, vertices)
        e1 = vertices[:, 1] - vertices[:, 0]
        e2 = vertices[:, 2] - vertices[:, 0]
        area = 0.5 * np.abs(e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])
    else:
        ref, w = reference_square_rule(degree)
        lo = vertices.min(axis=1)
        ext = vertices.max(axis=1) - lo
        pts = lo[:, None, :] + ref[None] * ext[:, None, :]
        area = ext[:, 0] * ext[:, 1]
    return pts, area[:, None] * w[None]


def element_quadrature(element, degree: int) -> QuadratureRule:
    """Quadrature on one element (anything with a ``vertices`` attribute or an array)."""
    verts = np.asarray(getattr(element, "vertices", element), dtype=float)
    pts, w = cell_quadrature(verts[None], degree)
    return QuadratureRule(pts[0], w[0], degree)


def segment_quadrature(p0, p1, degree: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Gauss rule on segments p0 -> p1 (batched over leading axes).

    Returns physical points (..., nq, 2), weights (..., nq) summing to the
    segment length, and the parameters s in [-1, 1] (nq,).
    """
    p0 = np.asarray(p0, dtype=float)
    p1 = np.asarray(p1, dtype=float)
    s, w = gauss_line(degree)
    half = 0.5 * (p1 - p0)
    mid = 0.5 * (p1 + p0)
    pts = mid[..., None, :] + s[:, None] * half[..., None, :]
    length = np.linalg.norm(p1 - p0, axis=-1)
    return pts, 0.5 * length[..., None] * w, s


def edge_quadrature(edge, degree: int) -> QuadratureRule:
    """Gauss rule with ceil((degree + 1) / 2) points on a segment.

    ``edge`` is a pair of endpoints; the returned points carry the physical
    coordinates and ``params`` can be recovered with :func:`gauss_line`.
    """
    p0, p1 = np.asarray(edge, dtype=float)
    pts, w, _ = segment_quadrature(p0, p1, degree)
    return QuadratureRule(pts, w, degree)


@dataclass(frozen=True)
class ElementBasis:
    degree: int
    center: np.ndarray
    scale: float

    @property
    def exponents(self):
        return monomial_exponents(self.degree)

    @property
    def dim(self) -> int:
        return dim_p(self.degree)


@dataclass(frozen=True)
class EdgeBasis:
    degree: int

    @property
    def dim(self) -> int:
        return self.degree + 1


def scaled_monomials(points, center, scale, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Values (..., nb) and gradients (..., nb, 2) of the degree-k basis.

    ``center`` and ``scale`` broadcast against ``points[..., 0]``.
    """
    points = np.asarray(points, dtype=float)
    center = np.asarray(center, dtype=float)
    scale = np.asarray(scale, dtype=float)
    xi = (points[..., 0] - center[..., 0]) / scale
    eta = (points[..., 1] - center[..., 1]) / scale
    xp = [np.ones_like(xi)]
    yp = [np.ones_like(eta)]
    for _ in range(k):
        xp.append(xp[-1] * xi)
        yp.append(yp[-1] * eta)
    vals, grads = [], []
    for a, b in monomial_exponents(k):
        vals.append(xp[a] * yp[b])
        gx = a * xp[a - 1] * yp[b] / scale if a else np.zeros_like(xi)
        gy = b * xp[a] * yp[b - 1] / scale if b else np.zeros_like(xi)
        grads.append(np.stack([gx, gy], axis=-1))
    return np.stack(vals, axis=-1), np.stack(grads, axis=-2)


def eval_element_basis(basis: ElementBasis, points) -> tuple[np.ndarray, np.ndarray]:
    """Basis table ``values[i, q]`` and gradient table ``grads[i, q, :]``."""
    v, g = scaled_monomials(points, basis.center, basis.scale, basis.degree)
    return np.moveaxis(v, -1, 0), np.moveaxis(g, -2, 0)


def edge_monomials(params, k: int) -> np.ndarray:
    """s**j for j = 0..k, shape (..., k + 1)."""
    params = np.asarray(params, dtype=float)
    return params[..., None] ** np.arange(k + 1)


def eval_edge_basis(basis: EdgeBasis, params) -> np.ndarray:
    return np.moveaxis(edge_monomials(params, basis.degree), -1, 0)


class MeshBasis:
    """Basis and quadrature tables for every element and edge of a mesh.

    Built once per mesh level and shared by projection, weak-gradient,
    assembly and error routines.

    Shapes (NT cells, nv vertices per cell, NE edges)::

        qp, qw          (NT, nq, 2), (NT, nq)        element quadrature
        phi, dphi       (NT, nq, nb), (NT, nq, nb, 2)
        eqp, eqw        (NE, nqe, 2), (NE, nqe)      edge quadrature
        chi             (nqe, k + 1)                 edge basis at the nodes
        phi_edge        (NT, nv, nqe, nb)            element basis on local edges
        normals         (NT, nv, 2)                  outward normals
    """

    def __init__(self, mesh, k: int, quad_degree: int | None = None):
        if k < 1:
            raise ValueError("polynomial degree k must be >= 1")
        self.mesh = mesh
        self.k = k
        self.quad_degree = default_quad_degree(k) if quad_degree is None else quad_degree
        self.nb = dim_p(k)
        self.m = dim_p(k - 1)
        self.ne = k + 1
        self.nv = mesh.verts_per_cell
        self.nloc = self.nb + self.nv * self.ne

        self.centers = mesh.centroids
        self.h = mesh.diameters
        self.qp, self.qw = cell_quadrature(mesh.cell_vertices, self.quad_degree)
        self.phi, self.dphi = scaled_monomials(
            self.qp, self.centers[:, None, :], self.h[:, None], k)

        p = mesh.points
        self.eqp, self.eqw, self.s = segment_quadrature(
            p[mesh.edges[:, 0]], p[mesh.edges[:, 1]], self.quad_degree)
        self.chi = edge_monomials(self.s, k)
        self.normals = mesh.cell_normals
        pts = self.eqp[mesh.cell2edge]
        self.phi_edge, _ = scaled_monomials(
            pts, self.centers[:, None, None, :], self.h[:, None, None], k)
        self.cell_eqw = self.eqw[mesh.cell2edge]

    @property
    def psi(self) -> np.ndarray:
        """P_{k-1} basis at element quadrature points, (NT, nq, m)."""
        return self.phi[..., :self.m]

    @property
    def dpsi(self) -> np.ndarray:
        return self.dphi[..., :self.m, :]

    @cached_property
    def mass(self) -> np.ndarray:
        """Element mass matrices of P_k, (NT, nb, nb)."""
        return np.einsum("tq,tqi,tqj->tij", self.qw, self.phi, self.phi)

    @property
    def mass_lower(self) -> np.ndarray:
        """Element mass matrices of P_{k-1} (leading block of ``mass``)."""
        return self.mass[:, :self.m, :self.m]

    @cached_property
    def edge_mass(self) -> np.ndarray:
        """Edge mass matrices of P_k(e), (NE, k + 1, k + 1)."""
        return np.einsum("eq,qa,qb->eab", self.eqw, self.chi, self.chi)
