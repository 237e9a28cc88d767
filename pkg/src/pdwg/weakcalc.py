"""L2 projections and the discrete weak gradient.

For a weak function v = {v0, vb} on an element T the discrete weak gradient
of degree r is the unique G in [P_r(T)]^2 with

    (G, psi)_T = -(v0, div psi)_T + <vb, psi . n>_{dT}    for all psi in [P_r(T)]^2.

The scheme uses r = k - 1.  Local weak-function coefficients are laid out as
``[v0 (nb) | vb on local edge 0 (k+1) | vb on local edge 1 | ...]`` and the
weak-gradient table maps them to ``[G_x (m) | G_y (m)]`` over the P_{k-1}
scaled monomials.
"""
from __future__ import annotations

import numpy as np

from .basis import (MAX_QUAD_DEGREE, MeshBasis, cell_quadrature, dim_p, edge_monomials,
                    gauss_line, scaled_monomials, segment_quadrature)


# standalone projections are cheap, so they integrate well past 2k + 4
STANDALONE_QUAD_DEGREE = 20


def _standalone_degree(degree: int, quad_degree: int | None) -> int:
    if quad_degree is not None:
        return quad_degree
    return min(max(2 * degree + 4, STANDALONE_QUAD_DEGREE), MAX_QUAD_DEGREE)


def _field_values(f, points):
    vals = f(points) if callable(f) else np.full(points.shape[:-1], float(f))
    return np.broadcast_to(np.asarray(vals, dtype=float), points.shape[:-1])


def l2_project_element(f, element, degree: int, quad_degree: int | None = None) -> np.ndarray:
    """Coefficients of the L2 projection of ``f`` onto P_degree(T).

    ``f`` is a callable of points (..., 2) or a constant; ``element`` is a
    :class:`~pdwg.mesh.Element` (or anything with ``vertices``, ``centroid``
    and ``diameter``).  Quadrature defaults to degree 20.
    """
    verts = np.asarray(element.vertices, dtype=float)
    qd = _standalone_degree(degree, quad_degree)
    pts, w = cell_quadrature(verts[None], qd)
    phi, _ = scaled_monomials(pts[0], element.centroid, element.diameter, degree)
    mass = phi.T @ (w[0][:, None] * phi)
    load = phi.T @ (w[0] * _field_values(f, pts[0]))
    return np.linalg.solve(mass, load)


def l2_project_edge(g, edge, degree: int, quad_degree: int | None = None) -> np.ndarray:
    """Coefficients of the L2 projection of ``g`` onto P_degree(e) in s**j."""
    p0, p1 = np.asarray(edge, dtype=float)
    qd = _standalone_degree(degree, quad_degree)
    pts, w, s = segment_quadrature(p0, p1, qd)
    chi = edge_monomials(s, degree)
    mass = chi.T @ (w[:, None] * chi)
    return np.linalg.solve(mass, chi.T @ (w * _field_values(g, pts)))


def project_cells(mb: MeshBasis, f, degree: int | None = None) -> np.ndarray:
    """Element projections of ``f`` on every cell, shape (NT, dim P_degree)."""
    n = mb.nb if degree is None else dim_p(degree)
    phi = mb.phi[..., :n]
    mass = mb.mass[:, :n, :n]
    load = np.einsum("tq,tq,tqi->ti", mb.qw, _field_values(f, mb.qp), phi)
    return np.linalg.solve(mass, load[..., None])[..., 0]


def project_edges(mb: MeshBasis, g, edges=None) -> np.ndarray:
    """Edge projections Q_b g onto P_k(e), shape (len(edges), k + 1)."""
    idx = slice(None) if edges is None else np.asarray(edges)
    pts, w = mb.eqp[idx], mb.eqw[idx]
    load = np.einsum("eq,eq,qa->ea", w, _field_values(g, pts), mb.chi)
    return np.linalg.solve(mb.edge_mass[idx], load[..., None])[..., 0]


def weak_gradient_tables(mb: MeshBasis) -> np.ndarray:
    """Weak-gradient tables for all cells, shape (NT, 2 m, nloc)."""
    nt, m, nb, ne = mb.mesh.n_cells, mb.m, mb.nb, mb.ne
    rhs = np.zeros((nt, 2, m, mb.nloc))
    # -(v0, d psi_j / dx_d)_T
    rhs[:, :, :, :nb] = -np.einsum("tq,tqjd,tqi->tdji", mb.qw, mb.dpsi, mb.phi)
    # <vb, psi_j n_d>_e on each local edge
    psi_e = mb.phi_edge[..., :m]
    edge_part = np.einsum("tlq,tlqj,tld,qa->tdjla", mb.cell_eqw, psi_e, mb.normals, mb.chi)
    rhs[:, :, :, nb:] = edge_part.reshape(nt, 2, m, mb.nv * ne)
    # the [P_{k-1}]^2 mass matrix is two copies of the scalar one
    table = np.linalg.solve(mb.mass_lower[:, None], rhs)
    return table.reshape(nt, 2 * m, mb.nloc)


def weak_gradient_operator(element, k: int, quad_degree: int | None = None) -> np.ndarray:
    """Weak-gradient table of a single element, shape (2 m, nloc)."""
    from .mesh import from_cells

    verts = np.asarray(element.vertices, dtype=float)
    single = from_cells(verts, [list(range(len(verts)))], "unit_square",
                        "triangle" if len(verts) == 3 else "rectangle")
    return weak_gradient_tables(MeshBasis(single, k, quad_degree))[0]


def local_weak_function(mb: MeshBasis, lam0: np.ndarray, lamb: np.ndarray) -> np.ndarray:
    """Gather global (NT, nb) and (NE, k+1) coefficients into local vectors (NT, nloc)."""
    nt = mb.mesh.n_cells
    return np.concatenate([lam0, lamb[mb.mesh.cell2edge].reshape(nt, -1)], axis=1)


def weak_gradient_of(vertices, r: int, v0, vb, quad_degree: int = 20) -> np.ndarray:
    """Weak gradient of an arbitrary weak function given by callables.

    Evaluates the defining identity directly with quadrature of degree
    ``quad_degree`` and returns the coefficients ``[G_x | G_y]`` over the
    scaled monomials of degree ``r`` centred at the vertex mean with scale
    equal to the element diameter.  ``vb`` is called on boundary points.
    """
    verts = np.asarray(vertices, dtype=float)
    center = verts.mean(axis=0)
    diam = max(np.linalg.norm(a - b) for a in verts for b in verts)
    pts, w = cell_quadrature(verts[None], quad_degree)
    pts, w = pts[0], w[0]
    psi, dpsi = scaled_monomials(pts, center, diam, r)
    mass = psi.T @ (w[:, None] * psi)
    nr = dim_p(r)
    rhs = np.zeros((2, nr))
    rhs -= np.einsum("q,q,qjd->dj", w, _field_values(v0, pts), dpsi)
    s, ws = gauss_line(quad_degree)
    for a, b in zip(verts, np.roll(verts, -1, axis=0)):
        t = b - a
        n = np.array([t[1], -t[0]]) / np.linalg.norm(t)
        epts = 0.5 * (a + b) + np.outer(s, 0.5 * t)
        ew = 0.5 * np.linalg.norm(t) * ws
        epsi, _ = scaled_monomials(epts, center, diam, r)
        rhs += np.einsum("q,q,qj,d->dj", ew, _field_values(vb, epts), epsi, n)
    return np.linalg.solve(mass, rhs.T).T.ravel()


def eval_vector_poly(coeffs: np.ndarray, points, center, scale, r: int) -> np.ndarray:
    """Evaluate ``[G_x | G_y]`` coefficients at points, result (..., 2)."""
    psi, _ = scaled_monomials(points, center, scale, r)
    nr = dim_p(r)
    return np.stack([psi @ coeffs[:nr], psi @ coeffs[nr:]], axis=-1)
