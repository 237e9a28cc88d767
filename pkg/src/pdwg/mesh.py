"""Conforming triangle/rectangle meshes of the benchmark domains.

Three domains are supported:

* ``unit_square``    -- (0, 1)^2, triangles or a 3x2 rectangular grid
* ``l_shape``        -- (0, 1)^2 minus the upper-right quadrant, triangles
* ``cracked_square`` -- (0, 1)^2 with a slit along (0.5, 1) x {0.5}, triangles

The slit is represented topologically: every vertex strictly inside the
slit, and the mouth vertex (1, 0.5), exists twice (once per lip) while the
tip (0.5, 0.5) is shared.  The mesh is then an ordinary simply connected
polygonal mesh whose boundary runs along both lips, so refinement and edge
adjacency need no special cases.

Edges are stored with the orientation of their *left* element, i.e. the
element that traverses the edge counter-clockwise in the stored direction.
``edge_normals`` therefore points out of ``edge2cell[:, 0]``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable, NamedTuple

import numpy as np

DOMAINS = ("unit_square", "l_shape", "cracked_square")
KINDS = ("triangle", "rectangle")

INTERIOR, BOUNDARY, CRACK_UPPER, CRACK_LOWER = 0, 1, 2, 3
TAG_NAMES = {INTERIOR: "interior", BOUNDARY: "boundary",
             CRACK_UPPER: "crack_upper", CRACK_LOWER: "crack_lower"}

INFLOW_TOL = 1e-12
_GEOM_TOL = 1e-12


class MeshError(ValueError):
    pass


class Element(NamedTuple):
    """Read-only view of one mesh element."""

    index: int
    kind: str
    vertex_ids: np.ndarray
    vertices: np.ndarray
    centroid: np.ndarray
    diameter: float
    area: float
    edge_ids: np.ndarray
    edge_signs: np.ndarray


@dataclass(frozen=True, eq=False)
class Mesh:
    points: np.ndarray
    cells: np.ndarray
    edges: np.ndarray
    edge2cell: np.ndarray
    cell2edge: np.ndarray
    cell2edge_sign: np.ndarray
    edge_tags: np.ndarray
    domain: str
    kind: str
    level: int = 0

    @property
    def n_points(self) -> int:
        return len(self.points)

    @property
    def n_cells(self) -> int:
        return len(self.cells)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def verts_per_cell(self) -> int:
        return self.cells.shape[1]

    @cached_property
    def cell_vertices(self) -> np.ndarray:
        """Vertex coordinates per cell, shape (NT, nv, 2)."""
        return self.points[self.cells]

    @cached_property
    def centroids(self) -> np.ndarray:
        # vertex mean is the area centroid for triangles and parallelograms
        return self.cell_vertices.mean(axis=1)

    @cached_property
    def areas(self) -> np.ndarray:
        v = self.cell_vertices
        w = np.roll(v, -1, axis=1)
        return 0.5 * np.sum(v[..., 0] * w[..., 1] - w[..., 0] * v[..., 1], axis=1)

    @cached_property
    def diameters(self) -> np.ndarray:
        v = self.cell_vertices
        d = np.linalg.norm(v[:, :, None, :] - v[:, None, :, :], axis=-1)
        return d.max(axis=(1, 2))

    @cached_property
    def edge_vectors(self) -> np.ndarray:
        p = self.points
        return p[self.edges[:, 1]] - p[self.edges[:, 0]]

    @cached_property
    def edge_lengths(self) -> np.ndarray:
        return np.linalg.norm(self.edge_vectors, axis=1)

    @cached_property
    def edge_normals(self) -> np.ndarray:
        """Unit normals pointing out of the left element ``edge2cell[:, 0]``."""
        t = self.edge_vectors
        return np.column_stack([t[:, 1], -t[:, 0]]) / self.edge_lengths[:, None]

    @cached_property
    def edge_midpoints(self) -> np.ndarray:
        return self.points[self.edges].mean(axis=1)

    @cached_property
    def cell_normals(self) -> np.ndarray:
        """Outward unit normal of every local edge, shape (NT, nv, 2)."""
        return self.edge_normals[self.cell2edge] * self.cell2edge_sign[..., None]

    @property
    def boundary_edges(self) -> np.ndarray:
        return np.flatnonzero(self.edge_tags != INTERIOR)

    def element(self, t: int) -> Element:
        return Element(
            index=int(t),
            kind=self.kind,
            vertex_ids=self.cells[t].copy(),
            vertices=self.cell_vertices[t].copy(),
            centroid=self.centroids[t].copy(),
            diameter=float(self.diameters[t]),
            area=float(self.areas[t]),
            edge_ids=self.cell2edge[t].copy(),
            edge_signs=self.cell2edge_sign[t].copy(),
        )


def from_cells(points, cells, domain: str, kind: str, level: int = 0) -> Mesh:
    """Build edge topology and boundary tags for a list of ccw cells."""
    points = np.asarray(points, dtype=float)
    cells = np.asarray(cells, dtype=np.int64)
    nt, nv = cells.shape
    a = cells.ravel()
    b = np.roll(cells, -1, axis=1).ravel()
    key = np.minimum(a, b) * len(points) + np.maximum(a, b)
    _, first, inverse, counts = np.unique(key, return_index=True,
                                          return_inverse=True, return_counts=True)
    if np.any(counts > 2):
        raise MeshError("non-manifold mesh: an edge is shared by more than two cells")
    inverse = inverse.ravel()
    # orientation and left cell come from the first local occurrence
    edges = np.column_stack([a[first], b[first]])
    cell2edge = inverse.reshape(nt, nv)
    cell2edge_sign = np.where(a == edges[inverse, 0], 1, -1).reshape(nt, nv)

    owner = np.repeat(np.arange(nt), nv)
    edge2cell = np.full((len(edges), 2), -1, dtype=np.int64)
    left = cell2edge_sign.ravel() > 0
    edge2cell[inverse[left], 0] = owner[left]
    edge2cell[inverse[~left], 1] = owner[~left]
    if np.any(np.bincount(inverse[left], minlength=len(edges)) != 1):
        raise MeshError("inconsistent orientation: neighbouring cells traverse an edge the same way")

    tags = np.where(edge2cell[:, 1] < 0, BOUNDARY, INTERIOR)
    if domain == "cracked_square":
        mid = points[edges].mean(axis=1)
        on_slit = ((tags == BOUNDARY) & (np.abs(mid[:, 1] - 0.5) < _GEOM_TOL)
                   & (mid[:, 0] > 0.5) & (mid[:, 0] < 1.0))
        above = points[cells[edge2cell[:, 0]]].mean(axis=1)[:, 1] > 0.5
        tags = np.where(on_slit & above, CRACK_UPPER, tags)
        tags = np.where(on_slit & ~above, CRACK_LOWER, tags)

    return Mesh(points=points, cells=cells, edges=edges, edge2cell=edge2cell,
                cell2edge=cell2edge, cell2edge_sign=cell2edge_sign,
                edge_tags=tags, domain=domain, kind=kind, level=level)


DIAGONALS = ("main", "anti")


def _split_squares(squares, diagonal="anti"):
    # "main" cuts each square (ll, lr, ur, ul) along its slope +1 diagonal,
    # "anti" along the slope -1 one
    tris = []
    for ll, lr, ur, ul in squares:
        if diagonal == "main":
            tris += [(ll, lr, ur), (ll, ur, ul)]
        else:
            tris += [(ll, lr, ul), (lr, ur, ul)]
    return tris


def build_coarse(domain: str = "unit_square", kind: str = "triangle",
                 diagonal: str = "anti") -> Mesh:
    """Level-0 mesh of a benchmark domain.

    Triangulations split every square along its slope -1 diagonal
    (``diagonal="anti"``, the default) or its slope +1 diagonal
    (``diagonal="main"``).  With beta = [1, 1] the slope +1 choice puts a
    whole edge family along the characteristics, which costs one order for
    k = 2.

    Raises
    ------
    MeshError
        For an unknown domain/kind or an unsupported combination
        (rectangles are only available on the unit square).
    """
    kind = normalize_kind(kind)
    if diagonal not in DIAGONALS:
        raise MeshError(f"unknown diagonal {diagonal!r}; expected one of {DIAGONALS}")
    if domain not in DOMAINS:
        raise MeshError(f"unknown domain {domain!r}; expected one of {DOMAINS}")
    if kind == "rectangle":
        if domain != "unit_square":
            raise MeshError(f"rectangular meshes are not supported on {domain!r}")
        xs, ys = np.linspace(0, 1, 4), np.linspace(0, 1, 3)
        pts = np.array([(x, y) for y in ys for x in xs])
        cells = [(j * 4 + i, j * 4 + i + 1, (j + 1) * 4 + i + 1, (j + 1) * 4 + i)
                 for j in range(2) for i in range(3)]
        return from_cells(pts, cells, domain, kind)

    if domain == "unit_square":
        pts = [(0, 0), (1, 0), (1, 1), (0, 1)]
        cells = _split_squares([(0, 1, 2, 3)], diagonal)
    else:
        # 3x3 grid of half-unit points, numbered row by row
        pts = [(0.5 * i, 0.5 * j) for j in range(3) for i in range(3)]
        quads = {"ll": (0, 1, 4, 3), "lr": (1, 2, 5, 4),
                 "ul": (3, 4, 7, 6), "ur": (4, 5, 8, 7)}
        if domain == "l_shape":
            cells = _split_squares([quads["ll"], quads["lr"], quads["ul"]], diagonal)
            keep = sorted({v for c in cells for v in c})
            renum = {old: new for new, old in enumerate(keep)}
            pts = [pts[i] for i in keep]
            cells = [tuple(renum[v] for v in c) for c in cells]
        else:
            pts.append((1.0, 0.5))          # upper copy of the slit mouth
            upper = (4, 9, 8, 7)
            cells = _split_squares([quads["ll"], quads["lr"], quads["ul"], upper], diagonal)
    return from_cells(pts, cells, domain, kind)


def refine(mesh: Mesh) -> Mesh:
    """Uniform refinement: each cell becomes four congruent children."""
    nt, nv = mesh.cells.shape
    npts, ne = mesh.n_points, mesh.n_edges
    mids = npts + mesh.cell2edge            # midpoint of local edge i -> i+1
    v = mesh.cells
    new_points = [mesh.points, mesh.edge_midpoints]
    if nv == 3:
        m0, m1, m2 = mids.T
        children = np.stack([
            np.column_stack([v[:, 0], m0, m2]),
            np.column_stack([m0, v[:, 1], m1]),
            np.column_stack([m2, m1, v[:, 2]]),
            np.column_stack([m0, m1, m2]),
        ], axis=1)
    else:
        c = npts + ne + np.arange(nt)
        new_points.append(mesh.centroids)
        m0, m1, m2, m3 = mids.T
        children = np.stack([
            np.column_stack([v[:, 0], m0, c, m3]),
            np.column_stack([m0, v[:, 1], m1, c]),
            np.column_stack([c, m1, v[:, 2], m2]),
            np.column_stack([m3, c, m2, v[:, 3]]),
        ], axis=1)
    return from_cells(np.vstack(new_points), children.reshape(-1, nv),
                      mesh.domain, mesh.kind, mesh.level + 1)


def build_mesh(domain: str, kind: str = "triangle", level: int = 0,
               diagonal: str = "anti") -> Mesh:
    mesh = build_coarse(domain, kind, diagonal)
    for _ in range(level):
        mesh = refine(mesh)
    return mesh


@dataclass(frozen=True)
class InflowSet:
    edges: np.ndarray
    beta_n: np.ndarray

    def __len__(self) -> int:
        return len(self.edges)

    def __contains__(self, e) -> bool:
        return bool(np.any(self.edges == e))


def classify_inflow(mesh: Mesh, beta: Callable, tol: float = INFLOW_TOL) -> InflowSet:
    """Boundary and slit edges with beta(midpoint) . n < -tol.

    ``beta`` is called as ``beta(points)`` and must return an array of shape
    ``points.shape``.  Characteristic edges (|beta . n| <= tol) are left
    unconstrained.
    """
    bd = mesh.boundary_edges
    mid = mesh.edge_midpoints[bd]
    bn = np.einsum("ij,ij->i", np.asarray(beta(mid), dtype=float), mesh.edge_normals[bd])
    inflow = bn < -tol
    return InflowSet(edges=bd[inflow], beta_n=bn[inflow])


class MeshStats(NamedTuple):
    inv_h_label: int
    n_elements: int
    n_edges: int
    max_diameter: float


def mesh_stats(mesh: Mesh) -> MeshStats:
    return MeshStats(2 ** mesh.level, mesh.n_cells, mesh.n_edges,
                     float(mesh.diameters.max()))


def normalize_kind(kind: str) -> str:
    aliases = {"tri": "triangle", "triangle": "triangle",
               "rect": "rectangle", "rectangle": "rectangle"}
    try:
        return aliases[kind]
    except KeyError:
        raise MeshError(f"unknown element kind {kind!r}; expected tri or rect") from None


def dump_mesh(mesh: Mesh) -> str:
    """Plain-text dump of a mesh.

    Layout::

        # pdwg mesh <domain> <kind> level <level>
        points <NP>
        <id> <x> <y>
        elements <NT>
        <id> <kind> <v0> <v1> ...
        edges <NE>
        <id> <v0> <v1> <tag> <left> <right>

    ``right`` is -1 on boundary and slit edges.
    """
    lines = [f"# pdwg mesh {mesh.domain} {mesh.kind} level {mesh.level}",
             f"points {mesh.n_points}"]
    lines += [f"{i} {x:.17g} {y:.17g}" for i, (x, y) in enumerate(mesh.points)]
    lines.append(f"elements {mesh.n_cells}")
    lines += [f"{i} {mesh.kind} " + " ".join(map(str, c)) for i, c in enumerate(mesh.cells)]
    lines.append(f"edges {mesh.n_edges}")
    for i, ((a, b), tag, (lt, rt)) in enumerate(zip(mesh.edges, mesh.edge_tags, mesh.edge2cell)):
        lines.append(f"{i} {a} {b} {TAG_NAMES[int(tag)]} {lt} {rt}")
    return "\n".join(lines) + "\n"


def load_mesh(text: str) -> Mesh:
    """Inverse of :func:`dump_mesh` (topology is rebuilt from the elements)."""
    rows = [ln.split() for ln in text.splitlines() if ln.strip()]
    header = rows[0]
    if header[:3] != ["#", "pdwg", "mesh"]:
        raise MeshError("not a pdwg mesh dump")
    domain, kind, level = header[3], header[4], int(header[6])
    i = 1
    npts = int(rows[i][1])
    pts = np.array([[float(r[1]), float(r[2])] for r in rows[i + 1:i + 1 + npts]])
    i += 1 + npts
    nt = int(rows[i][1])
    cells = np.array([[int(v) for v in r[2:]] for r in rows[i + 1:i + 1 + nt]])
    return from_cells(pts, cells, domain, kind, level)
