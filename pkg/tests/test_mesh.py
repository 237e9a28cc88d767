import numpy as np
import pytest

from pdwg.mesh import (CRACK_LOWER, CRACK_UPPER, INTERIOR, MeshError, build_coarse,
                       build_mesh, classify_inflow, dump_mesh, load_mesh, mesh_stats, refine)
from pdwg.cases import builtin_case, parse_field

TRI_DOMAINS = ["unit_square", "l_shape", "cracked_square"]


@pytest.mark.parametrize("diagonal", ["anti", "main"])
@pytest.mark.parametrize("domain,kind,nt,ne,nv", [
    ("unit_square", "triangle", 2, 5, 4),
    ("unit_square", "rectangle", 6, 17, 12),
    ("l_shape", "triangle", 6, 13, 8),
    ("cracked_square", "triangle", 8, 17, 10),
])
def test_coarse_counts(domain, kind, nt, ne, nv, diagonal):
    m = build_coarse(domain, kind, diagonal)
    assert (m.n_cells, m.n_edges, m.n_points) == (nt, ne, nv)


@pytest.mark.parametrize("domain", ["l_shape", "cracked_square"])
def test_rectangles_only_on_square(domain):
    with pytest.raises(MeshError):
        build_coarse(domain, "rectangle")


def test_bad_names():
    with pytest.raises(MeshError):
        build_coarse("disk")
    with pytest.raises(MeshError):
        build_coarse("unit_square", "hexagon")
    with pytest.raises(MeshError):
        build_coarse("unit_square", "tri", diagonal="sideways")


def test_refine_counts_square():
    m = refine(build_coarse("unit_square"))
    assert (m.n_cells, m.n_edges, m.n_points) == (8, 16, 9)
    for level in range(5):
        assert build_mesh("unit_square", "tri", level).n_cells == 2 * 4 ** level


def test_crack_pairs_double():
    counts = []
    m = build_coarse("cracked_square")
    for _ in range(4):
        counts.append((np.sum(m.edge_tags == CRACK_UPPER), np.sum(m.edge_tags == CRACK_LOWER)))
        m = refine(m)
    assert counts == [(1, 1), (2, 2), (4, 4), (8, 8)]


@pytest.mark.parametrize("domain,kind", [(d, "triangle") for d in TRI_DOMAINS]
                         + [("unit_square", "rectangle")])
@pytest.mark.parametrize("level", [0, 2])
def test_geometry_invariants(domain, kind, level):
    m = build_mesh(domain, kind, level)
    assert np.all(m.areas > 0)
    # closed polygons: sum of length * outward normal vanishes
    ln = m.edge_lengths[m.cell2edge][..., None] * m.cell_normals
    assert np.abs(ln.sum(axis=1)).max() < 1e-14
    # adjacency symmetry
    for t in range(m.n_cells):
        for e in m.cell2edge[t]:
            assert t in m.edge2cell[e]
    for e, (a, b) in enumerate(m.edge2cell):
        assert e in m.cell2edge[a]
        if b >= 0:
            assert e in m.cell2edge[b]
    # boundary edges have one neighbour
    assert np.all((m.edge2cell[:, 1] < 0) == (m.edge_tags != INTERIOR))


@pytest.mark.parametrize("domain", TRI_DOMAINS)
def test_refinement_geometry(domain):
    m = build_mesh(domain, "triangle", 1)
    f = refine(m)
    assert abs(f.areas.sum() - m.areas.sum()) < 1e-14
    np.testing.assert_allclose(f.diameters.reshape(-1, 4), m.diameters[:, None] / 2 * np.ones(4),
                               rtol=1e-14)
    assert f.level == m.level + 1


def test_rect_refinement_geometry():
    m = build_coarse("unit_square", "rect")
    f = refine(m)
    assert abs(f.areas.sum() - 1) < 1e-14
    np.testing.assert_allclose(f.diameters.reshape(-1, 4), np.repeat(m.diameters[:, None] / 2, 4, 1))


@pytest.mark.parametrize("domain,area", [("unit_square", 1.0), ("l_shape", 0.75),
                                         ("cracked_square", 1.0)])
def test_domain_area(domain, area):
    assert abs(build_mesh(domain, "tri", 2).areas.sum() - area) < 1e-14


@pytest.mark.parametrize("domain", TRI_DOMAINS)
@pytest.mark.parametrize("level", [0, 1, 3])
def test_euler_relation(domain, level):
    m = build_mesh(domain, "tri", level)
    # identify the duplicated slit copies by position
    keys = {tuple(np.round(p, 12)) for p in m.points}
    edges = {frozenset(tuple(np.round(m.points[v], 12)) for v in e) for e in m.edges}
    assert len(keys) - len(edges) + m.n_cells == 1


def test_crack_separation():
    m = build_mesh("cracked_square", "tri", 3)
    up = np.flatnonzero(m.edge_tags == CRACK_UPPER)
    lo = np.flatnonzero(m.edge_tags == CRACK_LOWER)
    assert np.all(m.edge2cell[up, 1] < 0) and np.all(m.edge2cell[lo, 1] < 0)
    assert np.all(m.centroids[m.edge2cell[up, 0], 1] > 0.5)
    assert np.all(m.centroids[m.edge2cell[lo, 0], 1] < 0.5)
    np.testing.assert_allclose(m.edge_normals[up], [[0, -1]] * len(up), atol=1e-15)
    np.testing.assert_allclose(m.edge_normals[lo], [[0, 1]] * len(lo), atol=1e-15)
    shared = set(m.edges[up].ravel()) & set(m.edges[lo].ravel())
    assert len(shared) == 1
    assert np.allclose(m.points[shared.pop()], [0.5, 0.5])
    # no interior edge crosses the slit
    mid = m.edge_midpoints[m.edge_tags == INTERIOR]
    on_slit = (np.abs(mid[:, 1] - 0.5) < 1e-14) & (mid[:, 0] > 0.5)
    assert not on_slit.any()


def _sides(m, inflow):
    mid = m.edge_midpoints[inflow.edges]
    sides = set()
    for x, y in mid:
        sides.add("left" if x < 1e-14 else "right" if x > 1 - 1e-14 else
                  "bottom" if y < 1e-14 else "top" if y > 1 - 1e-14 else "inner")
    return sides


@pytest.mark.parametrize("beta,sides", [
    ("const 1 1", {"left", "bottom"}),
    ("swirl", {"bottom", "right"}),
    ("disc_antidiagonal", {"left", "right"}),
])
def test_classify_inflow(beta, sides):
    m = build_mesh("unit_square", "tri", 2)
    inflow = classify_inflow(m, parse_field(beta, vector=True))
    assert _sides(m, inflow) == sides
    assert np.all(inflow.beta_n < -1e-12)
    n_side = 4  # edges per side at level 2
    assert len(inflow) == 2 * n_side


def test_characteristic_edges_excluded():
    m = build_mesh("unit_square", "tri", 1)
    inflow = classify_inflow(m, parse_field("const 1 0", vector=True))
    assert _sides(m, inflow) == {"left"}


def test_inflow_on_crack_lips():
    m = build_mesh("cracked_square", "tri", 2)
    case = builtin_case("c2_tri_crack")
    inflow = classify_inflow(m, case.beta)
    tags = m.edge_tags[inflow.edges]
    # rotation field: on the upper lip beta.n = -(x-0.5) < 0, the lower lip is outflow
    assert np.sum(tags == CRACK_UPPER) == 4 and np.sum(tags == CRACK_LOWER) == 0


def test_mesh_stats():
    m0, m5 = build_mesh("unit_square", "tri", 0), build_mesh("unit_square", "tri", 5)
    assert mesh_stats(m0).inv_h_label == 1
    assert mesh_stats(m5).inv_h_label == 32
    assert mesh_stats(m0).max_diameter == pytest.approx(np.sqrt(2), rel=1e-15)
    assert mesh_stats(m5).n_elements == 2 * 4 ** 5


def test_element_view(square_tri):
    el = square_tri.element(0)
    assert el.area == pytest.approx(0.5)
    assert el.vertices.shape == (3, 2)
    assert el.diameter == pytest.approx(np.sqrt(2))


@pytest.mark.parametrize("domain,kind", [("cracked_square", "tri"), ("unit_square", "rect")])
def test_dump_roundtrip(domain, kind):
    m = build_mesh(domain, kind, 1)
    text = dump_mesh(m)
    assert text.startswith(f"# pdwg mesh {domain}")
    back = load_mesh(text)
    np.testing.assert_array_equal(back.points, m.points)
    np.testing.assert_array_equal(back.edges, m.edges)
    np.testing.assert_array_equal(back.edge_tags, m.edge_tags)
    assert back.level == 1
