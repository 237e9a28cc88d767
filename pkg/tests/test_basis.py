import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from math import factorial

from pdwg.basis import (MAX_QUAD_DEGREE, ElementBasis, EdgeBasis, MeshBasis, QuadratureError,
                        dim_p, edge_quadrature, element_quadrature, eval_edge_basis,
                        eval_element_basis, gauss_line, reference_square_rule,
                        reference_triangle_rule)
from pdwg.mesh import build_mesh

UNIT_TRI = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
UNIT_SQ = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])


def tri_monomial(a, b):
    # integral of x^a y^b over the unit right triangle
    return factorial(a) * factorial(b) / factorial(a + b + 2)


def test_triangle_examples():
    assert element_quadrature(UNIT_TRI, 0).integrate(lambda p: np.ones(len(p))) == pytest.approx(0.5, rel=1e-15)
    assert element_quadrature(UNIT_TRI, 2).integrate(lambda p: p[:, 0] ** 2) == pytest.approx(1 / 12, rel=1e-14)


def test_square_example():
    rule = element_quadrature(UNIT_SQ, 6)
    assert rule.integrate(lambda p: p[:, 0] ** 3 * p[:, 1] ** 3) == pytest.approx(1 / 16, rel=1e-14)


def test_edge_examples():
    seg = np.array([[0.0, 0.0], [3.0, 4.0]])
    assert edge_quadrature(seg, 0).integrate(lambda p: np.ones(len(p))) == pytest.approx(5.0)
    unit = np.array([[0.0, 0.0], [1.0, 0.0]])
    assert edge_quadrature(unit, 2).integrate(lambda p: p[:, 0] ** 2) == pytest.approx(1 / 3, rel=1e-14)
    rule = edge_quadrature(unit, 5)
    assert len(rule.weights) == 3
    assert rule.integrate(lambda p: p[:, 0] ** 5) == pytest.approx(1 / 6, rel=1e-14)


@pytest.mark.parametrize("degree", range(0, MAX_QUAD_DEGREE + 1))
def test_triangle_rule_exact_all_monomials(degree):
    bary, w = reference_triangle_rule(degree)
    assert np.all(w > 0)
    assert w.sum() == pytest.approx(1.0, rel=1e-14)
    x, y = bary[:, 1], bary[:, 2]
    for a in range(degree + 1):
        for b in range(degree + 1 - a):
            got = 0.5 * np.dot(w, x ** a * y ** b)
            exact = tri_monomial(a, b)
            assert abs(got - exact) <= 1e-13 * exact, (a, b)


def test_triangle_rule_symmetric():
    bary, w = reference_triangle_rule(7)
    for perm in ([1, 0, 2], [2, 1, 0], [0, 2, 1]):
        a = np.lexsort(np.round(bary, 13).T)
        b = np.lexsort(np.round(bary[:, perm], 13).T)
        np.testing.assert_allclose(bary[a], bary[:, perm][b], atol=1e-13)
        np.testing.assert_allclose(w[a], w[b], atol=1e-15)


@pytest.mark.parametrize("degree", range(0, MAX_QUAD_DEGREE + 1, 3))
def test_square_and_line_rules_exact(degree):
    s, w = gauss_line(degree)
    assert len(s) == max(1, -(-(degree + 1) // 2))
    for j in range(degree + 1):
        exact = 2 / (j + 1) if j % 2 == 0 else 0.0
        assert abs(np.dot(w, s ** j) - exact) <= 1e-13 * max(exact, 1.0)
    pts, ws = reference_square_rule(degree)
    for a in range(degree + 1):
        for b in range(degree + 1 - a):
            exact = 1 / ((a + 1) * (b + 1))
            assert abs(np.dot(ws, pts[:, 0] ** a * pts[:, 1] ** b) - exact) <= 1e-13 * exact


def test_degree_limits():
    with pytest.raises(QuadratureError):
        reference_triangle_rule(MAX_QUAD_DEGREE + 1)
    with pytest.raises(QuadratureError):
        gauss_line(-1)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=6, max_size=6), st.integers(0, 8))
def test_affine_triangle_rule(coords, degree):
    v = np.array(coords).reshape(3, 2)
    area = 0.5 * abs((v[1, 0] - v[0, 0]) * (v[2, 1] - v[0, 1]) - (v[1, 1] - v[0, 1]) * (v[2, 0] - v[0, 0]))
    if area < 1e-2:
        return
    rule = element_quadrature(v, degree)
    assert rule.weights.sum() == pytest.approx(area, rel=1e-13)
    # polynomial of the requested degree: (x + 2 y) ** degree via the exact simplex formula
    # compare with a much finer rule
    fine = element_quadrature(v, min(degree + 10, MAX_QUAD_DEGREE))
    f = lambda p: (0.3 + p[:, 0] + 2 * p[:, 1]) ** degree
    assert rule.integrate(f) == pytest.approx(fine.integrate(f), rel=1e-12, abs=1e-12)


def test_element_basis_examples():
    b = ElementBasis(2, np.array([0.2, 0.3]), 0.5)
    assert b.dim == 6
    vals, grads = eval_element_basis(b, np.array([[0.2, 0.3], [0.7, 0.1]]))
    assert vals.shape == (6, 2) and grads.shape == (6, 2, 2)
    np.testing.assert_allclose(vals[:, 0], [1, 0, 0, 0, 0, 0])
    np.testing.assert_allclose(grads[1], [[1 / 0.5, 0], [1 / 0.5, 0]])
    assert dim_p(1) == 3 and dim_p(0) == 1


def test_edge_basis_examples():
    b = EdgeBasis(1)
    assert b.dim == 2
    vals = eval_edge_basis(b, np.array([-1.0, 0.0, 0.5]))
    np.testing.assert_allclose(vals[0], 1.0)
    assert vals[1, 1] == 0.0


@pytest.mark.parametrize("domain,kind", [("unit_square", "tri"), ("unit_square", "rect"),
                                         ("cracked_square", "tri")])
@pytest.mark.parametrize("k", [1, 2])
def test_mass_conditioning_h_independent(domain, kind, k):
    conds = []
    for level in (0, 5):
        mb = MeshBasis(build_mesh(domain, kind, level), k)
        c = np.linalg.cond(mb.mass)
        conds.append(c.max())
        assert np.all(np.linalg.eigvalsh(mb.mass) > 0)
    assert conds[1] / conds[0] < 2 and conds[0] / conds[1] < 2


def test_mesh_basis_tables():
    mb = MeshBasis(build_mesh("unit_square", "tri", 1), 2)
    assert (mb.nb, mb.m, mb.ne, mb.nloc) == (6, 3, 3, 15)
    np.testing.assert_allclose(mb.qw.sum(axis=1), 1 / 8)
    np.testing.assert_allclose(mb.eqw.sum(axis=1), mb.mesh.edge_lengths)
    # element basis on local edges equals evaluation at the physical edge points
    t, l = 3, 1
    e = mb.mesh.cell2edge[t, l]
    from pdwg.basis import scaled_monomials
    ref, _ = scaled_monomials(mb.eqp[e], mb.centers[t], mb.h[t], 2)
    np.testing.assert_allclose(mb.phi_edge[t, l], ref)
