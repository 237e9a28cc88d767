"""Benchmark problems for  beta . grad(lambda) - c lambda = f,  lambda = g on the inflow boundary.

Coefficient fields are small closed-form objects.  Piecewise fields pick
their branch from a *selector* point; assembly passes the element centroid
so that a whole element always sees one smooth branch.  When no selector is
given the evaluation point itself is used.

Fields can also be written as short strings (used by config files)::

    const 1 1          affine 0 1 1          rotation          cos_x_cos_y
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np


class CaseError(ValueError):
    pass


def _xy(pts):
    pts = np.asarray(pts, dtype=float)
    return pts[..., 0], pts[..., 1]


class ScalarField:
    """Closed-form scalar field with an optional analytic gradient."""

    vector = False

    def __init__(self, value: Callable, grad: Callable | None = None, label: str = ""):
        self._value = value
        self._grad = grad
        self.label = label

    def __call__(self, pts, sel=None):
        x, y = _xy(pts)
        return np.broadcast_to(np.asarray(self._value(x, y), dtype=float), x.shape)

    def grad(self, pts, sel=None):
        if self._grad is None:
            raise CaseError(f"field {self.label!r} has no analytic gradient")
        x, y = _xy(pts)
        gx, gy = self._grad(x, y)
        gx, gy, _ = np.broadcast_arrays(np.asarray(gx, float), np.asarray(gy, float), x)
        return np.stack([gx, gy], axis=-1)

    def __repr__(self):
        return f"ScalarField({self.label})"


class VectorField:
    vector = True

    def __init__(self, value: Callable, label: str = ""):
        self._value = value
        self.label = label

    def __call__(self, pts, sel=None):
        x, y = _xy(pts)
        vx, vy = self._value(x, y)
        vx, vy, _ = np.broadcast_arrays(np.asarray(vx, float), np.asarray(vy, float), x)
        return np.stack([vx, vy], axis=-1)

    def __repr__(self):
        return f"VectorField({self.label})"


class Piecewise:
    """``inside`` where ``predicate(selector)`` holds, ``outside`` elsewhere."""

    def __init__(self, predicate: Callable, inside, outside, label: str = ""):
        self.predicate = predicate
        self.inside = inside
        self.outside = outside
        self.vector = inside.vector
        self.label = label

    def _mask(self, pts, sel):
        sx, sy = _xy(pts if sel is None else sel)
        mask = np.asarray(self.predicate(sx, sy), dtype=bool)
        shape = np.asarray(pts).shape[:-1]
        mask = np.broadcast_to(mask, shape)
        return mask[..., None] if self.vector else mask

    def __call__(self, pts, sel=None):
        return np.where(self._mask(pts, sel), self.inside(pts, sel), self.outside(pts, sel))

    def grad(self, pts, sel=None):
        mask = self._mask(pts, sel)
        if not self.vector:
            mask = mask[..., None]
        return np.where(mask, self.inside.grad(pts, sel), self.outside.grad(pts, sel))

    def __repr__(self):
        return f"Piecewise({self.label})"


class Manufactured:
    """Forcing f = beta . grad(lambda) - c lambda for an exact solution lambda."""

    vector = False

    def __init__(self, beta, c, exact):
        self.beta, self.c, self.exact = beta, c, exact
        self.label = f"manufactured({exact.label})"

    def __call__(self, pts, sel=None):
        conv = np.sum(self.beta(pts, sel) * self.exact.grad(pts, sel), axis=-1)
        return conv - self.c(pts, sel) * self.exact(pts, sel)


def const(a: float) -> ScalarField:
    a = float(a)
    return ScalarField(lambda x, y: a, lambda x, y: (0.0, 0.0), f"const {a:g}")


def affine(a: float, b: float, c: float) -> ScalarField:
    a, b, c = map(float, (a, b, c))
    return ScalarField(lambda x, y: a + b * x + c * y, lambda x, y: (b, c),
                       f"affine {a:g} {b:g} {c:g}")


def quadratic(a, b, c, d, e, f) -> ScalarField:
    """a + b x + c y + d x^2 + e x y + f y^2"""
    a, b, c, d, e, f = map(float, (a, b, c, d, e, f))
    return ScalarField(
        lambda x, y: a + b * x + c * y + d * x * x + e * x * y + f * y * y,
        lambda x, y: (b + 2 * d * x + e * y, c + e * x + 2 * f * y),
        f"quadratic {a:g} {b:g} {c:g} {d:g} {e:g} {f:g}")


def const_vector(bx: float, by: float) -> VectorField:
    bx, by = float(bx), float(by)
    return VectorField(lambda x, y: (bx, by), f"const {bx:g} {by:g}")


def affine_vector(a0, a1, a2, b0, b1, b2) -> VectorField:
    a0, a1, a2, b0, b1, b2 = map(float, (a0, a1, a2, b0, b1, b2))
    return VectorField(lambda x, y: (a0 + a1 * x + a2 * y, b0 + b1 * x + b2 * y),
                       f"affine {a0:g} {a1:g} {a2:g} {b0:g} {b1:g} {b2:g}")


PI = np.pi

SCALARS: dict[str, Callable[..., ScalarField]] = {
    "const": const,
    "affine": affine,
    "quadratic": quadratic,
    "cos_x_cos_y": lambda: ScalarField(
        lambda x, y: np.cos(x) * np.cos(y),
        lambda x, y: (-np.sin(x) * np.cos(y), -np.cos(x) * np.sin(y)), "cos_x_cos_y"),
    "sin_x_cos_y": lambda: ScalarField(
        lambda x, y: np.sin(x) * np.cos(y),
        lambda x, y: (np.cos(x) * np.cos(y), -np.sin(x) * np.sin(y)), "sin_x_cos_y"),
    "exp_x_cos_y": lambda: ScalarField(
        lambda x, y: np.exp(x) * np.cos(y),
        lambda x, y: (np.exp(x) * np.cos(y), -np.exp(x) * np.sin(y)), "exp_x_cos_y"),
    "sin_pix_cos_piy": lambda: ScalarField(
        lambda x, y: np.sin(PI * x) * np.cos(PI * y),
        lambda x, y: (PI * np.cos(PI * x) * np.cos(PI * y),
                      -PI * np.sin(PI * x) * np.sin(PI * y)), "sin_pix_cos_piy"),
    "cos_5y": lambda: ScalarField(
        lambda x, y: np.cos(5 * y), lambda x, y: (0.0, -5 * np.sin(5 * y)), "cos_5y"),
    "sin_3x_cos_5y": lambda: ScalarField(
        lambda x, y: np.sin(3 * x) * np.cos(5 * y),
        lambda x, y: (3 * np.cos(3 * x) * np.cos(5 * y), -5 * np.sin(3 * x) * np.sin(5 * y)),
        "sin_3x_cos_5y"),
    "sin_x": lambda: ScalarField(
        lambda x, y: np.sin(x), lambda x, y: (np.cos(x), 0.0), "sin_x"),
    "sign_left_right": lambda: Piecewise(
        lambda x, y: x < 0.5, const(1.0), const(-1.0), "sign_left_right"),
}

VECTORS: dict[str, Callable[..., VectorField | Piecewise]] = {
    "const": const_vector,
    "affine": affine_vector,
    "rotation": lambda: VectorField(lambda x, y: (0.5 - y, x - 0.5), "rotation"),
    "swirl": lambda: VectorField(lambda x, y: (-y, x), "swirl"),
    "disc_antidiagonal": lambda: Piecewise(
        lambda x, y: y < 1 - x, const_vector(1, -1), const_vector(-2, 2), "disc_antidiagonal"),
    "disc_swirl": lambda: Piecewise(
        lambda x, y: y < 1 - x,
        VectorField(lambda x, y: (-y, x), "swirl"),
        VectorField(lambda x, y: (1 - y, x - 1), "swirl shifted"), "disc_swirl"),
    "disc_lshape": lambda: Piecewise(
        lambda x, y: y < 0.5 - x, const_vector(-1, 1), const_vector(1, -1), "disc_lshape"),
}


def parse_field(text: str, vector: bool = False):
    """Build a field from a catalog string such as ``"const 1 -1"``."""
    parts = text.split()
    if not parts:
        raise CaseError("empty field expression")
    name, args = parts[0], parts[1:]
    catalog = VECTORS if vector else SCALARS
    if name not in catalog:
        kind = "vector" if vector else "scalar"
        raise CaseError(f"unknown {kind} field {name!r}; known: {', '.join(sorted(catalog))}")
    try:
        values = [float(a) for a in args]
        return catalog[name](*values)
    except (TypeError, ValueError) as exc:
        raise CaseError(f"bad arguments for field {name!r}: {exc}") from None


@dataclass(frozen=True)
class TestCase:
    id: str
    domain: str
    element_kind: str
    beta: object
    c: object
    f: object = None
    g: object = None
    exact: object = None
    description: str = ""
    extra: dict = field(default_factory=dict)

    __test__ = False  # not a pytest class

    def __post_init__(self):
        if self.f is None:
            if self.exact is None:
                raise CaseError(f"case {self.id!r} needs either an exact solution or a load f")
            object.__setattr__(self, "f", Manufactured(self.beta, self.c, self.exact))
        if self.g is None:
            if self.exact is None:
                raise CaseError(f"case {self.id!r} needs either an exact solution or inflow data g")
            object.__setattr__(self, "g", self.exact)

    @property
    def has_exact(self) -> bool:
        return self.exact is not None

    def with_kind(self, element_kind: str) -> "TestCase":
        return replace(self, element_kind=element_kind)


def eval_forcing(case: TestCase, points, selector=None) -> np.ndarray:
    return case.f(points, selector)


def _case(id, domain, kind, beta, c, description, exact=None, f=None, g=None, **extra):
    return TestCase(id=id, domain=domain, element_kind=kind,
                    beta=parse_field(beta, vector=True), c=parse_field(c),
                    exact=parse_field(exact) if exact else None,
                    f=parse_field(f) if f else None, g=parse_field(g) if g else None,
                    description=description, extra=extra)


def _builtin_specs(load: float):
    fl = f"const {load:g}"
    return {
        "c1_tri_sq": lambda: _case(
            "c1_tri_sq", "unit_square", "triangle", "const 1 1", "const 1",
            "beta=[1,1], c=1, lambda=cos(x)cos(y), unit square, triangles", exact="cos_x_cos_y"),
        "c1_rect_sq": lambda: _case(
            "c1_rect_sq", "unit_square", "rectangle", "const 1 1", "const 1",
            "beta=[1,1], c=1, lambda=cos(x)cos(y), unit square, 3x2 rectangles", exact="cos_x_cos_y"),
        "c1_tri_l": lambda: _case(
            "c1_tri_l", "l_shape", "triangle", "const 1 1", "const 1",
            "beta=[1,1], c=1, lambda=cos(x)cos(y), L-shape, triangles", exact="cos_x_cos_y"),
        "c2_tri_l": lambda: _case(
            "c2_tri_l", "l_shape", "triangle", "rotation", "const 0",
            "beta=[0.5-y,x-0.5], c=0, lambda=exp(x)cos(y), L-shape", exact="exp_x_cos_y"),
        "c2_tri_crack": lambda: _case(
            "c2_tri_crack", "cracked_square", "triangle", "rotation", "const 0",
            "beta=[0.5-y,x-0.5], c=0, lambda=exp(x)cos(y), cracked square", exact="exp_x_cos_y"),
        "c2_swirl_sq": lambda: _case(
            "c2_swirl_sq", "unit_square", "triangle", "swirl", "affine 0 1 1",
            "beta=[-y,x], c=x+y, lambda=sin(pi x)cos(pi y), unit square", exact="sin_pix_cos_piy"),
        "c3_disc": lambda: _case(
            "c3_disc", "unit_square", "triangle", "disc_antidiagonal", "const 1",
            "beta=[1,-1] for y<1-x else [-2,2], c=1, lambda=sin(x)cos(y)", exact="sin_x_cos_y"),
        "fig_disc": lambda: _case(
            "fig_disc", "unit_square", "triangle", "disc_antidiagonal", "const 0",
            "beta=[1,-1] for y<1-x else [-2,2], c=0, f=0, g=1 on x=0 and -1 on x=1",
            f="const 0", g="sign_left_right"),
        "fig_rotation": lambda: _case(
            "fig_rotation", "unit_square", "triangle", "rotation", "const 1",
            f"beta=[0.5-y,x-0.5], c=1, g=cos(5y), f={load:g}", f=fl, g="cos_5y"),
        "fig_swirl": lambda: _case(
            "fig_swirl", "unit_square", "triangle", "disc_swirl", "const 0",
            f"beta=[-y,x] for y<1-x else [1-y,x-1], c=0, g=sin(3x)cos(5y), f={load:g}",
            f=fl, g="sin_3x_cos_5y"),
        "fig_lshape": lambda: _case(
            "fig_lshape", "l_shape", "triangle", "disc_lshape", "const 1",
            f"beta=[-1,1] for y<0.5-x else [1,-1], c=1, g=sin(pi x)cos(pi y), f={load:g}",
            f=fl, g="sin_pix_cos_piy"),
        # two conflicting inflow data are on record, g=sin(x) and g=cos(5y); sin(x) is used
        "fig_crack": lambda: _case(
            "fig_crack", "cracked_square", "triangle", "rotation", "affine 0 1 -1",
            f"beta=[0.5-y,x-0.5], c=x-y, g=sin(x), f={load:g}, cracked square",
            f=fl, g="sin_x"),
    }


CASE_IDS = tuple(_builtin_specs(1.0))


def builtin_case(case_id: str, load: float = 1.0) -> TestCase:
    """Look up a benchmark case.  ``load`` sets f for the figure cases."""
    specs = _builtin_specs(load)
    if case_id not in specs:
        raise CaseError(f"unknown case {case_id!r}; known cases: {', '.join(specs)}")
    return specs[case_id]()


def list_cases() -> list[tuple[str, str]]:
    specs = _builtin_specs(1.0)
    return [(cid, specs[cid]().description) for cid in specs]
