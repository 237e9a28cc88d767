"""Discrete error norms and observed convergence rates.

With the exact multiplier u = 0 and the exact solution lambda, the errors
are measured against the projections Q_h lambda = {Q_0 lambda, Q_b lambda}::

    ||eps_0||^2 = sum_T ||lambda_0 - Q_0 lambda||_T^2
    ||eps_b||^2 = sum_T h_T ||lambda_b - Q_b lambda||_dT^2
    ||e_h||     = ||u_h||

Interior edges enter ``eps_b`` once from each neighbouring element.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .assembly import stabilizer_factors
from .weakcalc import local_weak_function, project_cells, project_edges


class AnalysisError(ValueError):
    pass


@dataclass(frozen=True)
class ErrorReport:
    err_e0: float
    err_eb: float
    err_eh: float
    triple_wh: float = float("nan")
    triple_mh: float = float("nan")
    inv_h: int | None = None
    level: int | None = None


def projection_errors(solution, exact):
    """Coefficient arrays of lambda_0 - Q_0 lambda and lambda_b - Q_b lambda."""
    mb = solution.system.basis
    e0 = solution.lambda0 - project_cells(mb, exact)
    eb = solution.lambdab - project_edges(mb, exact)
    return e0, eb


def error_norms(solution, case) -> ErrorReport:
    """Error norms of a solution against ``case.exact``."""
    if not getattr(case, "has_exact", case.exact is not None):
        raise AnalysisError(f"case {case.id!r} has no exact solution")
    system = solution.system
    mb, blocks = system.basis, system.blocks
    mesh = mb.mesh
    e0, eb = projection_errors(solution, case.exact)

    m0 = np.einsum("ti,tij,tj->", e0, mb.mass, e0)
    per_edge = np.einsum("ea,eab,eb->e", eb, mb.edge_mass, eb)
    mb_sq = np.sum(mb.h[:, None] * per_edge[mesh.cell2edge])
    u = solution.u
    mu = np.einsum("ti,tij,tj->", u, mb.mass_lower, u)

    # sum of squares rather than eps^T S eps, which cancels near zero
    eps = local_weak_function(mb, e0, eb)
    J, ew, L, w = stabilizer_factors(mb, case)
    jump = np.einsum("tlqi,ti->tlq", J, eps)
    resid = np.einsum("tqi,ti->tq", L, e0)
    wh = np.sum(ew * jump ** 2) + system.params.tau1 * np.sum(w * resid ** 2)
    mh = np.einsum("ti,tij,tj->", u, blocks.D, u)
    root = lambda v: float(np.sqrt(max(v, 0.0)))
    return ErrorReport(root(m0), root(mb_sq), root(mu), root(wh), root(mh),
                       inv_h=2 ** mesh.level, level=mesh.level)


def observed_rate(err_coarse: float, err_fine: float, h_ratio: float = 2.0) -> float:
    """log(err_coarse / err_fine) / log(h_coarse / h_fine); log2 of the ratio by default."""
    if not (err_coarse > 0 and err_fine > 0):
        raise AnalysisError(f"rates need positive errors, got {err_coarse!r}, {err_fine!r}")
    if h_ratio == 2.0:
        return float(np.log2(err_coarse / err_fine))
    return float(np.log(err_coarse / err_fine) / np.log(h_ratio))


@dataclass
class RateTable:
    inv_h: list[int]
    errors: dict[str, list[float]]
    rates: dict[str, list[float | None]] = field(default_factory=dict)

    NAMES = ("err_e0", "err_eb", "err_eh")

    def rows(self):
        for i, n in enumerate(self.inv_h):
            yield n, [(self.errors[k][i], self.rates[k][i]) for k in self.NAMES]

    def final_rate(self, name: str) -> float:
        return self.rates[name][-1]

    def to_csv(self) -> str:
        head = "inv_h,err_e0,rate_e0,err_eb,rate_eb,err_eh,rate_eh"
        lines = [head]
        for n, cols in self.rows():
            cells = [str(n)]
            for err, rate in cols:
                cells.append(f"{err:.4E}")
                cells.append("" if rate is None else f"{rate:.4f}")
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"


def convergence_rates(reports, inv_h=None) -> RateTable:
    """Rates between consecutive rows.

    ``inv_h`` defaults to the levels stored in the reports (or 1, 2, 4, ...)
    and sets the h ratio between rows.  The first row has no rate.  Raises :class:`AnalysisError` on a
    non-positive error.
    """
    reports = list(reports)
    if not reports:
        raise AnalysisError("no error reports given")
    if inv_h is None:
        inv_h = [r.inv_h if r.inv_h is not None else 2 ** i for i, r in enumerate(reports)]
    inv_h = list(inv_h)
    if len(inv_h) != len(reports):
        raise AnalysisError("inv_h and reports differ in length")
    errors = {k: [float(getattr(r, k)) for r in reports] for k in RateTable.NAMES}
    rates: dict[str, list[float | None]] = {}
    for k, vals in errors.items():
        for v in vals:
            if not v > 0:
                raise AnalysisError(f"{k} = {v!r} is not positive; rate undefined")
        ratios = [n1 / n0 for n0, n1 in zip(inv_h, inv_h[1:])]
        rates[k] = [None] + [observed_rate(a, b, q) for a, b, q in zip(vals, vals[1:], ratios)]
    return RateTable(list(inv_h), errors, rates)
