"""Command-line driver: single solves, convergence tables and plot data.

Config files use a flat ``key = value`` grammar, ``#`` comments and at most
one ``[case]`` section describing an inline problem::

    k = 2
    tau1 = 0
    levels = 0..4
    out = table.csv

    [case]
    domain = unit_square
    element = tri
    beta = const 1 1
    c = const 1
    exact = cos_x_cos_y

Command-line flags override config keys.
"""
from __future__ import annotations

import argparse
import sys
import warnings
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .analysis import AnalysisError, RateTable, convergence_rates, error_norms
from .assembly import SchemeParams
from .basis import scaled_monomials
from .cases import CaseError, TestCase, builtin_case, list_cases, parse_field
from .linsolve import SolverError, solve
from .mesh import DIAGONALS, DOMAINS, MeshError, normalize_kind, build_coarse, refine


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    case: str | None = None
    inline_case: dict = field(default_factory=dict)
    k: int = 1
    tau1: float = 1.0
    tau2: float = 1.0
    levels: tuple[int, ...] = (0, 1, 2, 3, 4, 5)
    element: str | None = None
    diagonal: str = "anti"
    out: str | None = None
    plot_out: str | None = None
    density: int = 3
    level: int | None = None
    load: float = 1.0

    def params(self) -> SchemeParams:
        return SchemeParams(self.k, self.tau1, self.tau2)


TOP_KEYS = ("case", "k", "tau1", "tau2", "levels", "element", "diagonal", "out",
            "plot_out", "density", "level", "load")
CASE_KEYS = ("id", "domain", "element", "beta", "c", "exact", "f", "g", "description")


def parse_levels(text: str) -> tuple[int, ...]:
    """``"3"`` -> 0..3, ``"1..4"`` -> 1..4, ``"0,2,3"`` -> as listed."""
    text = text.strip()
    try:
        if ".." in text:
            lo, hi = (int(p) for p in text.split(".."))
            levels = tuple(range(lo, hi + 1))
        elif "," in text:
            levels = tuple(int(p) for p in text.split(",") if p.strip())
        else:
            levels = tuple(range(int(text) + 1))
    except ValueError:
        raise ConfigError(f"bad levels {text!r}") from None
    if not levels or min(levels) < 0:
        raise ConfigError(f"levels must be a nonempty list of non-negative integers, got {text!r}")
    if list(levels) != sorted(set(levels)):
        raise ConfigError(f"levels must be strictly increasing, got {text!r}")
    return levels


def _convert(key: str, value: str):
    try:
        if key in ("k", "density", "level"):
            return int(value)
        if key in ("tau1", "tau2", "load"):
            return float(value)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {value!r}") from None
    if key == "levels":
        return parse_levels(value)
    if key == "element":
        try:
            return normalize_kind(value)
        except MeshError as exc:
            raise ConfigError(str(exc)) from None
    return value


def validate(cfg: RunConfig) -> RunConfig:
    if cfg.k not in (1, 2):
        raise ConfigError(f"k must be 1 or 2, got {cfg.k}")
    if cfg.tau1 < 0:
        raise ConfigError(f"tau1 must be non-negative, got {cfg.tau1}")
    if cfg.tau2 < 0:
        warnings.warn(f"tau2 = {cfg.tau2} < 0 is outside the range covered by the theory",
                      stacklevel=2)
    if cfg.density < 1:
        raise ConfigError(f"density must be >= 1, got {cfg.density}")
    if cfg.diagonal not in DIAGONALS:
        raise ConfigError(f"diagonal must be one of {DIAGONALS}, got {cfg.diagonal!r}")
    if not cfg.levels:
        raise ConfigError("levels must be nonempty")
    if cfg.level is not None and cfg.level < 0:
        raise ConfigError(f"level must be >= 0, got {cfg.level}")
    return cfg


def parse_config(text: str) -> RunConfig:
    """Parse the key=value config grammar into a :class:`RunConfig`."""
    values: dict = {}
    inline: dict = {}
    section = None
    seen_case = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if line != "[case]":
                raise ConfigError(f"line {lineno}: unknown section {line!r}")
            if seen_case:
                raise ConfigError(f"line {lineno}: duplicate [case] section")
            section, seen_case = "case", True
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (p.strip() for p in line.split("=", 1))
        key = key.replace("-", "_")
        allowed = CASE_KEYS if section == "case" else TOP_KEYS
        if key not in allowed:
            where = "[case] section" if section == "case" else "config"
            raise ConfigError(f"line {lineno}: unknown key {key!r} in {where}")
        target = inline if section == "case" else values
        if key in target:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        if not value:
            raise ConfigError(f"line {lineno}: empty value for {key!r}")
        try:
            target[key] = value if section == "case" else _convert(key, value)
        except ConfigError as exc:
            raise ConfigError(f"line {lineno}: {exc}") from None
    return validate(RunConfig(inline_case=inline, **values))


def inline_case(spec: dict) -> TestCase:
    """Build a case from a ``[case]`` section."""
    for key in ("beta", "c"):
        if key not in spec:
            raise ConfigError(f"[case] section needs {key!r}")
    domain = spec.get("domain", "unit_square")
    if domain not in DOMAINS:
        raise ConfigError(f"[case] unknown domain {domain!r}")
    try:
        kind = normalize_kind(spec.get("element", "triangle"))
        opt = {k: parse_field(spec[k]) for k in ("exact", "f", "g") if k in spec}
        return TestCase(id=spec.get("id", "inline"), domain=domain, element_kind=kind,
                        beta=parse_field(spec["beta"], vector=True), c=parse_field(spec["c"]),
                        description=spec.get("description", "inline case"), **opt)
    except (CaseError, MeshError) as exc:
        raise ConfigError(f"[case] {exc}") from None


def resolve_case(cfg: RunConfig) -> TestCase:
    if cfg.inline_case and cfg.case:
        raise ConfigError("give either a case id or a [case] section, not both")
    if cfg.inline_case:
        case = inline_case(cfg.inline_case)
    elif cfg.case:
        case = builtin_case(cfg.case, cfg.load)
    else:
        raise ConfigError("no case given (use --case or a [case] section)")
    if cfg.element is not None:
        case = case.with_kind(cfg.element)
    return case


def iter_meshes(case: TestCase, levels, diagonal: str = "anti"):
    """Meshes at the requested levels, each derived by refining the previous."""
    mesh = build_coarse(case.domain, case.element_kind, diagonal)
    for level in range(max(levels) + 1):
        if level in levels:
            yield level, mesh
        if level < max(levels):
            mesh = refine(mesh)


def run_convergence(cfg: RunConfig) -> RateTable:
    """Solve on every level, tabulate errors and rates, optionally write CSV."""
    case = resolve_case(cfg)
    if not case.has_exact:
        raise ConfigError(f"case {case.id!r} has no exact solution; convergence needs one")
    reports = []
    for level, mesh in iter_meshes(case, cfg.levels, cfg.diagonal):
        try:
            sol = solve(mesh, case, cfg.params())
        except SolverError as exc:
            raise SolverError(f"level {level}: {exc}") from exc
        reports.append(error_norms(sol, case))
    table = convergence_rates(reports, [2 ** lv for lv in cfg.levels])
    if cfg.out:
        Path(cfg.out).write_text(table.to_csv())
    return table


def sample_points(vertices: np.ndarray, density: int) -> np.ndarray:
    """Interior sample points of each cell, (NT, ns, 2).

    Triangles use the centroids of the upward sub-triangles of a uniform
    split into ``density**2`` pieces; rectangles use a tensor grid of
    sub-cell centres.  ``density=1`` gives the centroid.
    """
    n = density
    if vertices.shape[1] == 3:
        ij = np.array([(i, j) for j in range(n) for i in range(n - j)], dtype=float)
        a = (ij[:, 0] + 1 / 3) / n
        b = (ij[:, 1] + 1 / 3) / n
        bary = np.column_stack([1 - a - b, a, b])
        return np.einsum("sa,tad->tsd", bary, vertices)
    s = (np.arange(n) + 0.5) / n
    X, Y = np.meshgrid(s, s, indexing="xy")
    lo = vertices.min(axis=1)
    ext = vertices.max(axis=1) - lo
    ref = np.column_stack([X.ravel(), Y.ravel()])
    return lo[:, None, :] + ref[None] * ext[:, None, :]


def plot_rows(sol, density: int) -> np.ndarray:
    """Rows ``x, y, lambda0`` sampled element by element."""
    mesh = sol.mesh
    pts = sample_points(mesh.cell_vertices, density)
    phi, _ = scaled_monomials(pts, mesh.centroids[:, None, :], mesh.diameters[:, None],
                              sol.system.params.k)
    vals = np.einsum("tsi,ti->ts", phi, sol.lambda0)
    return np.column_stack([pts.reshape(-1, 2), vals.ravel()])


def format_plot_csv(rows: np.ndarray) -> str:
    lines = ["x,y,lambda0"] + [f"{x:.10e},{y:.10e},{v:.10e}" for x, y, v in rows]
    return "\n".join(lines) + "\n"


def solve_level(cfg: RunConfig):
    case = resolve_case(cfg)
    level = cfg.level if cfg.level is not None else max(cfg.levels)
    mesh = None
    for _, mesh in iter_meshes(case, (level,), cfg.diagonal):
        pass
    return case, solve(mesh, case, cfg.params())


def export_plot(cfg: RunConfig) -> str:
    """Solve once and return (and optionally write) the point-cloud CSV."""
    _, sol = solve_level(cfg)
    text = format_plot_csv(plot_rows(sol, cfg.density))
    if cfg.plot_out:
        Path(cfg.plot_out).write_text(text)
    return text


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value config file")
    common.add_argument("--case", help="builtin case id (see list-cases)")
    common.add_argument("--k", type=int, help="polynomial degree (1 or 2)")
    common.add_argument("--tau1", type=float)
    common.add_argument("--tau2", type=float)
    common.add_argument("--levels", help="max level, a..b range or comma list")
    common.add_argument("--level", type=int, help="single level for solve/plot-export")
    common.add_argument("--element", choices=["tri", "rect", "triangle", "rectangle"])
    common.add_argument("--diagonal", choices=list(DIAGONALS),
                        help="coarse square split for triangulations")
    common.add_argument("--out", help="CSV path for the convergence table")
    common.add_argument("--plot-out", help="CSV path for plot data")
    common.add_argument("--density", type=int, help="plot samples per direction")
    common.add_argument("--load", type=float, help="constant load f of the figure cases")

    parser = argparse.ArgumentParser(prog="pdwg", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("list-cases", help="show builtin cases")
    sub.add_parser("solve", parents=[common], help="solve on one level")
    sub.add_parser("convergence", parents=[common], help="convergence table")
    sub.add_parser("plot-export", parents=[common], help="x,y,lambda0 samples")
    return parser


def config_from_args(args) -> RunConfig:
    cfg = RunConfig()
    if args.config:
        try:
            text = Path(args.config).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        cfg = parse_config(text)
    overrides = {}
    for key in ("case", "k", "tau1", "tau2", "level", "out", "plot_out", "density",
                "load", "diagonal"):
        val = getattr(args, key)
        if val is not None:
            overrides[key] = val
    if args.levels is not None:
        overrides["levels"] = parse_levels(args.levels)
    if args.element is not None:
        overrides["element"] = normalize_kind(args.element)
    if "case" in overrides:
        overrides["inline_case"] = {}
    return validate(replace(cfg, **overrides))


def _print_table(table: RateTable, out) -> None:
    print(f"{'1/h':>5} {'|eps_0|':>11} {'order':>7} {'|eps_b|':>11} {'order':>7}"
          f" {'|e_h|':>11} {'order':>7}", file=out)
    for n, cols in table.rows():
        cells = [f"{n:>5}"]
        for err, rate in cols:
            cells.append(f"{err:11.4E}")
            cells.append(f"{'':>7}" if rate is None else f"{rate:7.4f}")
        print(" ".join(cells), file=out)


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    out = sys.stdout
    try:
        if args.command == "list-cases":
            for cid, desc in list_cases():
                print(f"{cid:14s} {desc}", file=out)
            return 0
        cfg = config_from_args(args)
        if args.command == "convergence":
            table = run_convergence(cfg)
            _print_table(table, out)
        elif args.command == "solve":
            case, sol = solve_level(cfg)
            mesh = sol.mesh
            print(f"case {case.id}: level {mesh.level}, {mesh.n_cells} cells, "
                  f"{sol.system.n_free} unknowns, residual {sol.residual_norm:.2e}", file=out)
            if case.has_exact:
                r = error_norms(sol, case)
                print(f"|eps_0| = {r.err_e0:.4E}  |eps_b| = {r.err_eb:.4E}  "
                      f"|e_h| = {r.err_eh:.4E}", file=out)
        else:
            text = export_plot(cfg)
            if not cfg.plot_out:
                out.write(text)
            else:
                print(f"wrote {text.count(chr(10)) - 1} samples to {cfg.plot_out}", file=out)
    except (ConfigError, CaseError, MeshError, SolverError, AnalysisError) as exc:
        print(f"pdwg: error: {exc}", file=sys.stderr)
        return 2 if isinstance(exc, (ConfigError, CaseError, MeshError)) else 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
