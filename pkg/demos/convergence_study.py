"""Convergence study for the smooth benchmark on the unit square.

Runs k = 1 and k = 2 on six nested triangulations and prints the error
table with observed orders.  Expect about 2 for k = 1 and 3 for k = 2.

    python3 demos/convergence_study.py
"""
from pdwg import SchemeParams, build_mesh, builtin_case, convergence_rates, error_norms, refine, solve

case = builtin_case("c1_tri_sq")
print(case.description)

for k in (1, 2):
    params = SchemeParams(k=k, tau1=1.0, tau2=1.0)
    mesh = build_mesh(case.domain, case.element_kind, 0)
    reports = []
    for level in range(6):
        reports.append(error_norms(solve(mesh, case, params), case))
        mesh = refine(mesh)
    table = convergence_rates(reports)
    print(f"\nk = {k}")
    print(f"{'1/h':>4}  {'|eps_0|':>10}  order  {'|eps_b|':>10}  order")
    for n, cols in table.rows():
        (e0, r0), (eb, rb), _ = cols
        fmt = lambda r: "     " if r is None else f"{r:5.2f}"
        print(f"{n:>4}  {e0:10.4E}  {fmt(r0)}  {eb:10.4E}  {fmt(rb)}")
