"""Effect of the two stabilization weights on one fixed mesh.

The Lagrange multiplier u_h approximates the exact value zero, so its norm
is a built-in consistency check.  Switching tau1 or tau2 off changes the
discrete solution slightly but keeps the primal error at the same level.

    python3 demos/multiplier_and_stabilizers.py
"""
from pdwg import SchemeParams, build_mesh, builtin_case, error_norms, solve

case = builtin_case("c2_swirl_sq")
mesh = build_mesh(case.domain, case.element_kind, 4)
print(f"{case.id}: {mesh.n_cells} triangles, 1/h = 16")
print(f"{'tau1':>5} {'tau2':>5}  {'|eps_0|':>10}  {'|e_h|':>10}  {'|||eps|||_W':>11}")
for tau1, tau2 in ((1, 1), (0, 1), (1, 0), (0, 0)):
    r = error_norms(solve(mesh, case, SchemeParams(2, tau1, tau2)), case)
    print(f"{tau1:>5} {tau2:>5}  {r.err_e0:10.3E}  {r.err_eh:10.3E}  {r.triple_wh:11.3E}")
