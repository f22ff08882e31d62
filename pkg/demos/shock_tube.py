"""Shock tube: lattice Boltzmann, Godunov and the exact solution side by side.

Density 2 | 0.5 at rest, 80 cells, lambda 8, a 0.15, s 1.8, t = 0.25.
Run with ``python demos/shock_tube.py``.
"""
from swlbm.harness import run_case
from swlbm.harness.cases import builtin_config
from swlbm.reference import exact_riemann

sol = exact_riemann((2.0, 0.0), (0.5, 0.0))
print(f"exact: {sol.left_wave} | {sol.right_wave}, rho* = {sol.rho_star:.6f}, u* = {sol.u_star:.6f}")
print(f"       fan {sol.left_speeds[0]:+.4f} .. {sol.left_speeds[1]:+.4f}, shock {sol.right_speeds[0]:+.4f}")

reports = {s: run_case(builtin_config("riemann1d", solver=s), out_dir="demo_output") for s in ("lbm", "godunov")}
for solver, rep in reports.items():
    m = rep.metrics
    print(f"\n{solver}: {rep.steps} steps, L1(rho) = {m['l1_rho']:.4f}")
    print(f"  shock error {m['shock_error_dx']:+.2f} dx, plateau deviation {100 * m['plateau_max_rel_dev']:.2f}%")
    print(f"  rarefaction head {m['rarefaction_head_error_dx']:+.2f} dx, tail {m['rarefaction_tail_error_dx']:+.2f} dx")

# coarse profile, every eighth cell
x = reports["lbm"].fields["x"]
ex = sol.sample((x - 0.5) / 0.25)[0]
print("\n     x    exact      lbm   godunov")
for i in range(0, x.size, 8):
    print(f"{x[i]:6.3f} {ex[i]:8.4f} {reports['lbm'].fields['rho'][i]:8.4f} {reports['godunov'].fields['rho'][i]:9.4f}")
print("\ncsv files in demo_output/:", *(f for r in reports.values() for f in r.files))
