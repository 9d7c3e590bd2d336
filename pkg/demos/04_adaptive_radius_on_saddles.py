"""Adaptive contractions/expansions on a saddle chain.

The benchmark objective strings saddle points in a row; escaping them with
a fixed tiny radius takes thousands of steps, while the adaptive scheme
grows the radius through expansions, rejects overshoots through
contractions, and finishes with full Newton steps.  The same run also shows
the step classification bookkeeping.
"""

import numpy as np

from minimaxtr import (
    DuFunctionParams,
    TraceConfig,
    TrConfig,
    build_du_minimax,
    derive_constants,
    du_default_x0,
    run_minimax_tr,
    run_minimax_trace,
)

params = DuFunctionParams(n=4, L=2.0, gamma=1.0)
constants = derive_constants(ell=40.0, mu=1.0, rho=200.0 / 41.0**3,
                             P_lower=-params.n * params.nu)
problem = build_du_minimax(params, dim_y=3, constants=constants)
x0 = du_default_x0(params)
y0 = np.random.default_rng(5).standard_normal(3)

print(f"saddle chain with n = {params.n}, start gap = "
      f"{problem.analytic.P(x0) - problem.analytic.P_star:.2f}")

cert_a, traj_a, counts = run_minimax_trace(problem, x0, y0,
                                           TraceConfig(eps=1e-2))
gap_a = problem.analytic.P(cert_a.x) - problem.analytic.P_star
print(f"\nadaptive: {cert_a.outer_iterations} outer iterations, "
      f"final gap {gap_a:.2e}")
print("step classes:", {k.value: v for k, v in counts.items()})

print("\n  t  class          delta      |s|     lambda      rho")
for r in traj_a:
    cls = r.step_class or "(stop)"
    rho = "" if r.rho is None else f"{r.rho:9.2f}"
    print(f"{r.iter:>3}  {cls:<13} {r.delta:8.3f} {r.step_norm:8.3f} "
          f"{r.lam:9.3f}  {rho}")

cert_f, traj_f = run_minimax_tr(problem, x0, y0, TrConfig(eps=1e-2))
gap_f = problem.analytic.P(cert_f.x) - problem.analytic.P_star
print(f"\nfixed radius: {cert_f.outer_iterations} outer iterations, "
      f"final gap {gap_f:.2e}")
print(f"speedup in outer iterations: "
      f"{cert_f.outer_iterations / cert_a.outer_iterations:.0f}x")
