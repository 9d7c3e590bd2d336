"""Tour of the exact subproblem solvers.

The building block of everything else in this library is the dense
trust-region subproblem: minimize a (possibly indefinite) quadratic model
over a Euclidean ball.  The solver certifies its output through the
classical optimality system, exposes the dual multiplier that the outer
algorithms steer by, and resolves the hard case exactly.
"""

import numpy as np

from minimaxtr import solve_cubic, solve_shifted, solve_trs

rng = np.random.default_rng(0)

print("=== interior Newton step ===")
sol = solve_trs(g=np.array([1.0, 0.0]), H=np.eye(2), delta=2.0)
print(f"s = {sol.s}, nu = {sol.nu}, on_boundary = {sol.on_boundary}")
print("The unconstrained minimizer fits inside the ball, so the multiplier "
      "is zero.\n")

print("=== indefinite model, boundary solution ===")
H = np.array([[1.0, 0.3], [0.3, -2.0]])
g = np.array([0.5, -0.2])
sol = solve_trs(g, H, delta=1.0)
print(f"s = {sol.s}")
print(f"nu = {sol.nu:.6f} (must offset the negative curvature "
      f"{np.linalg.eigvalsh(H)[0]:.3f})")
print(f"kkt residual = {sol.kkt_residual:.2e}\n")

print("=== the hard case ===")
# gradient orthogonal to the leading eigenvector: the shifted system alone
# cannot reach the boundary and an explicit eigenvector component is added
sol = solve_trs(np.array([0.0, 1.0]), np.diag([-2.0, 1.0]), delta=1.0)
print(f"s = {sol.s}, hard_case = {sol.hard_case}, nu = {sol.nu}")
print("The step leaves along the negative-curvature direction even though "
      "the gradient is blind to it.\n")

print("=== shifted solves and the dual ratio ===")
# the adaptive radius logic works with s(lambda) = -(H + lambda I)^{-1} g;
# its norm shrinks monotonically as the shift grows
H = np.array([[0.5, 0.1], [0.1, 1.5]])
g = np.array([-1.0, 0.4])
for lam in (0.5, 1.0, 2.0, 4.0):
    s = solve_shifted(g, H, lam)
    print(f"lambda = {lam:4.1f}   ||s|| = {np.linalg.norm(s):.4f}   "
          f"ratio lambda/||s|| = {lam / np.linalg.norm(s):8.3f}")
print()

print("=== cubic-regularized model ===")
s, nu = solve_cubic(np.array([1.0]), np.array([[0.0]]), M=6.0)
print(f"scalar model s^2/0 + |s|^3: s = {s[0]:.6f} "
      f"(closed form -1/sqrt(3) = {-1/np.sqrt(3):.6f}), nu = {nu:.6f}")
