"""Benchmark problem builders.

The main benchmark couples a piecewise-polynomial saddle-chain objective
g(x) in the style of Du et al. ("Gradient Descent Can Take Exponential Time
to Escape Saddle Points", NeurIPS 2017) with a trivially concave dual part:

    f(x, y) = g(x) - (1/2)||y||^2 .

g is built so that (0, ..., 0), (4*tau, 0, ..., 0), ...,
(4*tau, ..., 4*tau, 0) are strict saddle points while (4*tau, ..., 4*tau)
is the unique local optimum, with C^2 matching across region boundaries.
First-order descent started near the origin must traverse the whole saddle
chain and stalls; curvature-aware methods hop it quickly.

The quadratic and quartic families are analytic test problems whose inner
maximizer y*(x) = C^{-1} B^T x is available in closed form, used as oracles
for the Schur-complement surrogate and the inner-loop accuracy guarantees.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg
from numpy.typing import NDArray

from .problem import (
    AnalyticOracle,
    MinimaxProblem,
    ProblemConstants,
    derive_constants,
)

FloatArray = NDArray[np.float64]


# ---------------------------------------------------------------------------
# saddle-chain benchmark
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DuFunctionParams:
    """Parameters (n, L, gamma) of the saddle-chain objective.

    tau is Euler's number and nu has the closed form (37 L + 13 gamma)
    tau^2 / 6, which must agree with its defining expression
    -h1(2 tau) + 4 L tau^2; construction fails otherwise.
    """

    n: int
    L: float
    gamma: float
    tau: float = field(default=math.e, init=False)
    nu: float = field(default=0.0, init=False)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"dimension must be at least 1, got n={self.n}")
        if self.L <= 0 or self.gamma <= 0:
            raise ValueError("L and gamma must be positive")
        tau = math.e
        nu_closed = (37.0 * self.L + 13.0 * self.gamma) * tau**2 / 6.0
        nu_defining = -_h1(2.0 * tau, self.L, self.gamma, tau) + 4.0 * self.L * tau**2
        if abs(nu_closed - nu_defining) > 1e-10 * abs(nu_closed):
            raise AssertionError(
                f"nu closed form {nu_closed!r} disagrees with defining "
                f"expression {nu_defining!r}"
            )
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "nu", nu_closed)


@dataclass(frozen=True)
class RegionIndex:
    """Membership in the piecewise definition: first coordinate index i with
    x_i < 2*tau (i = n+1 when none), and branch 1 iff x_i <= tau.  branch is
    ignored when i = n+1."""

    i: int
    branch: int


def _h1(x: float, L: float, g: float, tau: float) -> float:
    u = x - tau
    return -g * x * x + (-14.0 * L + 10.0 * g) * u**3 / (3.0 * tau) \
        + (5.0 * L - 3.0 * g) * u**4 / (2.0 * tau**2)


def _h1_d1(x: float, L: float, g: float, tau: float) -> float:
    u = x - tau
    return -2.0 * g * x + (-14.0 * L + 10.0 * g) * u**2 / tau \
        + 2.0 * (5.0 * L - 3.0 * g) * u**3 / tau**2


def _h1_d2(x: float, L: float, g: float, tau: float) -> float:
    u = x - tau
    return -2.0 * g + 2.0 * (-14.0 * L + 10.0 * g) * u / tau \
        + 6.0 * (5.0 * L - 3.0 * g) * u**2 / tau**2


def _h2(x: float, L: float, g: float, tau: float) -> float:
    u = x - 2.0 * tau
    c = L + g
    return -g - 10.0 * c * u**3 / tau**3 - 15.0 * c * u**4 / tau**4 \
        - 6.0 * c * u**5 / tau**5


def _h2_d1(x: float, L: float, g: float, tau: float) -> float:
    u = x - 2.0 * tau
    c = L + g
    return -30.0 * c * u**2 / tau**3 - 60.0 * c * u**3 / tau**4 \
        - 30.0 * c * u**4 / tau**5


def _h2_d2(x: float, L: float, g: float, tau: float) -> float:
    u = x - 2.0 * tau
    c = L + g
    return -60.0 * c * u / tau**3 - 180.0 * c * u**2 / tau**4 \
        - 120.0 * c * u**3 / tau**5


def classify_region(x: FloatArray, params: DuFunctionParams) -> RegionIndex:
    """Region selection with out-of-domain clamping.

    Coordinates are clamped into [0, 6*tau] for classification only; the
    selected branch polynomial is then evaluated at the raw point, which
    extends g continuously along the trajectories solvers actually visit.
    Ties: x_i = tau selects branch 1, x_i = 2*tau counts as >= 2*tau.
    """
    tau = params.tau
    xc = np.clip(np.asarray(x, dtype=float), 0.0, 6.0 * tau)
    below = xc < 2.0 * tau
    if not bool(below.any()):
        return RegionIndex(i=params.n + 1, branch=1)
    i = int(np.argmax(below)) + 1
    branch = 1 if xc[i - 1] <= tau else 2
    return RegionIndex(i=i, branch=branch)


def du_value(x: FloatArray, params: DuFunctionParams) -> float:
    n, L, g, tau, nu = params.n, params.L, params.gamma, params.tau, params.nu
    x = np.asarray(x, dtype=float)
    region = classify_region(x, params)
    i = region.i
    if i == n + 1:
        return float(L * np.sum((x - 4.0 * tau) ** 2) - n * nu)
    head = float(L * np.sum((x[: i - 1] - 4.0 * tau) ** 2))
    base = head - (i - 1) * nu
    if region.branch == 1:
        return base - g * float(x[i - 1]) ** 2 + float(L * np.sum(x[i:] ** 2))
    xi = float(x[i - 1])
    val = base + _h1(xi, L, g, tau)
    if i <= n - 1:
        val += _h2(xi, L, g, tau) * float(x[i]) ** 2
        val += float(L * np.sum(x[i + 1:] ** 2))
    return val


def du_grad(x: FloatArray, params: DuFunctionParams) -> FloatArray:
    n, L, g, tau = params.n, params.L, params.gamma, params.tau
    x = np.asarray(x, dtype=float)
    region = classify_region(x, params)
    i = region.i
    grad = np.empty_like(x)
    if i == n + 1:
        np.multiply(x - 4.0 * tau, 2.0 * L, out=grad)
        return grad
    grad[: i - 1] = 2.0 * L * (x[: i - 1] - 4.0 * tau)
    if region.branch == 1:
        grad[i - 1] = -2.0 * g * x[i - 1]
        grad[i:] = 2.0 * L * x[i:]
        return grad
    xi = float(x[i - 1])
    if i <= n - 1:
        xnext = float(x[i])
        grad[i - 1] = _h1_d1(xi, L, g, tau) + _h2_d1(xi, L, g, tau) * xnext**2
        grad[i] = 2.0 * _h2(xi, L, g, tau) * xnext
        grad[i + 1:] = 2.0 * L * x[i + 1:]
    else:
        grad[i - 1] = _h1_d1(xi, L, g, tau)
    return grad


def du_hess(x: FloatArray, params: DuFunctionParams) -> FloatArray:
    n, L, g, tau = params.n, params.L, params.gamma, params.tau
    x = np.asarray(x, dtype=float)
    region = classify_region(x, params)
    i = region.i
    hess = np.zeros((n, n))
    if i == n + 1:
        np.fill_diagonal(hess, 2.0 * L)
        return hess
    d = np.full(n, 2.0 * L)
    if region.branch == 1:
        d[i - 1] = -2.0 * g
        np.fill_diagonal(hess, d)
        return hess
    xi = float(x[i - 1])
    if i <= n - 1:
        xnext = float(x[i])
        d[i - 1] = _h1_d2(xi, L, g, tau) + _h2_d2(xi, L, g, tau) * xnext**2
        d[i] = 2.0 * _h2(xi, L, g, tau)
        np.fill_diagonal(hess, d)
        cross = 2.0 * _h2_d1(xi, L, g, tau) * xnext
        hess[i - 1, i] = cross
        hess[i, i - 1] = cross
    else:
        d[i - 1] = _h1_d2(xi, L, g, tau)
        np.fill_diagonal(hess, d)
    return hess


def du_value_grad_hess(x: FloatArray, params: DuFunctionParams,
                       ) -> tuple[float, FloatArray, FloatArray]:
    """Value, gradient and (at most tridiagonal) Hessian of g at x."""
    return du_value(x, params), du_grad(x, params), du_hess(x, params)


def du_stationary_catalog(params: DuFunctionParams) -> list[FloatArray]:
    """The n saddle points followed by the unique local optimum."""
    pts = []
    for k in range(params.n):
        p = np.zeros(params.n)
        p[:k] = 4.0 * params.tau
        pts.append(p)
    pts.append(np.full(params.n, 4.0 * params.tau))
    return pts


def build_du_minimax(params: DuFunctionParams, dim_y: int = 5,
                     constants: Optional[ProblemConstants] = None,
                     ) -> MinimaxProblem:
    """f(x, y) = g(x) - ||y||^2/2 with mu = 1, zero coupling and y* = 0.

    Default constants are the conservative coefficient-magnitude bounds
    ell = 20 L (n+1) and rho = 200 (L+gamma)/tau; pass explicit constants to
    calibrate (over-estimates only shrink trust radii, preserving the
    guarantees, but make the fixed-radius solver extremely slow).
    """
    if dim_y < 1:
        raise ValueError(f"dim_y must be at least 1, got {dim_y}")
    n = params.n
    p_star = -n * params.nu
    if constants is None:
        constants = derive_constants(
            ell=20.0 * params.L * (n + 1),
            mu=1.0,
            rho=200.0 * (params.L + params.gamma) / params.tau,
            P_lower=p_star,
        )
    eye_m = np.eye(dim_y)
    zeros_nm = np.zeros((n, dim_y))

    return MinimaxProblem(
        dim_x=n,
        dim_y=dim_y,
        value=lambda x, y: du_value(x, params) - 0.5 * float(y @ y),
        grad_x=lambda x, y: du_grad(x, params),
        grad_y=lambda x, y: -np.asarray(y, dtype=float),
        hess_xx=lambda x, y: du_hess(x, params),
        hess_xy=lambda x, y: zeros_nm,
        hess_yy=lambda x, y: -eye_m,
        constants=constants,
        analytic=AnalyticOracle(
            y_star=lambda x: np.zeros(dim_y),
            P=lambda x: du_value(x, params),
            grad_P=lambda x: du_grad(x, params),
            hess_P=lambda x: du_hess(x, params),
            P_star=p_star,
        ),
    )


def du_default_x0(params: DuFunctionParams) -> FloatArray:
    """Standard start (1e-3, ..., 1e-3), next to the origin saddle."""
    return np.full(params.n, 1e-3)


# ---------------------------------------------------------------------------
# analytic quadratic / quartic families
# ---------------------------------------------------------------------------

def quadratic_minimax(A: FloatArray, B: FloatArray, C: FloatArray,
                      rho: float = 1.0,
                      constants: Optional[ProblemConstants] = None,
                      ) -> MinimaxProblem:
    """f(x, y) = x^T A x / 2 + x^T B y - y^T C y / 2 from explicit matrices.

    C must be positive definite; y*(x) = C^{-1} B^T x and
    P(x) = x^T (A + B C^{-1} B^T) x / 2.  Default constants take mu as the
    smallest eigenvalue of C and ell as the spectral norm of the full
    Hessian [[A, B], [B^T, -C]]; rho is configuration (the true Hessians
    are constant).
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    C = np.asarray(C, dtype=float)
    n, m = B.shape
    A = 0.5 * (A + A.T)
    C = 0.5 * (C + C.T)
    mu = float(scipy.linalg.eigvalsh(C)[0])
    if mu <= 0:
        raise ValueError("C must be positive definite")
    Q = A + B @ np.linalg.solve(C, B.T)
    Q = 0.5 * (Q + Q.T)
    q_min = float(scipy.linalg.eigvalsh(Q)[0])
    p_star = 0.0 if q_min >= 0 else -math.inf
    if constants is None:
        full = np.block([[A, B], [B.T, -C]])
        ell = float(np.max(np.abs(scipy.linalg.eigvalsh(full))))
        constants = derive_constants(ell=max(ell, mu), mu=mu, rho=rho,
                                     P_lower=p_star)

    C_fact = scipy.linalg.cho_factor(C, check_finite=False)

    def y_star(x: FloatArray) -> FloatArray:
        return scipy.linalg.cho_solve(C_fact, B.T @ x, check_finite=False)

    return MinimaxProblem(
        dim_x=n,
        dim_y=m,
        value=lambda x, y: float(0.5 * x @ (A @ x) + x @ (B @ y) - 0.5 * y @ (C @ y)),
        grad_x=lambda x, y: A @ x + B @ y,
        grad_y=lambda x, y: B.T @ x - C @ y,
        hess_xx=lambda x, y: A,
        hess_xy=lambda x, y: B,
        hess_yy=lambda x, y: -C,
        constants=constants,
        analytic=AnalyticOracle(
            y_star=y_star,
            P=lambda x: float(0.5 * x @ (Q @ x)),
            grad_P=lambda x: Q @ x,
            hess_P=lambda x: Q,
            P_star=p_star,
        ),
    )


def build_quadratic_minimax(seed: int, n: int, m: int, mu: float = 1.0,
                            coupling_scale: float = 1.0, rho: float = 1.0,
                            ) -> MinimaxProblem:
    """Seeded random instance with C >= mu*I and possibly indefinite A."""
    if mu <= 0:
        raise ValueError(f"mu must be positive, got {mu}")
    rng = np.random.default_rng(seed)
    M = rng.normal(size=(n, n))
    A = 0.5 * (M + M.T) / math.sqrt(n)
    B = coupling_scale * rng.normal(size=(n, m)) / math.sqrt(max(n, m))
    W = rng.normal(size=(m, m))
    C = W.T @ W / m + mu * np.eye(m)
    return quadratic_minimax(A, B, C, rho=rho)


def scalar_double_well_constants(H_Lip_target: float, ell: float, mu: float,
                                 P_lower: float = 0.0) -> ProblemConstants:
    """Constants with rho chosen so the derived H_Lip hits a target value."""
    kappa = ell / mu
    rho = H_Lip_target / (1.0 + kappa) ** 3
    return derive_constants(ell=ell, mu=mu, rho=rho, P_lower=P_lower)


def build_convex_quartic_minimax(seed: int, n: int, m: int,
                                 quartic: float = 0.1,
                                 coupling_scale: float = 0.5,
                                 radius_bound: float = 4.0,
                                 ) -> MinimaxProblem:
    """Strongly convex analytic-P instance with a quartic term.

    f(x, y) = x^T A x / 2 + quartic * sum(x^4) + x^T B y - y^T C y / 2 with
    A built positive definite, so P(x) = x^T Q x / 2 + quartic * sum(x^4) is
    strongly convex with its minimizer at the origin.  The quartic term
    keeps Newton from finishing in one step, which is what makes the local
    quadratic convergence of adaptive trust-region runs observable.
    Constants are valid on the ball ||x||_inf <= radius_bound.
    """
    if quartic < 0:
        raise ValueError("quartic coefficient must be nonnegative")
    rng = np.random.default_rng(seed)
    M = rng.normal(size=(n, n))
    A = M.T @ M / n + 0.5 * np.eye(n)
    B = coupling_scale * rng.normal(size=(n, m)) / math.sqrt(max(n, m))
    W = rng.normal(size=(m, m))
    C = W.T @ W / m + np.eye(m)
    mu = float(scipy.linalg.eigvalsh(C)[0])
    Q = A + B @ np.linalg.solve(C, B.T)
    Q = 0.5 * (Q + Q.T)

    full = np.block([[A, B], [B.T, -C]])
    ell = float(np.max(np.abs(scipy.linalg.eigvalsh(full)))) \
        + 12.0 * quartic * radius_bound**2
    rho = max(24.0 * quartic * radius_bound, 1e-6)
    constants = derive_constants(ell=max(ell, mu), mu=mu, rho=rho, P_lower=0.0)

    C_fact = scipy.linalg.cho_factor(C, check_finite=False)

    def y_star(x: FloatArray) -> FloatArray:
        return scipy.linalg.cho_solve(C_fact, B.T @ x, check_finite=False)

    def P(x: FloatArray) -> float:
        return float(0.5 * x @ (Q @ x) + quartic * np.sum(x**4))

    return MinimaxProblem(
        dim_x=n,
        dim_y=m,
        value=lambda x, y: float(0.5 * x @ (A @ x) + quartic * np.sum(x**4)
                                 + x @ (B @ y) - 0.5 * y @ (C @ y)),
        grad_x=lambda x, y: A @ x + 4.0 * quartic * x**3 + B @ y,
        grad_y=lambda x, y: B.T @ x - C @ y,
        hess_xx=lambda x, y: A + 12.0 * quartic * np.diag(x**2),
        hess_xy=lambda x, y: B,
        hess_yy=lambda x, y: -C,
        constants=constants,
        analytic=AnalyticOracle(
            y_star=y_star,
            P=P,
            grad_P=lambda x: Q @ x + 4.0 * quartic * x**3,
            hess_P=lambda x: Q + 12.0 * quartic * np.diag(x**2),
            P_star=0.0,
        ),
    )
