"""Problem oracles for smooth minimax optimization.

A problem is min_x max_y f(x, y) with f twice differentiable, mu-strongly
concave in y and possibly nonconvex in x.  Solvers work on the primal
function P(x) = max_y f(x, y) through two derived quantities: the partial
gradient grad_x f evaluated at an (approximate) inner maximizer, and the
Schur-complement surrogate Hessian

    H(x, y) = hess_xx - hess_xy (hess_yy)^{-1} hess_yx,

which equals the true Hessian of P at y = y*(x).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
import scipy.linalg
from numpy.typing import NDArray

FloatArray = NDArray[np.float64]


class ConcavityError(RuntimeError):
    """The y-block Hessian was not negative definite at a queried point."""


@dataclass(frozen=True)
class ProblemConstants:
    """Smoothness/concavity constants and the quantities derived from them.

    The derived fields satisfy, exactly by construction,
    kappa = ell/mu, L_P = (kappa+1)*ell, L_H = rho*(1+kappa)^2 and
    H_Lip = rho*(1+kappa)^3.
    """

    ell: float
    mu: float
    rho: float
    kappa: float
    L_P: float
    L_H: float
    H_Lip: float
    P_lower: float = -math.inf


def derive_constants(ell: float, mu: float, rho: float,
                     P_lower: float = -math.inf) -> ProblemConstants:
    """Build ProblemConstants from (ell, mu, rho) and a lower bound on P.

    Requires ell >= mu > 0 and rho > 0.
    """
    if mu <= 0:
        raise ValueError(f"strong concavity modulus must be positive, got mu={mu}")
    if ell < mu:
        raise ValueError(f"smoothness must dominate concavity, got ell={ell} < mu={mu}")
    if rho <= 0:
        raise ValueError(f"Hessian Lipschitz constant must be positive, got rho={rho}")
    kappa = ell / mu
    return ProblemConstants(
        ell=ell,
        mu=mu,
        rho=rho,
        kappa=kappa,
        L_P=(kappa + 1.0) * ell,
        L_H=rho * (1.0 + kappa) ** 2,
        H_Lip=rho * (1.0 + kappa) ** 3,
        P_lower=P_lower,
    )


@dataclass(frozen=True)
class AnalyticOracle:
    """Closed-form data available for benchmark problems only.

    Used by tests and certificate checks; solvers never rely on it.
    """

    y_star: Callable[[FloatArray], FloatArray]
    P: Callable[[FloatArray], float]
    grad_P: Callable[[FloatArray], FloatArray]
    hess_P: Callable[[FloatArray], FloatArray]
    P_star: float


@dataclass(frozen=True)
class MinimaxProblem:
    """Oracle bundle for f(x, y).

    All callables are pure functions of (x, y); the bundle is safe to share
    read-only across concurrent solver runs.  hess_yx is realized as the
    transpose of hess_xy.
    """

    dim_x: int
    dim_y: int
    value: Callable[[FloatArray, FloatArray], float]
    grad_x: Callable[[FloatArray, FloatArray], FloatArray]
    grad_y: Callable[[FloatArray, FloatArray], FloatArray]
    hess_xx: Callable[[FloatArray, FloatArray], FloatArray]
    hess_xy: Callable[[FloatArray, FloatArray], FloatArray]
    hess_yy: Callable[[FloatArray, FloatArray], FloatArray]
    constants: ProblemConstants
    analytic: Optional[AnalyticOracle] = None


@dataclass(frozen=True)
class PrimalDualPoint:
    """A paired primal/dual iterate (x, y)."""

    x: FloatArray
    y: FloatArray

    def validate(self, problem: MinimaxProblem) -> "PrimalDualPoint":
        if self.x.shape != (problem.dim_x,):
            raise ValueError(f"x has shape {self.x.shape}, expected ({problem.dim_x},)")
        if self.y.shape != (problem.dim_y,):
            raise ValueError(f"y has shape {self.y.shape}, expected ({problem.dim_y},)")
        return self


def schur_hessian(problem: MinimaxProblem, x: FloatArray, y: FloatArray) -> FloatArray:
    """Schur-complement surrogate Hessian H(x, y), symmetrized.

    Computed through a Cholesky factorization of -hess_yy (never an explicit
    inverse): with C = -hess_yy = R^T R and W = R^{-T} hess_yx,

        H = hess_xx + W^T W.

    Raises ConcavityError if -hess_yy is not positive definite.
    """
    A = np.asarray(problem.hess_xx(x, y), dtype=float)
    B = np.asarray(problem.hess_xy(x, y), dtype=float)
    C = -np.asarray(problem.hess_yy(x, y), dtype=float)
    try:
        R = scipy.linalg.cholesky(C, lower=False, check_finite=False)
    except scipy.linalg.LinAlgError as exc:
        raise ConcavityError(
            "concavity violation: -hess_yy has a nonpositive pivot"
        ) from exc
    W = scipy.linalg.solve_triangular(R, B.T, trans="T", lower=False,
                                      check_finite=False)
    H = A + W.T @ W
    return 0.5 * (H + H.T)


def finite_difference_check(problem: MinimaxProblem, x: FloatArray,
                            y: FloatArray, h: float = 1e-5) -> dict[str, float]:
    """Compare oracle derivatives against central differences.

    Returns the max scaled error per block, keyed by block name
    (grad_x, grad_y, hess_xx, hess_xy, hess_yy).  Errors are
    max|approx - oracle| / (1 + max|oracle|), so the report stays meaningful
    for blocks that are identically zero.  Report-only; never raises on a
    mismatch.
    """
    if h <= 0:
        raise ValueError(f"finite-difference step must be positive, got h={h}")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n, m = problem.dim_x, problem.dim_y

    # gradient of value w.r.t. x and y
    fd_gx = np.empty(n)
    for i in range(n):
        e = np.zeros(n)
        e[i] = h
        fd_gx[i] = (problem.value(x + e, y) - problem.value(x - e, y)) / (2 * h)
    fd_gy = np.empty(m)
    for j in range(m):
        e = np.zeros(m)
        e[j] = h
        fd_gy[j] = (problem.value(x, y + e) - problem.value(x, y - e)) / (2 * h)

    # Hessian blocks from central differences of the gradients
    fd_hxx = np.empty((n, n))
    for i in range(n):
        e = np.zeros(n)
        e[i] = h
        fd_hxx[:, i] = (problem.grad_x(x + e, y) - problem.grad_x(x - e, y)) / (2 * h)
    fd_hxy = np.empty((n, m))
    for j in range(m):
        e = np.zeros(m)
        e[j] = h
        fd_hxy[:, j] = (problem.grad_x(x, y + e) - problem.grad_x(x, y - e)) / (2 * h)
    fd_hyy = np.empty((m, m))
    for j in range(m):
        e = np.zeros(m)
        e[j] = h
        fd_hyy[:, j] = (problem.grad_y(x, y + e) - problem.grad_y(x, y - e)) / (2 * h)

    def scaled_err(approx: FloatArray, oracle: FloatArray) -> float:
        oracle = np.asarray(oracle, dtype=float)
        denom = 1.0 + (np.max(np.abs(oracle)) if oracle.size else 0.0)
        return float(np.max(np.abs(approx - oracle)) / denom) if oracle.size else 0.0

    return {
        "grad_x": scaled_err(fd_gx, problem.grad_x(x, y)),
        "grad_y": scaled_err(fd_gy, problem.grad_y(x, y)),
        "hess_xx": scaled_err(fd_hxx, problem.hess_xx(x, y)),
        "hess_xy": scaled_err(fd_hxy, problem.hess_xy(x, y)),
        "hess_yy": scaled_err(fd_hyy, problem.hess_yy(x, y)),
    }
