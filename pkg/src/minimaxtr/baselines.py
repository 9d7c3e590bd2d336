"""Reference solvers: simultaneous gradient descent-ascent and a cubic-
regularized Newton scheme with the same inner ascent loop as the
trust-region solvers.

GDA is the first-order baseline; on benchmark objectives with saddle
chains it stalls near non-optimal stationary points, which is exactly the
behavior the comparison experiments are designed to expose.  The
cubic-regularized baseline replaces the trust-region step with the global
minimizer of the cubic model g^T s + (1/2) s^T H s + (M/6)||s||^3.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.typing import NDArray

from .inner import AscentSchedule, ascend, default_step_size, schedule_counts
from .minimax_tr import SspCertificate
from .problem import MinimaxProblem, schur_hessian
from .records import IterationRecord
from .trs import solve_cubic

FloatArray = NDArray[np.float64]


@dataclass
class GdaConfig:
    """Simultaneous GDA settings.

    Step sizes default to eta_x = 1/L_P and eta_y = 1/ell.  record_every
    decimates the trajectory (long stalls would otherwise produce millions
    of rows); the final iteration is always recorded.
    """

    eta_x: Optional[float] = None
    eta_y: Optional[float] = None
    max_iter: int = 100_000
    grad_tol: float = 0.0
    record_every: int = 1000
    max_time_s: Optional[float] = None


def run_gda(problem: MinimaxProblem, x0: FloatArray, y0: FloatArray,
            config: GdaConfig) -> list[IterationRecord]:
    """Simultaneous updates x -= eta_x grad_x, y += eta_y grad_y.

    Stops on ||grad_x f|| <= grad_tol or when the iteration/time budget runs
    out (budget exhaustion is a normal outcome here).
    """
    consts = problem.constants
    eta_x = config.eta_x if config.eta_x is not None else 1.0 / consts.L_P
    eta_y = config.eta_y if config.eta_y is not None else 1.0 / consts.ell
    if eta_x <= 0 or eta_y <= 0:
        raise ValueError("GDA step sizes must be positive")
    x = np.array(x0, dtype=float)
    y = np.array(y0, dtype=float)
    grad_x, grad_y = problem.grad_x, problem.grad_y
    value = problem.value
    analytic = problem.analytic

    trajectory: list[IterationRecord] = []
    t0 = time.perf_counter()

    def record(k: int, gn: float) -> None:
        gap = None
        if analytic is not None:
            gap = analytic.P(x) - analytic.P_star
        trajectory.append(IterationRecord(
            iter=k, wall_time_s=time.perf_counter() - t0,
            surrogate_P=value(x, y), true_P_gap=gap, grad_norm=gn,
            step_norm=eta_x * gn,
        ))

    k = 0
    while True:
        gx = grad_x(x, y)
        gn = float(np.linalg.norm(gx))
        stop = (
            gn <= config.grad_tol
            or k >= config.max_iter
            or (config.max_time_s is not None
                and time.perf_counter() - t0 > config.max_time_s)
        )
        if stop or k % config.record_every == 0:
            record(k, gn)
        if stop:
            break
        y = y + eta_y * grad_y(x, y)
        x = x - eta_x * gx
        k += 1
    return trajectory


@dataclass
class McnConfig:
    """Cubic-regularized Newton settings.

    M defaults to the problem's H_Lip; eps1/eps2 follow the same defaults as
    the fixed-radius trust-region solver and drive the inner ascent
    schedule.  Termination is step-norm based: stop once the two most
    recent step norms are both at most sqrt(eps/H_Lip)/2 (at t=0 the single
    available step norm decides).
    """

    eps: float
    M: Optional[float] = None
    eps1: Optional[float] = None
    eps2: Optional[float] = None
    max_outer: int = 100_000
    record_trajectory: bool = True
    max_time_s: Optional[float] = None


def run_mcn(problem: MinimaxProblem, x0: FloatArray,
            y_init: Optional[FloatArray], config: McnConfig,
            ) -> tuple[SspCertificate, list[IterationRecord]]:
    """Cubic-regularized Newton on P with scheduled inner ascent."""
    consts = problem.constants
    if config.eps <= 0:
        raise ValueError(f"eps must be positive, got {config.eps}")
    M = config.M if config.M is not None else consts.H_Lip
    if M <= 0:
        raise ValueError(f"cubic weight must be positive, got {M}")
    eps1 = config.eps1 if config.eps1 is not None else config.eps / 12.0
    eps2 = config.eps2 if config.eps2 is not None else math.sqrt(config.eps * consts.H_Lip) / 6.0
    step_threshold = 0.5 * math.sqrt(config.eps / consts.H_Lip)

    x = np.array(x0, dtype=float)
    y = np.zeros(problem.dim_y) if y_init is None else np.array(y_init, dtype=float)
    eta_y = default_step_size(consts)

    trajectory: list[IterationRecord] = []
    total_inner = 0
    prev_step_norm: Optional[float] = None
    terminated = False
    t0 = time.perf_counter()
    t = 0

    while t < config.max_outer:
        if config.max_time_s is not None and time.perf_counter() - t0 > config.max_time_s:
            break
        if t == 0:
            dist0 = float(np.linalg.norm(problem.grad_y(x, y))) / consts.mu
            n_t = schedule_counts(consts, eps1, eps2, dist0, 0.0, 0)
        else:
            n_t = schedule_counts(consts, eps1, eps2, 0.0, prev_step_norm, t)
        y, used = ascend(problem, x, y, AscentSchedule.fixed_count(n_t, eta_y))
        total_inner += used

        g = problem.grad_x(x, y)
        H = schur_hessian(problem, x, y)
        s, nu = solve_cubic(g, H, M)
        step_norm = float(np.linalg.norm(s))

        surrogate = problem.value(x, y)
        if config.record_trajectory:
            gap = None
            if problem.analytic is not None:
                gap = problem.analytic.P(x) - problem.analytic.P_star
            trajectory.append(IterationRecord(
                iter=t, wall_time_s=time.perf_counter() - t0,
                surrogate_P=surrogate, true_P_gap=gap,
                grad_norm=float(np.linalg.norm(g)), step_norm=step_norm,
                lam=nu, inner_iters=used,
            ))

        x = x + s
        done = step_norm <= step_threshold and (
            prev_step_norm is None or prev_step_norm <= step_threshold
        )
        prev_step_norm = step_norm
        t += 1
        if done:
            terminated = True
            break

    cert = SspCertificate(
        x=x,
        grad_norm_bound=config.eps if terminated else math.inf,
        hessian_eigen_bound=-math.sqrt(consts.H_Lip * config.eps) if terminated else -math.inf,
        terminated_by_dual=terminated,
        outer_iterations=t,
        total_inner_iterations=total_inner,
    )
    return cert, trajectory
