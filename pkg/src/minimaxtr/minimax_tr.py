"""Fixed-radius inexact trust-region solver for the primal function P(x).

Each outer iteration refines y by a scheduled number of ascent steps, forms
the gradient and Schur-complement Hessian surrogates at (x_t, y_t), takes an
exact trust-region step of fixed radius r = sqrt(eps/H_Lip), and stops once
the rescaled dual variable of the subproblem certifies an approximate
second-order stationary point.

The subproblem solver returns the raw multiplier nu in (H + nu I)s = -g;
the algorithm-level dual is lambda_t = 2 nu / H_Lip, which makes the
stopping test lambda_t <= 2 sqrt(eps / H_Lip).  This rescaling is the single
most error-prone translation in the method: the termination threshold and
the multiplier live on different scales unless it is applied.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.typing import NDArray

from .inner import AscentSchedule, ascend, default_step_size, schedule_counts
from .problem import MinimaxProblem, schur_hessian
from .records import IterationRecord
from .trs import solve_trs

FloatArray = NDArray[np.float64]


@dataclass
class TrConfig:
    """Configuration for the fixed-radius solver.

    Fields left as None are resolved from eps and the problem constants at
    run start: eps1 = eps/12, eps2 = sqrt(eps*H_Lip)/6,
    radius = sqrt(eps/H_Lip), and max_outer from the descent-based budget
    ceil(6 sqrt(H_Lip) (P(x0) - P_lower) / eps^1.5).
    """

    eps: float
    eps1: Optional[float] = None
    eps2: Optional[float] = None
    radius: Optional[float] = None
    max_outer: Optional[int] = None
    record_trajectory: bool = True
    max_time_s: Optional[float] = None

    def resolved(self, H_Lip: float) -> "TrConfig":
        if self.eps <= 0:
            raise ValueError(f"eps must be positive, got {self.eps}")
        cfg = TrConfig(
            eps=self.eps,
            eps1=self.eps1 if self.eps1 is not None else self.eps / 12.0,
            eps2=self.eps2 if self.eps2 is not None else math.sqrt(self.eps * H_Lip) / 6.0,
            radius=self.radius if self.radius is not None else math.sqrt(self.eps / H_Lip),
            max_outer=self.max_outer,
            record_trajectory=self.record_trajectory,
            max_time_s=self.max_time_s,
        )
        if cfg.radius <= 0 or cfg.eps1 <= 0 or cfg.eps2 <= 0:
            raise ValueError("resolved radius/eps1/eps2 must be positive")
        return cfg


@dataclass(frozen=True)
class SspCertificate:
    """Approximate second-order stationarity certificate.

    grad_norm_bound and hessian_eigen_bound are the bounds claimed for the
    emitted point; terminated_by_dual records whether the stopping test
    fired (False means the iteration budget was exhausted and x is the best
    iterate seen).
    """

    x: FloatArray
    grad_norm_bound: float
    hessian_eigen_bound: float
    terminated_by_dual: bool
    outer_iterations: int
    total_inner_iterations: int


def run_minimax_tr(problem: MinimaxProblem, x0: FloatArray,
                   y_init: Optional[FloatArray], config: TrConfig,
                   ) -> tuple[SspCertificate, list[IterationRecord]]:
    """Run the fixed-radius trust-region solver from (x0, y_init).

    y_init defaults to the zero vector.  Returns the certificate and the
    recorded trajectory.  On budget exhaustion the certificate is flagged
    (terminated_by_dual=False) and carries the iterate with the lowest
    surrogate objective seen.
    """
    consts = problem.constants
    cfg = config.resolved(consts.H_Lip)
    x = np.array(x0, dtype=float)
    y = np.zeros(problem.dim_y) if y_init is None else np.array(y_init, dtype=float)
    eta_y = default_step_size(consts)
    dual_threshold = 2.0 * math.sqrt(cfg.eps / consts.H_Lip)

    trajectory: list[IterationRecord] = []
    total_inner = 0
    step_norm_prev = 0.0
    best_x, best_val = x.copy(), math.inf
    t0 = time.perf_counter()
    t = 0
    max_outer = cfg.max_outer

    while True:
        if max_outer is not None and t >= max_outer:
            break
        if cfg.max_time_s is not None and time.perf_counter() - t0 > cfg.max_time_s:
            break

        if t == 0:
            dist0 = float(np.linalg.norm(problem.grad_y(x, y))) / consts.mu
            n_t = schedule_counts(consts, cfg.eps1, cfg.eps2, dist0, 0.0, 0)
        else:
            n_t = schedule_counts(consts, cfg.eps1, cfg.eps2, 0.0, step_norm_prev, t)
        y, used = ascend(problem, x, y, AscentSchedule.fixed_count(n_t, eta_y))
        total_inner += used

        if t == 0 and max_outer is None:
            if not math.isfinite(consts.P_lower):
                raise ValueError(
                    "max_outer not set and problem has no finite P_lower to "
                    "derive the default budget from"
                )
            p0 = problem.value(x, y)
            gap = max(p0 - consts.P_lower, 0.0)
            max_outer = max(1, math.ceil(6.0 * math.sqrt(consts.H_Lip) * gap
                                         / cfg.eps**1.5))

        g = problem.grad_x(x, y)
        H = schur_hessian(problem, x, y)
        sol = solve_trs(g, H, cfg.radius)
        lam_t = 2.0 * sol.nu / consts.H_Lip
        step_norm_prev = float(np.linalg.norm(sol.s))

        surrogate = problem.value(x, y)
        if surrogate < best_val:
            best_val, best_x = surrogate, x.copy()

        x = x + sol.s
        t += 1

        if cfg.record_trajectory:
            gap = None
            if problem.analytic is not None:
                gap = problem.analytic.P(x) - problem.analytic.P_star
            trajectory.append(IterationRecord(
                iter=t - 1,
                wall_time_s=time.perf_counter() - t0,
                surrogate_P=surrogate,
                true_P_gap=gap,
                grad_norm=float(np.linalg.norm(g)),
                step_norm=step_norm_prev,
                lam=lam_t,
                delta=cfg.radius,
                inner_iters=used,
            ))

        if lam_t <= dual_threshold:
            cert = SspCertificate(
                x=x,
                grad_norm_bound=1.75 * cfg.eps,
                hessian_eigen_bound=-(13.0 / 6.0) * math.sqrt(consts.H_Lip * cfg.eps),
                terminated_by_dual=True,
                outer_iterations=t,
                total_inner_iterations=total_inner,
            )
            return cert, trajectory

    cert = SspCertificate(
        x=best_x,
        grad_norm_bound=math.inf,
        hessian_eigen_bound=-math.inf,
        terminated_by_dual=False,
        outer_iterations=t,
        total_inner_iterations=total_inner,
    )
    return cert, trajectory
