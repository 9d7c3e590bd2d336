"""Adaptive trust region with contractions and expansions for minimax problems.

The radius-update logic follows the TRACE scheme of Curtis, Robinson &
Samadi (Math. Program., 2017): a trial step is accepted only when the ratio

    rho_t = (P(x_t) - P(x_t + s_t)) / ||s_t||^3

clears a threshold eta, and instead of the classical multiply-the-radius
update, rejected steps trigger a CONTRACT subroutine that picks the next
radius from the norm of a shifted-model solution whose dual ratio
lambda/||s|| lands in a prescribed band [sigma_lo, sigma_hi].  Steps whose
dual variable is large relative to sigma_t ||s_t|| trigger an expansion
instead.  This bookkeeping is what upgrades the classical O(eps^-2) rate to
O(eps^-1.5) while retaining local quadratic convergence.

Here the scheme runs inexactly on the primal function P(x) = max_y f(x, y):
gradients and Hessians are surrogates evaluated at an inner iterate y_t
whose distance to y*(x_t) is certified against the trial-step norm (see
inner.ascend_consistent), and the acceptance ratio uses surrogate objective
values at matched accuracy.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Optional

import numpy as np
import scipy.linalg
from numpy.typing import NDArray

from .inner import _ascend_tolerance, ascend_consistent, default_step_size
from .minimax_tr import SspCertificate
from .problem import MinimaxProblem
from .records import IterationRecord
from .trs import TrsSolution, find_lambda_in_range, solve_shifted, solve_trs

FloatArray = NDArray[np.float64]

BOUNDARY_RTOL = 1e-9


class StepClass(Enum):
    ACCEPT_SIGMA = "ACCEPT_SIGMA"
    ACCEPT_DELTA = "ACCEPT_DELTA"
    CONTRACT = "CONTRACT"
    EXPAND = "EXPAND"

    @property
    def accepted(self) -> bool:
        return self in (StepClass.ACCEPT_SIGMA, StepClass.ACCEPT_DELTA)


@dataclass
class TraceConfig:
    """Inputs of the adaptive scheme.

    Requires 0 < gamma_C < 1 < gamma_E, gamma_lambda > 1,
    0 < sigma_lo <= sigma_hi, 0 < delta0 <= Delta0 and sigma0 >= sigma_lo.
    C1, C2, M2 control the step-dependent inner accuracy; M2 defaults to
    sqrt(eps)/2, which makes the stopping test below certify an
    (eps, sqrt(eps)) second-order stationary point.
    """

    eps: float
    eta: float = 0.1
    gamma_C: float = 0.5
    gamma_E: float = 2.5
    gamma_lambda: float = 2.0
    sigma_lo: float = 1e-4
    sigma_hi: float = 1e4
    delta0: float = 1.0
    Delta0: float = 1e3
    sigma0: float = 1.0
    max_outer: int = 10_000
    C1: float = 1.0
    C2: float = 1.0
    M2: Optional[float] = None
    record_trajectory: bool = True
    max_time_s: Optional[float] = None
    # invoked with the current iterate x_t at the top of each outer iteration
    callback: Optional[Callable[[NDArray[np.float64]], None]] = field(
        default=None, repr=False)

    def validate(self) -> "TraceConfig":
        if self.eps <= 0:
            raise ValueError(f"eps must be positive, got {self.eps}")
        if not (0.0 < self.eta < 1.0):
            raise ValueError(f"eta must lie in (0,1), got {self.eta}")
        if not (0.0 < self.gamma_C < 1.0 < self.gamma_E):
            raise ValueError("need 0 < gamma_C < 1 < gamma_E")
        if self.gamma_lambda <= 1.0:
            raise ValueError(f"gamma_lambda must exceed 1, got {self.gamma_lambda}")
        if not (0.0 < self.sigma_lo <= self.sigma_hi):
            raise ValueError("need 0 < sigma_lo <= sigma_hi")
        if not (0.0 < self.delta0 <= self.Delta0):
            raise ValueError("need 0 < delta0 <= Delta0")
        if self.sigma0 < self.sigma_lo:
            raise ValueError("need sigma0 >= sigma_lo")
        if self.C1 <= 0 or self.C2 <= 0:
            raise ValueError("C1 and C2 must be positive")
        return self

    def resolved_M2(self) -> float:
        return self.M2 if self.M2 is not None else math.sqrt(self.eps) / 2.0


@dataclass(frozen=True)
class TraceState:
    """Full mutable state of one adaptive run at iteration t."""

    x: FloatArray
    y: FloatArray
    delta: float
    Delta: float
    sigma: float
    s: FloatArray
    lam: float
    rho: float


def compute_rho(P_before: float, P_after: float, step_norm: float) -> float:
    """Actual-to-predicted reduction ratio (P_before - P_after)/||s||^3."""
    if step_norm <= 0:
        raise ValueError(f"step norm must be positive, got {step_norm}")
    return (P_before - P_after) / step_norm**3


def classify(rho: float, eta: float, lam: float, sigma: float,
             step_norm: float, Delta: float) -> StepClass:
    """Three-way step classification.

    ACCEPT iff rho >= eta and (lam <= sigma*||s|| or ||s|| = Delta), with
    the Delta equality tested to relative tolerance 1e-9; CONTRACT iff
    rho < eta; EXPAND otherwise.  ACCEPT splits into ACCEPT_DELTA when the
    step hit Delta.
    """
    on_Delta = abs(step_norm - Delta) <= BOUNDARY_RTOL * max(Delta, step_norm)
    if rho >= eta and (lam <= sigma * step_norm or on_Delta):
        return StepClass.ACCEPT_DELTA if on_Delta else StepClass.ACCEPT_SIGMA
    if rho < eta:
        return StepClass.CONTRACT
    return StepClass.EXPAND


def contract(g: FloatArray, H: FloatArray, s: FloatArray, lam: float,
             sigma: float, config: TraceConfig) -> float:
    """CONTRACT subroutine: next radius after a rejected step.

    Branch lam < sigma_lo*||s||: shift by lam_hat = lam + sqrt(sigma_lo*||g||)
    and take the resulting step norm if its dual ratio is below sigma_hi,
    otherwise bisect the shift into the [sigma_lo, sigma_hi] band.  Branch
    lam >= sigma_lo*||s||: inflate the shift by gamma_lambda and floor the
    resulting norm at gamma_C*||s||.  The sigma argument mirrors the
    published subroutine header; the thresholds used are config.sigma_lo
    and config.sigma_hi.
    """
    step_norm = float(np.linalg.norm(s))
    if step_norm <= 0:
        raise ValueError("contract requires a nonzero rejected step")
    if lam < config.sigma_lo * step_norm:
        gnorm = float(np.linalg.norm(g))
        if gnorm == 0.0:
            raise ValueError("contract requires a nonzero gradient in the shift branch")
        lam_hat = lam + math.sqrt(config.sigma_lo * gnorm)
        s1 = solve_shifted(g, H, lam_hat)
        s1_norm = float(np.linalg.norm(s1))
        if lam_hat / s1_norm <= config.sigma_hi:
            return s1_norm
        result = find_lambda_in_range(g, H, lam, lam_hat,
                                      config.sigma_lo, config.sigma_hi)
        return float(np.linalg.norm(result.s))
    lam_up = config.gamma_lambda * lam
    s3 = solve_shifted(g, H, lam_up)
    return max(float(np.linalg.norm(s3)), config.gamma_C * step_norm)


def trace_update(state: TraceState, step_class: StepClass,
                 config: TraceConfig, g: FloatArray, H: FloatArray) -> TraceState:
    """Apply the accept/contract/expand transition to (x, delta, Delta, sigma).

    g and H are the surrogate model used for the rejected step; the
    published transition omits them from its header but the contraction
    branch needs both.
    """
    sn = float(np.linalg.norm(state.s))
    if step_class.accepted:
        Delta_new = max(state.Delta, config.gamma_E * sn)
        delta_new = min(Delta_new, max(state.delta, config.gamma_E * sn))
        sigma_new = max(state.sigma, state.lam / sn)
        return replace(state, x=state.x + state.s, delta=delta_new,
                       Delta=Delta_new, sigma=sigma_new)
    if step_class is StepClass.CONTRACT:
        delta_new = contract(g, H, state.s, state.lam, state.sigma, config)
        return replace(state, delta=delta_new)
    # EXPAND: lam > sigma*||s|| guarantees lam/sigma > ||s|| = delta.
    delta_new = min(state.Delta, state.lam / state.sigma)
    return replace(state, delta=delta_new)


def run_minimax_trace(problem: MinimaxProblem, x0: FloatArray,
                      y_init: Optional[FloatArray], config: TraceConfig,
                      ) -> tuple[SspCertificate, list[IterationRecord], dict[StepClass, int]]:
    """Run the adaptive trust-region scheme from (x0, y_init).

    Per outer iteration: refine y and obtain a step-consistent trial
    (g_t, H_t, s_t, lam_t) at radius delta_t; stop once ||g_t|| <= eps/2 and
    lambda_min(H_t) >= -sqrt(eps)/2 (with M2 = sqrt(eps)/2 this certifies an
    (eps, sqrt(eps)) second-order stationary point); otherwise evaluate
    rho_t from surrogate objective values with the trial point refined to
    the same certified accuracy, classify, transition, and on contraction
    re-solve the subproblem at the new radius to apply the deferred sigma
    update sigma_{t+1} = max(sigma_t, lam'/||s'||).

    The y refinement computed at a rejected trial point is discarded; y_t
    is retained as the warm start.
    """
    cfg = config.validate()
    consts = problem.constants
    M2 = cfg.resolved_M2()
    eta_y = default_step_size(consts)
    x = np.array(x0, dtype=float)
    y = np.zeros(problem.dim_y) if y_init is None else np.array(y_init, dtype=float)
    delta, Delta, sigma = cfg.delta0, cfg.Delta0, cfg.sigma0

    counts = {cls: 0 for cls in StepClass}
    trajectory: list[IterationRecord] = []
    total_inner = 0
    terminated = False
    t0 = time.perf_counter()
    t = 0

    while t < cfg.max_outer:
        if cfg.max_time_s is not None and time.perf_counter() - t0 > cfg.max_time_s:
            break
        if cfg.callback is not None:
            cfg.callback(x.copy())

        radius = delta

        def provider(g: FloatArray, H: FloatArray) -> TrsSolution:
            return solve_trs(g, H, radius)

        asc = ascend_consistent(problem, x, y, provider,
                                C1=cfg.C1, C2=cfg.C2, M2=M2, step_size=eta_y)
        y = asc.y
        total_inner += asc.inner_steps
        g, H, sol = asc.g, asc.H, asc.trs
        gnorm = float(np.linalg.norm(g))
        lam_min = float(scipy.linalg.eigh(H, eigvals_only=True,
                                          subset_by_index=(0, 0),
                                          check_finite=False)[0])

        surrogate = problem.value(x, y)
        gap = None
        if problem.analytic is not None:
            gap = problem.analytic.P(x) - problem.analytic.P_star

        if gnorm <= cfg.eps / 2.0 and lam_min >= -math.sqrt(cfg.eps) / 2.0:
            terminated = True
            if cfg.record_trajectory:
                trajectory.append(IterationRecord(
                    iter=t, wall_time_s=time.perf_counter() - t0,
                    surrogate_P=surrogate, true_P_gap=gap, grad_norm=gnorm,
                    step_norm=float(np.linalg.norm(sol.s)), lam=sol.nu,
                    delta=delta, inner_iters=asc.inner_steps,
                ))
            break

        s = sol.s
        step_norm = float(np.linalg.norm(s))
        lam = sol.nu

        # Refine y at the trial point to the same certified accuracy before
        # measuring the achieved reduction.
        x_trial = x + s
        y_trial, k_trial, _ = _ascend_tolerance(problem, x_trial, y,
                                                asc.distance_bound, eta_y,
                                                200_000)
        total_inner += k_trial
        P_after = problem.value(x_trial, y_trial)
        rho = compute_rho(surrogate, P_after, step_norm)

        cls = classify(rho, cfg.eta, lam, sigma, step_norm, Delta)
        counts[cls] += 1

        state = TraceState(x=x, y=y, delta=delta, Delta=Delta, sigma=sigma,
                           s=s, lam=lam, rho=rho)
        state = trace_update(state, cls, cfg, g, H)
        if cls.accepted:
            x = state.x
            y = y_trial
        delta, Delta, sigma = state.delta, state.Delta, state.sigma

        if cls is StepClass.CONTRACT and t + 1 < cfg.max_outer:
            # Deferred sigma update from the re-solved subproblem at the
            # contracted radius (x and y unchanged on rejection).
            sol_next = solve_trs(g, H, delta)
            next_norm = float(np.linalg.norm(sol_next.s))
            if next_norm > 0:
                sigma = max(sigma, sol_next.nu / next_norm)

        if cfg.record_trajectory:
            trajectory.append(IterationRecord(
                iter=t, wall_time_s=time.perf_counter() - t0,
                surrogate_P=surrogate, true_P_gap=gap, grad_norm=gnorm,
                step_norm=step_norm, lam=lam, delta=radius, rho=rho,
                step_class=cls.value, inner_iters=asc.inner_steps + k_trial,
            ))
        t += 1

    cert = SspCertificate(
        x=x,
        grad_norm_bound=cfg.eps if terminated else math.inf,
        hessian_eigen_bound=-math.sqrt(cfg.eps) if terminated else -math.inf,
        terminated_by_dual=terminated,
        outer_iterations=t + (1 if terminated else 0),
        total_inner_iterations=total_inner,
    )
    return cert, trajectory, counts
