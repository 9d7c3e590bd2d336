"""Gradient-ascent inner loop producing y close to the maximizer y*(x).

Two accuracy regimes are supported.  The fixed-count schedule runs a
precomputed number of steps N_t chosen so the resulting gradient and
surrogate-Hessian errors stay below (eps1, eps2).  The step-consistent
regime ties the required accuracy of y to the norm of the outer trial step
it will be used to compute, resolving the circular dependence by a
fixed-point refinement loop.

Since f(x, .) is mu-strongly concave, ||y - y*(x)|| <= ||grad_y f(x,y)||/mu
serves as the computable distance certificate throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.typing import NDArray

from .problem import MinimaxProblem, ProblemConstants, schur_hessian
from .trs import TrsSolution

FloatArray = NDArray[np.float64]

DEFAULT_ASCENT_CAP = 10**6
_CONSISTENCY_CHUNK = 5_000


class AscentBudgetError(RuntimeError):
    """Tolerance-mode ascent did not reach its target within the step cap."""


class ConsistencyStallError(RuntimeError):
    """Step-consistent refinement failed to converge; the trial step is
    shrinking faster than the inner accuracy improves."""


@dataclass(frozen=True)
class AscentSchedule:
    """Inner-loop schedule.  mode is "fixed-count" or "tolerance".

    step_size defaults to 2/(ell + mu) when left unset.
    """

    mode: str
    count: int = 0
    target_dist: float = 0.0
    step_size: float | None = None

    @classmethod
    def fixed_count(cls, count: int, step_size: float | None = None) -> "AscentSchedule":
        if count < 0:
            raise ValueError(f"step count must be nonnegative, got {count}")
        return cls(mode="fixed-count", count=count, step_size=step_size)

    @classmethod
    def tolerance(cls, target_dist: float, step_size: float | None = None) -> "AscentSchedule":
        if target_dist < 0:
            raise ValueError(f"target distance must be nonnegative, got {target_dist}")
        return cls(mode="tolerance", target_dist=target_dist, step_size=step_size)


def default_step_size(constants: ProblemConstants) -> float:
    return 2.0 / (constants.ell + constants.mu)


def schedule_counts(constants: ProblemConstants, eps1: float, eps2: float,
                    dist0: float, step_norm_prev: float, t: int) -> int:
    """Number of ascent steps N_t guaranteeing the (eps1, eps2) accuracy.

    With A = min(eps1/ell, eps2/L_H),

        N_0 = ceil(kappa * ln(dist0 / A))          clamped at 0,
        N_t = ceil(kappa * ln((A + kappa * ||s_{t-1}||) / A))   for t >= 1.

    dist0 is an upper bound on ||y_init - y*(x_0)|| and is ignored for
    t >= 1.  Rejects A <= 0 (i.e. nonpositive eps1 or eps2).
    """
    A = min(eps1 / constants.ell, eps2 / constants.L_H)
    if A <= 0:
        raise ValueError(f"accuracy targets must be positive, got A={A}")
    if t < 0:
        raise ValueError(f"iteration index must be nonnegative, got {t}")
    if t == 0:
        if dist0 <= A:
            return 0
        return max(0, math.ceil(constants.kappa * math.log(dist0 / A)))
    if step_norm_prev < 0:
        raise ValueError("previous step norm must be nonnegative")
    ratio = (A + constants.kappa * step_norm_prev) / A
    return max(0, math.ceil(constants.kappa * math.log(ratio)))


def _ascend_tolerance(problem: MinimaxProblem, x: FloatArray, y: FloatArray,
                      target_dist: float, step: float,
                      max_steps: int) -> tuple[FloatArray, int, bool]:
    mu = problem.constants.mu
    grad_y = problem.grad_y
    k = 0
    gy = grad_y(x, y)
    while float(np.linalg.norm(gy)) / mu > target_dist:
        if k >= max_steps:
            return y, k, False
        y = y + step * gy
        k += 1
        gy = grad_y(x, y)
    return y, k, True


def ascend(problem: MinimaxProblem, x: FloatArray, y_start: FloatArray,
           schedule: AscentSchedule,
           max_steps: int = DEFAULT_ASCENT_CAP) -> tuple[FloatArray, int]:
    """Run gradient ascent on y |-> f(x, y) per the schedule.

    Fixed-count mode runs exactly schedule.count steps.  Tolerance mode
    iterates until ||grad_y f(x, y)||/mu <= target_dist and raises
    AscentBudgetError after max_steps.
    """
    step = schedule.step_size
    if step is None:
        step = default_step_size(problem.constants)
    y = np.asarray(y_start, dtype=float)
    if schedule.mode == "fixed-count":
        grad_y = problem.grad_y
        for _ in range(schedule.count):
            y = y + step * grad_y(x, y)
        return y, schedule.count
    if schedule.mode == "tolerance":
        y, k, met = _ascend_tolerance(problem, x, y, schedule.target_dist,
                                      step, max_steps)
        if not met:
            raise AscentBudgetError(
                f"tolerance ascent did not reach target {schedule.target_dist} "
                f"within {max_steps} steps"
            )
        return y, k
    raise ValueError(f"unknown ascent mode {schedule.mode!r}")


@dataclass(frozen=True)
class ConsistentAscent:
    """Result of the step-consistent refinement loop."""

    y: FloatArray
    g: FloatArray
    H: FloatArray
    trs: TrsSolution
    distance_bound: float
    rounds: int
    inner_steps: int


def consistency_bound(constants: ProblemConstants, step_norm: float,
                      C1: float, C2: float, M2: float) -> float:
    """Accuracy required of ||y - y*(x)|| for a trial step of given norm:
    min{C1 ||s||^2/ell, M2/ell, C2 ||s||/L_H, M2/L_H}."""
    return min(
        C1 * step_norm * step_norm / constants.ell,
        M2 / constants.ell,
        C2 * step_norm / constants.L_H,
        M2 / constants.L_H,
    )


def ascend_consistent(problem: MinimaxProblem, x: FloatArray,
                      y_start: FloatArray,
                      trial_step_provider: Callable[[FloatArray, FloatArray], TrsSolution],
                      C1: float = 1.0, C2: float = 1.0, M2: float = math.inf,
                      step_size: float | None = None,
                      max_rounds: int = 50) -> ConsistentAscent:
    """Refine y until the trial step it induces certifies its own accuracy.

    Each round evaluates (g, H) at the current y, asks the provider for a
    trial step, and checks the certified distance ||grad_y f||/mu against
    the step-dependent bound.  On failure, y is refined toward half the
    bound and the round repeats; the target halving guarantees geometric
    progress whenever the trial-step norm stabilizes.  Raises
    ConsistencyStallError after max_rounds rounds.
    """
    constants = problem.constants
    if step_size is None:
        step_size = default_step_size(constants)
    y = np.asarray(y_start, dtype=float)
    inner_steps = 0
    for round_idx in range(max_rounds):
        g = problem.grad_x(x, y)
        H = schur_hessian(problem, x, y)
        sol = trial_step_provider(g, H)
        bound = consistency_bound(constants, float(np.linalg.norm(sol.s)),
                                  C1, C2, M2)
        dist = float(np.linalg.norm(problem.grad_y(x, y))) / constants.mu
        if dist <= bound:
            return ConsistentAscent(y=y, g=g, H=H, trs=sol,
                                    distance_bound=bound,
                                    rounds=round_idx, inner_steps=inner_steps)
        y, k, _ = _ascend_tolerance(problem, x, y, 0.5 * bound, step_size,
                                    _CONSISTENCY_CHUNK)
        inner_steps += k
    raise ConsistencyStallError(
        f"consistency loop stalled after {max_rounds} rounds "
        f"(last distance {dist:.3e} vs bound {bound:.3e})"
    )
