"""Exact dense solvers for trust-region and cubic-regularized subproblems.

All solvers work from a full symmetric eigendecomposition of the model
Hessian.  At desk scale (n up to a few hundred) the O(n^3) factorization is
irrelevant next to the value of exact hard-case detection: the dual variable
returned here drives the outer algorithms' control flow, so exactness beats
speed.

The trust-region subproblem

    min_s  g^T s + (1/2) s^T H s   s.t.  ||s|| <= delta

is solved via the classical optimality system (Conn, Gould & Toint, Trust
Region Methods, 2000, Corollary 7.2.2): s is a global minimizer iff it is
feasible and there is nu >= 0 with

    (H + nu I) s = -g,    H + nu I >= 0,    nu (delta - ||s||) = 0.

On the boundary, nu is the root of the secular equation ||s(nu)|| = delta,
located by a safeguarded Newton iteration on 1/||s(nu)|| - 1/delta.  The
hard case (g orthogonal to the leading eigenspace) is resolved by adding an
explicit eigenvector component.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.linalg
from numpy.typing import NDArray

FloatArray = NDArray[np.float64]

# Relative asymmetry above this is rejected rather than silently symmetrized.
_SYM_TOL = 1e-8
# Leading-eigenspace membership and hard-case gradient threshold.
_CLUSTER_RTOL = 1e-12
_HARD_CASE_RTOL = 1e-13

_SECULAR_MAX_ITER = 120


class IndefiniteShiftError(RuntimeError):
    """H + lambda*I is not positive definite for the requested shift."""


class RangeSearchError(RuntimeError):
    """Bracket invalid for the dual-ratio bisection."""


@dataclass(frozen=True)
class TrsSolution:
    """Certified solution of the trust-region subproblem.

    nu is the multiplier in (H + nu I) s = -g.  kkt_residual is the largest
    of the scaled optimality residuals:

      * stationarity      ||(H + nu I) s + g|| / (1 + ||g||)
      * complementarity   nu |delta - ||s||| / (1 + nu delta)
      * curvature         max(0, -(lambda_min(H) + nu))
      * feasibility       max(0, ||s|| - delta) / delta
    """

    s: FloatArray
    nu: float
    on_boundary: bool
    hard_case: bool
    kkt_residual: float


def _checked_eigh(H: FloatArray) -> tuple[FloatArray, FloatArray, FloatArray]:
    H = np.asarray(H, dtype=float)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValueError(f"H must be square, got shape {H.shape}")
    scale = float(np.max(np.abs(H))) if H.size else 0.0
    asym = float(np.max(np.abs(H - H.T))) if H.size else 0.0
    if asym > _SYM_TOL * (1.0 + scale):
        raise ValueError(f"H is not symmetric (max asymmetry {asym:.3e})")
    Hs = 0.5 * (H + H.T)
    w, V = scipy.linalg.eigh(Hs, check_finite=False)
    return Hs, w, V


def _coef_norm(a: FloatArray, denom: FloatArray) -> float:
    return float(np.sqrt(np.sum((a / denom) ** 2)))


def _leading_direction(V: FloatArray, cluster: FloatArray) -> FloatArray:
    """Unit eigenvector for the smallest eigenvalue, sign-normalized so its
    first nonzero component is nonnegative (deterministic output)."""
    z = V[:, int(np.argmax(cluster))]
    nz = np.nonzero(np.abs(z) > 1e-14)[0]
    if nz.size and z[nz[0]] < 0:
        z = -z
    return z


def _kkt_residual(H: FloatArray, g: FloatArray, s: FloatArray, nu: float,
                  delta: float, lam_min: float) -> float:
    gnorm = float(np.linalg.norm(g))
    snorm = float(np.linalg.norm(s))
    stat = float(np.linalg.norm(H @ s + nu * s + g)) / (1.0 + gnorm)
    comp = nu * abs(delta - snorm) / (1.0 + nu * delta)
    curv = max(0.0, -(lam_min + nu))
    feas = max(0.0, snorm - delta) / delta
    return max(stat, comp, curv, feas)


def solve_trs(g: FloatArray, H: FloatArray, delta: float,
              tol: float = 1e-10) -> TrsSolution:
    """Global minimizer of g^T s + (1/2) s^T H s over ||s|| <= delta.

    tol controls the relative accuracy of the secular root | ||s|| - delta |.
    Rejects delta <= 0 and H with relative asymmetry above 1e-8.
    """
    if delta <= 0:
        raise ValueError(f"trust-region radius must be positive, got {delta}")
    g = np.asarray(g, dtype=float)
    Hs, w, V = _checked_eigh(H)
    a = V.T @ g
    lam1 = float(w[0])
    gnorm = float(np.linalg.norm(g))

    # Interior solution: H positive definite and the Newton step fits.
    if lam1 > 0.0:
        s_int = -(V @ (a / w))
        nrm = float(np.linalg.norm(s_int))
        if nrm <= delta * (1.0 + tol):
            return TrsSolution(
                s=s_int, nu=0.0,
                on_boundary=bool(nrm >= delta * (1.0 - 1e-9)),
                hard_case=False,
                kkt_residual=_kkt_residual(Hs, g, s_int, 0.0, delta, lam1),
            )

    cluster = w <= lam1 + _CLUSTER_RTOL * max(1.0, abs(lam1), abs(float(w[-1])))
    a_lead = float(np.sqrt(np.sum(a[cluster] ** 2)))
    outside = ~cluster

    if a_lead <= _HARD_CASE_RTOL * (1.0 + gnorm):
        # Gradient (numerically) orthogonal to the leading eigenspace.  The
        # limiting solution at nu = -lam1 drops the leading components.
        nu_h = max(0.0, -lam1)
        s_p = np.zeros_like(g)
        if np.any(outside):
            s_p = -(V[:, outside] @ (a[outside] / (w[outside] + nu_h)))
        nrm_p = float(np.linalg.norm(s_p))
        if nrm_p <= delta * (1.0 + tol):
            if lam1 < 0.0:
                # True hard case: pad to the boundary along the eigenvector.
                alpha = math.sqrt(max(delta * delta - nrm_p * nrm_p, 0.0))
                s = s_p + alpha * _leading_direction(V, cluster)
                return TrsSolution(
                    s=s, nu=nu_h, on_boundary=True, hard_case=True,
                    kkt_residual=_kkt_residual(Hs, g, s, nu_h, delta, lam1),
                )
            # lam1 >= 0 with a singular directionless gradient: minimal-norm
            # interior solution.
            return TrsSolution(
                s=s_p, nu=0.0,
                on_boundary=bool(nrm_p >= delta * (1.0 - 1e-9)),
                hard_case=False,
                kkt_residual=_kkt_residual(Hs, g, s_p, 0.0, delta, lam1),
            )
        # Leading components are negligible but the rest already overflows
        # the radius: ordinary boundary root with the cluster dropped.
        a_eff = np.where(cluster, 0.0, a)
    else:
        a_eff = a

    # Boundary solution: root of ||s(nu)|| = delta on (max(0, -lam1), inf).
    nu_lo = max(0.0, -lam1)
    a_norm = float(np.linalg.norm(a_eff))
    nu_hi = max(a_norm / delta - lam1, nu_lo + 1.0)
    while _coef_norm(a_eff, w + nu_hi) > delta and np.isfinite(nu_hi):
        nu_hi = 2.0 * nu_hi + 1.0

    nu = 0.5 * (nu_lo + nu_hi)
    lo, hi = nu_lo, nu_hi
    for _ in range(_SECULAR_MAX_ITER):
        denom = w + nu
        if np.any(denom <= 0.0):
            lo = max(lo, nu)
            nu = 0.5 * (lo + hi)
            continue
        coeffs = a_eff / denom
        nrm = float(np.sqrt(np.sum(coeffs**2)))
        if abs(nrm - delta) <= tol * delta:
            break
        if nrm > delta:
            lo = nu
        else:
            hi = nu
        # Newton step on phi(nu) = 1/||s|| - 1/delta (nearly linear in nu).
        if nrm > 0.0:
            dn2 = -2.0 * float(np.sum(coeffs**2 / denom))
            phi = 1.0 / nrm - 1.0 / delta
            dphi = -0.5 * dn2 / nrm**3
            nu_newton = nu - phi / dphi if dphi > 0 else nu
        else:
            nu_newton = nu
        nu = nu_newton if lo < nu_newton < hi else 0.5 * (lo + hi)

    s = -(V @ (a_eff / (w + nu)))
    return TrsSolution(
        s=s, nu=float(nu), on_boundary=True, hard_case=False,
        kkt_residual=_kkt_residual(Hs, g, s, float(nu), delta, lam1),
    )


def solve_shifted(g: FloatArray, H: FloatArray, lam: float) -> FloatArray:
    """Minimizer -(H + lam I)^{-1} g of the shifted quadratic model.

    Raises IndefiniteShiftError when H + lam*I is not positive definite,
    i.e. lam <= -lambda_min(H).
    """
    g = np.asarray(g, dtype=float)
    _, w, V = _checked_eigh(H)
    if float(w[0]) + lam <= 0.0:
        raise IndefiniteShiftError(
            f"H + {lam} I is indefinite (lambda_min(H) = {w[0]:.6g})"
        )
    return -(V @ ((V.T @ g) / (w + lam)))


class LambdaSearchResult(NamedTuple):
    lam: float
    s: FloatArray
    in_range: bool


def find_lambda_in_range(g: FloatArray, H: FloatArray, lambda_lo: float,
                         lambda_hi: float, sigma_lo: float, sigma_hi: float,
                         max_bisections: int = 200) -> LambdaSearchResult:
    """Bisect for lam in (lambda_lo, lambda_hi) with sigma_lo <= lam/||s(lam)|| <= sigma_hi.

    The ratio lam/||s(lam)|| is strictly increasing in lam, so plain
    bisection applies.  Preconditions (ratio below sigma_lo at lambda_lo,
    above sigma_hi at lambda_hi) are validated where evaluable; the lower
    endpoint is skipped when H + lambda_lo*I is singular (boundary/hard-case
    callers).  If the bracket does not resolve within max_bisections steps,
    the lambda_hi endpoint solution is returned flagged in_range=False.
    """
    if not (lambda_lo < lambda_hi):
        raise RangeSearchError(f"invalid bracket [{lambda_lo}, {lambda_hi}]")
    g = np.asarray(g, dtype=float)
    _, w, V = _checked_eigh(H)
    a = V.T @ g

    def ratio_and_step(lam: float) -> tuple[float, FloatArray]:
        denom = w + lam
        s = -(V @ (a / denom))
        return lam / float(np.linalg.norm(s)), s

    if float(w[0]) + lambda_lo > 0.0:
        r_lo, _ = ratio_and_step(lambda_lo)
        if r_lo >= sigma_lo:
            raise RangeSearchError(
                f"ratio at lambda_lo is {r_lo:.6g}, expected < {sigma_lo}"
            )
    r_hi, s_hi = ratio_and_step(lambda_hi)
    if r_hi <= sigma_hi:
        raise RangeSearchError(
            f"ratio at lambda_hi is {r_hi:.6g}, expected > {sigma_hi}"
        )

    lo, hi = lambda_lo, lambda_hi
    for _ in range(max_bisections):
        mid = 0.5 * (lo + hi)
        if float(w[0]) + mid <= 0.0:
            lo = mid
            continue
        r, s = ratio_and_step(mid)
        if r < sigma_lo:
            lo = mid
        elif r > sigma_hi:
            hi = mid
        else:
            return LambdaSearchResult(mid, s, True)
    return LambdaSearchResult(lambda_hi, s_hi, False)


def solve_cubic(g: FloatArray, H: FloatArray, M: float,
                tol: float = 1e-10) -> tuple[FloatArray, float]:
    """Global minimizer of g^T s + (1/2) s^T H s + (M/6) ||s||^3.

    Stationarity requires (H + (M/2)||s|| I) s = -g with the shifted matrix
    positive semidefinite (Nesterov & Polyak, 2006), so the step norm r
    solves ||(H + (M/2) r I)^{-1} g|| = r over r > max(0, -2 lambda_min/M).
    Returns (s, nu) with nu = (M/2)||s||.  Hard case handled as in
    solve_trs.
    """
    if M <= 0:
        raise ValueError(f"cubic weight must be positive, got M={M}")
    g = np.asarray(g, dtype=float)
    Hs, w, V = _checked_eigh(H)
    a = V.T @ g
    lam1 = float(w[0])
    gnorm = float(np.linalg.norm(g))

    if gnorm == 0.0 and lam1 >= 0.0:
        return np.zeros_like(g), 0.0

    r_min = max(0.0, -2.0 * lam1 / M)
    cluster = w <= lam1 + _CLUSTER_RTOL * max(1.0, abs(lam1), abs(float(w[-1])))
    a_lead = float(np.sqrt(np.sum(a[cluster] ** 2)))
    outside = ~cluster

    a_eff = a
    if lam1 < 0.0 and a_lead <= _HARD_CASE_RTOL * (1.0 + gnorm):
        nu_h = -lam1
        s_p = np.zeros_like(g)
        if np.any(outside):
            s_p = -(V[:, outside] @ (a[outside] / (w[outside] + nu_h)))
        nrm_p = float(np.linalg.norm(s_p))
        if nrm_p <= r_min * (1.0 + tol):
            alpha = math.sqrt(max(r_min * r_min - nrm_p * nrm_p, 0.0))
            s = s_p + alpha * _leading_direction(V, cluster)
            return s, nu_h
        a_eff = np.where(cluster, 0.0, a)

    # Fixed point of n(r) = ||(H + (M/2) r I)^{-1} g|| on (r_min, r_hi].
    a_norm = float(np.linalg.norm(a_eff))
    r_hi = (-lam1 + math.sqrt(lam1 * lam1 + 2.0 * M * a_norm)) / M
    r_hi = max(r_hi, r_min * (1.0 + 1e-8) + 1e-300)
    lo, hi = r_min, r_hi
    r = 0.5 * (lo + hi)
    for _ in range(_SECULAR_MAX_ITER):
        denom = w + 0.5 * M * r
        if np.any(denom <= 0.0):
            lo = max(lo, r)
            r = 0.5 * (lo + hi)
            continue
        coeffs = a_eff / denom
        n_r = float(np.sqrt(np.sum(coeffs**2)))
        if abs(n_r - r) <= tol * max(r, 1e-300):
            break
        if n_r > r:
            lo = r
        else:
            hi = r
        r = 0.5 * (lo + hi)

    nu = 0.5 * M * r
    s = -(V @ (a_eff / (w + nu)))
    return s, float(nu)
