"""Shared fixtures.  The expensive benchmark runs are session-scoped so the
module tests and the acceptance suite share a single execution."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

import minimaxtr as m
from minimaxtr import harness

REPO_ROOT = Path(__file__).resolve().parent.parent
SADDLE_CONFIG = REPO_ROOT / "configs" / "saddle_escape.json"

DU10 = dict(n=10, L=2.0, gamma=1.0)
DU10_EPS = 1e-2


def du10_calibrated_constants(params: m.DuFunctionParams) -> m.ProblemConstants:
    # ell bounds the true smoothness (~38); rho is set so H_Lip = 200, a
    # comfortable over-estimate of the measured Hessian Lipschitz constant
    # along visited trajectories (~100).
    return m.derive_constants(ell=40.0, mu=1.0, rho=200.0 / 41.0**3,
                              P_lower=-params.n * params.nu)


@pytest.fixture(scope="session")
def du10_problem():
    params = m.DuFunctionParams(**DU10)
    problem = m.build_du_minimax(params, dim_y=5,
                                 constants=du10_calibrated_constants(params))
    x0 = m.du_default_x0(params)
    y0 = np.random.default_rng(7).standard_normal(5)
    return params, problem, x0, y0


@pytest.fixture(scope="session")
def du10_tr_run(du10_problem):
    """Fixed-radius run on the 10-d benchmark, shared by module tests and
    the acceptance theorem suite."""
    _, problem, x0, y0 = du10_problem
    cert, traj = m.run_minimax_tr(problem, x0, y0,
                                  m.TrConfig(eps=DU10_EPS, max_time_s=290.0))
    return cert, traj


@pytest.fixture(scope="session")
def x2_problem():
    """The P(x) = x^2 instance (A = B = C = 1) with H_Lip configured to 1."""
    consts = m.benchmarks.scalar_double_well_constants(
        H_Lip_target=1.0, ell=float(np.sqrt(2.0)), mu=1.0, P_lower=0.0)
    return m.quadratic_minimax(np.array([[1.0]]), np.array([[1.0]]),
                               np.array([[1.0]]), constants=consts)


@pytest.fixture(scope="session")
def quartic_trace_run():
    """Adaptive run on the strongly convex quadratic-plus-quartic instance,
    with the iterate sequence captured for convergence-rate fits."""
    problem = m.build_convex_quartic_minimax(seed=11, n=6, m=4, quartic=0.1)
    rng = np.random.default_rng(111)
    x0 = rng.normal(size=6)
    x0 = 1.2 * x0 / np.linalg.norm(x0)
    y0 = rng.normal(size=4)
    iterates: list[np.ndarray] = []
    cfg = m.TraceConfig(eps=2e-6, max_outer=200, callback=iterates.append)
    cert, traj, counts = m.run_minimax_trace(problem, x0, y0, cfg)
    return problem, cert, traj, counts, iterates


@pytest.fixture(scope="session")
def saddle_experiment(tmp_path_factory):
    """The four-algorithm escape experiment (60 s wall budget each)."""
    out = tmp_path_factory.mktemp("saddle_escape")
    index = harness.run_experiment(SADDLE_CONFIG, out)
    with (out / "index.json").open() as fh:
        assert json.load(fh)["runs"]
    return out, index
