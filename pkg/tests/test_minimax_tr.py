import math

import numpy as np
import pytest
import scipy.linalg

import minimaxtr as m
from conftest import DU10_EPS


class TestScalarQuadratic:
    EPS = 1e-2

    def run(self, x2_problem, x0=1.0, **kw):
        cfg = m.TrConfig(eps=self.EPS, **kw)
        return m.run_minimax_tr(x2_problem, np.array([x0]), None, cfg)

    def test_terminates_with_certified_gradient(self, x2_problem):
        cert, traj = self.run(x2_problem)
        assert cert.terminated_by_dual
        # analytic gradient of P(x) = x^2 at the output
        gn = np.linalg.norm(x2_problem.analytic.grad_P(cert.x))
        assert gn <= 1.75 * self.EPS

    def test_immediate_dual_test_at_stationary_start(self, x2_problem):
        cert, traj = self.run(x2_problem, x0=0.0)
        assert cert.terminated_by_dual
        assert cert.outer_iterations == 1

    def test_budget_exhaustion_flagged(self, x2_problem):
        cert, traj = self.run(x2_problem, x0=1.0, max_outer=2)
        assert not cert.terminated_by_dual
        assert cert.outer_iterations == 2

    def test_steps_capped_by_radius(self, x2_problem):
        _, traj = self.run(x2_problem)
        radius = math.sqrt(self.EPS / x2_problem.constants.H_Lip)
        assert all(r.step_norm <= radius * (1.0 + 1e-9) for r in traj)
        assert all(r.delta == radius for r in traj)

    def test_per_iteration_descent(self, x2_problem):
        cert, traj = self.run(x2_problem)
        H_Lip = x2_problem.constants.H_Lip
        thr = (1.0 / 6.0) * self.EPS**1.5 / math.sqrt(H_Lip)
        dual_thr = 2.0 * math.sqrt(self.EPS / H_Lip)
        P = x2_problem.analytic.P
        # true P along the iterate path reconstructed from recorded gaps
        values = [P(np.array([1.0]))] + \
            [r.true_P_gap + x2_problem.analytic.P_star for r in traj]
        for t, r in enumerate(traj):
            if r.lam > dual_thr:
                assert values[t] - values[t + 1] >= 0.9 * thr


class TestDuBenchmark:
    def test_reaches_neighborhood_of_optimum(self, du10_problem, du10_tr_run):
        params, problem, x0, _ = du10_problem
        cert, traj = du10_tr_run
        assert cert.terminated_by_dual
        optimum = np.full(params.n, 4.0 * params.tau)
        assert np.linalg.norm(cert.x - optimum) <= 1.0
        gap = problem.analytic.P(cert.x) - problem.analytic.P_star
        assert gap <= 1e-2

    def test_iteration_count_within_theorem_budget(self, du10_problem,
                                                   du10_tr_run):
        params, problem, x0, _ = du10_problem
        cert, _ = du10_tr_run
        consts = problem.constants
        gap0 = problem.analytic.P(x0) - problem.analytic.P_star
        cap = 6.0 * math.sqrt(consts.H_Lip) * gap0 / DU10_EPS**1.5
        assert cert.outer_iterations <= cap

    def test_certificate_bounds_hold_analytically(self, du10_problem,
                                                  du10_tr_run):
        _, problem, _, _ = du10_problem
        cert, _ = du10_tr_run
        consts = problem.constants
        gn = np.linalg.norm(problem.analytic.grad_P(cert.x))
        eig_min = scipy.linalg.eigvalsh(problem.analytic.hess_P(cert.x))[0]
        assert gn <= 1.75 * DU10_EPS
        assert eig_min >= -(13.0 / 6.0) * math.sqrt(consts.H_Lip * DU10_EPS)


def test_config_resolution_defaults():
    cfg = m.TrConfig(eps=1e-2).resolved(H_Lip=4.0)
    assert cfg.eps1 == pytest.approx(1e-2 / 12.0)
    assert cfg.eps2 == pytest.approx(math.sqrt(1e-2 * 4.0) / 6.0)
    assert cfg.radius == pytest.approx(math.sqrt(1e-2 / 4.0))


def test_config_rejects_bad_eps():
    with pytest.raises(ValueError):
        m.TrConfig(eps=0.0).resolved(H_Lip=1.0)


def test_requires_budget_when_P_unbounded():
    p = m.build_quadratic_minimax(seed=12, n=3, m=2)
    if math.isfinite(p.constants.P_lower):
        pytest.skip("seed produced a bounded instance")
    with pytest.raises(ValueError):
        m.run_minimax_tr(p, np.ones(3), None, m.TrConfig(eps=1e-2))
