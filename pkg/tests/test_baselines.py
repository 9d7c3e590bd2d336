import numpy as np
import pytest

import minimaxtr as m


class TestGda:
    def test_converges_on_scalar_quadratic(self, x2_problem):
        cfg = m.GdaConfig(eta_x=0.1, eta_y=0.1, max_iter=400, grad_tol=0.0,
                          record_every=1)
        traj = m.run_gda(x2_problem, np.array([1.0]), np.array([0.0]), cfg)
        # P(x) - P* = x^2, so a 1e-12 gap is |x| <= 1e-6
        assert traj[-1].iter <= 400
        assert traj[-1].true_P_gap <= 1e-12

    def test_stuck_on_saddle_chain(self, du10_problem):
        _, problem, x0, y0 = du10_problem
        gap0 = problem.analytic.P(x0) - problem.analytic.P_star
        cfg = m.GdaConfig(eta_x=1e-7, eta_y=1e-3, max_iter=20_000,
                          grad_tol=0.0, record_every=5000)
        traj = m.run_gda(problem, x0, y0, cfg)
        assert traj[-1].true_P_gap >= 0.999 * gap0

    def test_stationary_start_does_not_move(self, du10_problem):
        params, problem, _, _ = du10_problem
        x0 = np.full(params.n, 4.0 * params.tau)
        cfg = m.GdaConfig(eta_x=1e-4, eta_y=1e-3, max_iter=5000, grad_tol=0.0)
        traj = m.run_gda(problem, x0, np.zeros(problem.dim_y), cfg)
        # gap = L * dist^2, so staying within 1e-3 of the optimum means
        # a gap at most 2 * n * 1e-6
        assert traj[-1].true_P_gap <= 2.0 * params.n * 1e-6

    def test_rejects_bad_steps(self, x2_problem):
        with pytest.raises(ValueError):
            m.run_gda(x2_problem, np.zeros(1), np.zeros(1),
                      m.GdaConfig(eta_x=-1.0))


class TestMcn:
    def test_scalar_quadratic(self, x2_problem):
        eps = 1e-2
        cert, traj = m.run_mcn(x2_problem, np.array([1.0]), None,
                               m.McnConfig(eps=eps))
        assert cert.terminated_by_dual
        assert np.linalg.norm(x2_problem.analytic.grad_P(cert.x)) <= eps

    def test_zero_step_immediate_termination(self, x2_problem):
        cert, traj = m.run_mcn(x2_problem, np.array([0.0]), None,
                               m.McnConfig(eps=1e-2))
        assert cert.terminated_by_dual
        assert cert.outer_iterations == 1
        assert traj[-1].step_norm == 0.0

    def test_escapes_saddle_chain(self):
        params = m.DuFunctionParams(n=4, L=2.0, gamma=1.0)
        consts = m.derive_constants(ell=40.0, mu=1.0, rho=200.0 / 41.0**3,
                                    P_lower=-params.n * params.nu)
        p = m.build_du_minimax(params, dim_y=3, constants=consts)
        y0 = np.random.default_rng(1).standard_normal(3)
        cert, traj = m.run_mcn(p, m.du_default_x0(params), y0,
                               m.McnConfig(eps=1e-2))
        assert cert.terminated_by_dual
        gap = p.analytic.P(cert.x) - p.analytic.P_star
        assert gap <= 1e-2

    def test_cubic_descent_per_iteration(self):
        # exact surrogate oracles (decoupled problems) so the model-decrease
        # lemma applies iteration by iteration
        params = m.DuFunctionParams(n=4, L=2.0, gamma=1.0)
        consts = m.derive_constants(ell=40.0, mu=1.0, rho=200.0 / 41.0**3,
                                    P_lower=-params.n * params.nu)
        rng = np.random.default_rng(31)
        M4 = rng.normal(size=(4, 4))
        A = M4.T @ M4 / 4.0 + 0.2 * np.eye(4)
        problems = [
            m.build_du_minimax(params, dim_y=3, constants=consts),
            m.quadratic_minimax(A, np.zeros((4, 3)), np.eye(3)),
        ]
        starts = [m.du_default_x0(params), np.array([2.0, -1.0, 0.5, 1.5])]
        for p, x0 in zip(problems, starts):
            Mw = p.constants.H_Lip
            cert, traj = m.run_mcn(p, x0, None, m.McnConfig(eps=1e-2))
            P, P_star = p.analytic.P, p.analytic.P_star
            values = [r.true_P_gap + P_star for r in traj]
            for a, b, r in zip(values, values[1:], traj):
                assert a - b >= 0.9 * (Mw / 12.0) * r.step_norm**3

    def test_rejects_bad_config(self, x2_problem):
        with pytest.raises(ValueError):
            m.run_mcn(x2_problem, np.zeros(1), None, m.McnConfig(eps=-1.0))
        with pytest.raises(ValueError):
            m.run_mcn(x2_problem, np.zeros(1), None,
                      m.McnConfig(eps=1e-2, M=0.0))
