import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import minimaxtr as m
from minimaxtr import StepClass
from oracles import random_trs_instance


def make_config(**kw):
    return m.TraceConfig(eps=1e-2, **kw).validate()


class TestComputeRho:
    def test_direct_substitution(self):
        assert m.compute_rho(1.0, 0.5, 1.0) == 0.5
        assert m.compute_rho(1.0, 1.0, 2.0) == 0.0
        assert m.compute_rho(2.0, 1.0, 0.5) == 8.0

    def test_rejects_zero_step(self):
        with pytest.raises(ValueError):
            m.compute_rho(1.0, 0.5, 0.0)

    @settings(max_examples=50, deadline=None)
    @given(st.floats(-10, 10), st.floats(-10, 10),
           st.floats(0.01, 10))
    def test_matches_definition(self, before, after, sn):
        assert m.compute_rho(before, after, sn) == (before - after) / sn**3


class TestClassify:
    def test_accept_by_dual_ratio(self):
        assert m.classify(0.5, 0.1, lam=0.0, sigma=1.0, step_norm=0.3,
                          Delta=1.0) is StepClass.ACCEPT_SIGMA

    def test_contract_on_failed_ratio(self):
        assert m.classify(0.05, 0.1, lam=0.0, sigma=1.0, step_norm=0.3,
                          Delta=1.0) is StepClass.CONTRACT

    def test_expand_on_large_dual(self):
        assert m.classify(0.5, 0.1, lam=10.0, sigma=1.0, step_norm=0.3,
                          Delta=1.0) is StepClass.EXPAND

    def test_accept_delta_on_cap(self):
        assert m.classify(0.5, 0.1, lam=10.0, sigma=1.0, step_norm=1.0,
                          Delta=1.0) is StepClass.ACCEPT_DELTA

    def test_cap_equality_uses_relative_tolerance(self):
        sn = 1.0 - 1e-10
        assert m.classify(0.5, 0.1, lam=10.0, sigma=1.0, step_norm=sn,
                          Delta=1.0) is StepClass.ACCEPT_DELTA

    @settings(max_examples=200, deadline=None)
    @given(st.floats(-2, 2), st.floats(0.01, 0.99), st.floats(0, 20),
           st.floats(0.01, 10), st.floats(0.01, 5), st.floats(0.01, 5))
    def test_matches_set_definitions(self, rho, eta, lam, sigma, sn, Delta):
        cls = m.classify(rho, eta, lam, sigma, sn, Delta)
        on_Delta = abs(sn - Delta) <= 1e-9 * max(Delta, sn)
        accept = rho >= eta and (lam <= sigma * sn or on_Delta)
        if accept:
            assert cls is (StepClass.ACCEPT_DELTA if on_Delta
                           else StepClass.ACCEPT_SIGMA)
        elif rho < eta:
            assert cls is StepClass.CONTRACT
        else:
            assert cls is StepClass.EXPAND


class TestTraceUpdate:
    def state(self, **kw):
        base = dict(x=np.zeros(2), y=np.zeros(2), delta=1.0, Delta=2.0,
                    sigma=1.0, s=np.array([1.0, 0.0]), lam=0.5, rho=0.5)
        base.update(kw)
        return m.TraceState(**base)

    def test_accept_hand_traced(self):
        # delta=1, Delta=2, sigma=1, ||s||=1, lam=0.5, gamma_E=2.5:
        # Delta' = max(2, 2.5) = 2.5; delta' = min(2.5, max(1, 2.5)) = 2.5;
        # sigma' = max(1, 0.5) = 1.
        cfg = make_config(gamma_E=2.5)
        out = m.trace_update(self.state(), StepClass.ACCEPT_SIGMA, cfg,
                             g=np.array([1.0, 0.0]), H=np.eye(2))
        assert out.Delta == 2.5
        assert out.delta == 2.5
        assert out.sigma == 1.0
        assert np.array_equal(out.x, [1.0, 0.0])

    def test_expand_capped_by_Delta(self):
        cfg = make_config()
        out = m.trace_update(self.state(lam=10.0), StepClass.EXPAND, cfg,
                             g=np.array([1.0, 0.0]), H=np.eye(2))
        assert out.delta == 2.0  # min(Delta=2, lam/sigma=10)
        assert np.array_equal(out.x, np.zeros(2))
        assert out.sigma == 1.0

    def test_contract_always_shrinks_below_step_norm(self):
        cfg = make_config()
        rng = np.random.default_rng(17)
        for i in range(120):
            n = int(rng.integers(1, 7))
            g, H, delta = random_trs_instance(rng, n, ["pd", "indef", "hard"][i % 3])
            if np.linalg.norm(g) == 0:
                continue
            sol = m.solve_trs(g, H, delta)
            sn = np.linalg.norm(sol.s)
            if sn == 0:
                continue
            st_ = self.state(x=np.zeros(n), s=sol.s, lam=sol.nu, delta=delta,
                             Delta=max(delta, 10.0), rho=-1.0)
            out = m.trace_update(st_, StepClass.CONTRACT, cfg, g=g, H=H)
            assert out.delta < sn
            assert np.array_equal(out.x, np.zeros(n))
            assert out.Delta == st_.Delta

    def test_accept_and_expand_never_shrink_delta(self):
        cfg = make_config()
        rng = np.random.default_rng(23)
        for _ in range(120):
            n = int(rng.integers(1, 7))
            g, H, delta = random_trs_instance(rng, n, "indef")
            sol = m.solve_trs(g, H, delta)
            sn = np.linalg.norm(sol.s)
            if sn == 0:
                continue
            Delta = delta * float(rng.uniform(1.0, 4.0))
            sigma = float(rng.uniform(0.1, 10.0))
            st_ = self.state(x=np.zeros(n), s=sol.s, lam=sol.nu, delta=delta,
                             Delta=Delta, sigma=sigma)
            for cls in (StepClass.ACCEPT_SIGMA, StepClass.ACCEPT_DELTA):
                out = m.trace_update(st_, cls, cfg, g=g, H=H)
                assert out.delta >= delta - 1e-12
                assert out.delta <= out.Delta
                assert out.Delta >= Delta
                assert out.sigma >= sigma
            if sol.nu > sigma * sn:
                out = m.trace_update(st_, StepClass.EXPAND, cfg, g=g, H=H)
                assert out.delta >= delta - 1e-12
                assert out.delta <= out.Delta


class TestContract:
    def test_scalar_first_branch(self):
        # H=1, g=-1, interior step at delta=2: s=1, lam=0;
        # lam_hat = sqrt(sigma_lo*|g|) = 1, s1 = 1/2, ratio 2 <= 10
        cfg = make_config(sigma_lo=1.0, sigma_hi=10.0)
        sol = m.solve_trs(np.array([-1.0]), np.array([[1.0]]), 2.0)
        assert sol.nu == 0.0
        d = m.contract(np.array([-1.0]), np.array([[1.0]]), sol.s, sol.nu,
                       sigma=1.0, config=cfg)
        assert d == pytest.approx(0.5, rel=1e-12)

    def test_second_branch_floor(self):
        # H=0.1, g=-1, delta=1: boundary step s=1 with lam=0.9 >= sigma_lo;
        # gamma_lambda=9 gives s3 = 1/(0.1+8.1) ~ 0.122, floored by
        # gamma_C*||s|| = 0.5
        cfg = make_config(sigma_lo=0.5, gamma_lambda=9.0, gamma_C=0.5)
        sol = m.solve_trs(np.array([-1.0]), np.array([[0.1]]), 1.0)
        assert sol.nu == pytest.approx(0.9, rel=1e-9)
        d = m.contract(np.array([-1.0]), np.array([[0.1]]), sol.s, sol.nu,
                       sigma=1.0, config=cfg)
        assert d == pytest.approx(0.5, rel=1e-12)

    def test_bisection_branch_lands_in_band(self):
        # force the ratio at lam_hat above sigma_hi so the banded search runs
        cfg = make_config(sigma_lo=1.0, sigma_hi=1.5)
        g = np.array([-1.0])
        H = np.array([[1.0]])
        sol = m.solve_trs(g, H, 2.0)
        d = m.contract(g, H, sol.s, sol.nu, sigma=1.0, config=cfg)
        # oracle band: lam(1+lam) in [1, 1.5] => lam in [0.618, 0.823],
        # delta = 1/(1+lam)
        assert 1.0 / 1.823 - 1e-6 <= d <= 1.0 / 1.618 + 1e-6


class TestRunMinimaxTrace:
    def test_scalar_quadratic_converges_with_newton_tail(self, x2_problem):
        cfg = m.TraceConfig(eps=1e-8)
        cert, traj, counts = m.run_minimax_trace(x2_problem, np.array([1.0]),
                                                 None, cfg)
        assert cert.terminated_by_dual
        assert np.linalg.norm(x2_problem.analytic.grad_P(cert.x)) <= 1e-8
        accepted = [r for r in traj if r.step_class in
                    ("ACCEPT_SIGMA", "ACCEPT_DELTA")]
        assert accepted, "no accepted steps recorded"
        # the terminal accepted steps are full Newton steps
        assert all(r.lam == 0.0 for r in accepted[-2:])

    def test_starts_at_optimum_terminates_fast(self):
        params = m.DuFunctionParams(n=6, L=2.0, gamma=1.0)
        consts = m.derive_constants(ell=40.0, mu=1.0, rho=200.0 / 41.0**3,
                                    P_lower=-params.n * params.nu)
        p = m.build_du_minimax(params, dim_y=3, constants=consts)
        x0 = np.full(6, 4.0 * params.tau)
        cert, traj, counts = m.run_minimax_trace(
            p, x0, None, m.TraceConfig(eps=1e-2, max_outer=5))
        assert cert.terminated_by_dual
        assert cert.outer_iterations <= 2

    def test_du_benchmark_run(self, du10_problem):
        _, problem, x0, y0 = du10_problem
        cert, traj, counts = m.run_minimax_trace(
            problem, x0, y0, m.TraceConfig(eps=1e-2))
        assert cert.terminated_by_dual
        gap = problem.analytic.P(cert.x) - problem.analytic.P_star
        assert gap <= 1e-4
        assert counts[StepClass.CONTRACT] >= 1
        assert counts[StepClass.EXPAND] >= 1

    def test_budget_exhaustion_is_flagged(self, x2_problem):
        cert, _, _ = m.run_minimax_trace(
            x2_problem, np.array([50.0]), None,
            m.TraceConfig(eps=1e-10, max_outer=1))
        assert not cert.terminated_by_dual

    def test_invalid_config_rejected(self):
        with pytest.raises(ValueError):
            m.TraceConfig(eps=1e-2, eta=1.5).validate()
        with pytest.raises(ValueError):
            m.TraceConfig(eps=1e-2, gamma_C=1.5).validate()
        with pytest.raises(ValueError):
            m.TraceConfig(eps=1e-2, delta0=5.0, Delta0=1.0).validate()
        with pytest.raises(ValueError):
            m.TraceConfig(eps=1e-2, sigma0=1e-6, sigma_lo=1e-4).validate()


class TestFullRunInvariants:
    """Trajectory-level lemmas checked on real runs."""

    def collect(self, problem, x0, y0, cfg):
        cert, traj, counts = m.run_minimax_trace(problem, x0, y0, cfg)
        return cert, traj, counts

    def runs(self, du10_problem, quartic_trace_run, x2_problem):
        _, du_problem, du_x0, du_y0 = du10_problem
        quartic_problem, _, quartic_traj, _, _ = quartic_trace_run
        cert, du_traj, _ = self.collect(du_problem, du_x0, du_y0,
                                        m.TraceConfig(eps=1e-2))
        _, x2_traj, _ = self.collect(x2_problem, np.array([30.0]), None,
                                     m.TraceConfig(eps=1e-8))
        return [du_traj, x2_traj, quartic_traj]

    def test_radius_and_acceptance_invariants(self, du10_problem,
                                              quartic_trace_run, x2_problem):
        eta = 0.1
        for traj in self.runs(du10_problem, quartic_trace_run, x2_problem):
            classified = [r for r in traj if r.step_class is not None]
            # contraction strictly shrinks the radius, nothing else does
            for a, b in zip(classified, classified[1:]):
                if a.step_class == "CONTRACT":
                    assert b.delta < a.delta
                else:
                    assert b.delta >= a.delta * (1.0 - 1e-12)
            # accepted steps achieved rho >= eta, i.e. the definitional
            # surrogate decrease of eta * ||s||^3
            for a, b in zip(traj, traj[1:]):
                if a.step_class in ("ACCEPT_SIGMA", "ACCEPT_DELTA"):
                    assert a.rho >= eta
                    assert a.surrogate_P - b.surrogate_P >= \
                        eta * a.step_norm**3 * (1.0 - 1e-9)
            # at most one expansion strictly between consecutive accepts
            accept_pos = [i for i, r in enumerate(classified)
                          if r.step_class in ("ACCEPT_SIGMA", "ACCEPT_DELTA")]
            for lo, hi in zip(accept_pos, accept_pos[1:]):
                expansions = sum(1 for r in classified[lo + 1:hi]
                                 if r.step_class == "EXPAND")
                assert expansions <= 1

    def test_dual_ratio_certificate_on_accepted_steps(self, quartic_trace_run,
                                                      x2_problem):
        # on ACCEPT_SIGMA steps the next analytic gradient is controlled by
        # (H_Lip + C1 + C2 + lam/||s||) ||s||^2; lam/||s|| <= sigma_t there,
        # so this recorded form implies the sigma_t-based bound
        runs = []
        quartic_problem, _, quartic_traj, _, quartic_iterates = quartic_trace_run
        runs.append((quartic_problem, quartic_traj, quartic_iterates))
        iterates: list[np.ndarray] = []
        _, x2_traj, _ = m.run_minimax_trace(
            x2_problem, np.array([30.0]), None,
            m.TraceConfig(eps=1e-8, callback=iterates.append))
        runs.append((x2_problem, x2_traj, iterates))
        for problem, traj, xs in runs:
            H_Lip = problem.constants.H_Lip
            checked = 0
            for k, r in enumerate(traj):
                if r.step_class != "ACCEPT_SIGMA" or k + 1 >= len(xs):
                    continue
                grad_next = np.linalg.norm(problem.analytic.grad_P(xs[k + 1]))
                bound = (H_Lip + 1.0 + 1.0) * r.step_norm**2 \
                    + r.lam * r.step_norm
                assert grad_next <= 1.1 * bound, (k, grad_next, bound)
                checked += 1
            assert checked >= 1
