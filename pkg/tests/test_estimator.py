import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import special

from blockbayes import (
    HyperState,
    MarkovParams,
    ModelParams,
    ParameterError,
    PosteriorStats,
    RecoveryConfig,
    RecoveryState,
    bernoulli_gaussian_log_pdf,
    beta_update,
    binarize,
    e_step,
    gamma_update,
    init_solution,
    inverse_q,
    m_step,
    prior_pull_first,
    prior_pull_later,
    recover,
    sample_measurement_matrix,
    signal_log_posterior,
    step_size_bound,
    support_cost,
    support_cost_grad,
)
from blockbayes.oracle import finite_diff_gradient


def gradient_instance(seed, n=8, m=16):
    rng = np.random.default_rng(seed)
    phi = sample_measurement_matrix(n, m, rng)
    theta = rng.normal(size=m)
    s = rng.uniform(0.0, 1.0, m)
    y = phi @ (s * theta) + 0.3 * rng.normal(size=n)
    markov = MarkovParams(p=0.9, p01=0.09)
    return s, theta, phi, y, markov, 0.7, 0.5


def make_state(s, theta, markov, sigma_theta, sigma_n, config):
    m = s.size
    return RecoveryState(
        s_relaxed=np.asarray(s, dtype=float),
        s_binary=(np.asarray(s) > config.th_init).astype(np.int8),
        theta_hat=np.asarray(theta, dtype=float),
        sigma0=config.sigma0_init,
        th=config.th_init,
        hyper=HyperState(gamma=np.ones(m), beta=1.0 / max(sigma_n, 1e-9) ** 2),
        params=ModelParams(markov, sigma_theta, sigma_n),
        config=config,
    )


class TestInitSolution:
    def test_zero_observation(self, rng):
        phi = sample_measurement_matrix(4, 8, rng)
        w0, s0, theta0 = init_solution(phi, np.zeros(4), 0.5)
        assert not w0.any() and not s0.any() and not theta0.any()

    def test_identity_matrix(self):
        y = np.array([0.7, -0.9, 0.2])
        w0, s0, theta0 = init_solution(np.eye(3), y, 0.5)
        assert_allclose(w0, y, rtol=0)
        # support keeps entries whose magnitude clears the threshold
        assert np.array_equal(s0, [1, 1, 0])
        assert_allclose(theta0, [0.7, -0.9, 0.0], rtol=0)

    def test_minimum_norm_properties(self, rng):
        phi = sample_measurement_matrix(4, 8, rng)
        y = rng.normal(size=4)
        w0, _, _ = init_solution(phi, y, 0.5)
        assert_allclose(phi @ w0, y, atol=1e-10)
        # w0 lies in the row space: orthogonal to the null space of phi
        proj = phi.T @ np.linalg.solve(phi @ phi.T, phi @ w0)
        assert_allclose(proj, w0, atol=1e-10)

    def test_rank_deficient_warns(self):
        phi = np.vstack([np.eye(3), np.eye(3)])[:, :5][:4]  # duplicate rows
        phi = np.vstack([phi[0], phi[0], phi[1], phi[2]])
        with pytest.warns(UserWarning):
            init_solution(phi, np.array([1.0, 1.0, 0.0, 0.0]), 0.5)


class TestEStep:
    def test_empty_support(self, rng):
        phi = sample_measurement_matrix(5, 9, rng)
        stats = e_step(phi, np.zeros(9), rng.normal(size=5), 0.5, np.ones(9))
        assert_allclose(stats.mu_theta, 0.0, atol=1e-12)

    def test_orthonormal_noiseless_limit(self):
        rng = np.random.default_rng(3)
        q, _ = np.linalg.qr(rng.normal(size=(6, 6)))
        y = rng.normal(size=6)
        stats = e_step(q, np.ones(6), y, 1e-9, np.zeros(6))
        assert_allclose(stats.mu_theta, q.T @ y, atol=1e-6)

    def test_singular_system_takes_ridge_path(self):
        # duplicate columns with zero noise and zero precision make the
        # normal matrix exactly singular; the solve must stabilize and flag
        phi = np.ones((3, 2)) / np.sqrt(3.0)
        stats = e_step(phi, np.ones(2), np.ones(3), 0.0, np.zeros(2), return_cov=True)
        assert stats.ridged
        assert np.all(np.isfinite(stats.mu_theta))

    def test_dual_forms_agree_and_satisfy_normal_equations(self, rng):
        phi = sample_measurement_matrix(6, 12, rng)
        s = (rng.random(12) < 0.5).astype(float)
        y = rng.normal(size=6)
        gamma = np.ones(12)
        dual = e_step(phi, s, y, 0.1, gamma)
        primal = e_step(phi, s, y, 0.1, gamma, return_cov=True)
        assert_allclose(dual.mu_theta, primal.mu_theta, rtol=1e-8, atol=1e-12)
        assert_allclose(
            dual.sigma_theta_diag, primal.sigma_theta_diag, rtol=1e-8, atol=1e-12
        )
        psi = phi * s
        lhs = (psi.T @ psi + 0.01 * np.diag(gamma)) @ primal.mu_theta
        assert_allclose(lhs, psi.T @ y, atol=1e-8)


class TestHyperUpdates:
    def test_gamma_pinned_values(self):
        stats = PosteriorStats(np.zeros(1), np.zeros(1))
        assert_allclose(gamma_update(stats, 1e-4, 1e-4)[0], 5001.0, rtol=1e-12)
        stats = PosteriorStats(np.ones(1), np.zeros(1))
        assert_allclose(gamma_update(stats, 1e-12, 1e-12)[0], 1.0, rtol=1e-9)

    def test_gamma_matches_scalar_recompute(self, rng):
        mu = rng.normal(size=7)
        diag = rng.random(7)
        out = gamma_update(PosteriorStats(mu, diag), 1e-4, 1e-4)
        for i in range(7):
            assert_allclose(
                out[i], (1 + 2e-4) / (mu[i] ** 2 + diag[i] + 2e-4), rtol=1e-14
            )

    def test_beta_noiseless_limit(self):
        y = np.ones(4)
        psi = np.eye(4)
        stats = PosteriorStats(np.ones(4), np.zeros(4))
        gamma = np.zeros(4)  # kills the spread term since gamma * diag = 0... use 1/diag
        beta = beta_update(y, psi, stats, np.ones(4) * 0.0, 1.0, 1e-12, 1e-12)
        # residual zero, spread sum = 4 * (1 - 0) with beta_prev 1, d tiny
        assert beta == pytest.approx(1.0 / ((4.0 + 2e-12) / (4 + 2e-12)), rel=1e-9)

    def test_beta_arithmetic_example(self):
        # unit residual, vanishing spread, N = 100
        y = np.zeros(100)
        y[0] = 1.0
        psi = np.zeros((100, 3))
        stats = PosteriorStats(np.zeros(3), np.zeros(3))
        beta = beta_update(y, psi, stats, np.ones(3), 1e12, 1e-4, 1e-4)
        expected_inv = (1.0 + 3.0 / 1e12 + 2e-4) / (100 + 2e-4)
        assert_allclose(1.0 / beta, expected_inv, rtol=1e-12)

    def test_beta_matches_scalar_recompute(self, rng):
        n, m = 6, 10
        psi = rng.normal(size=(n, m))
        y = rng.normal(size=n)
        stats = PosteriorStats(rng.normal(size=m), rng.random(m))
        gamma = rng.random(m) + 0.5
        beta_prev = 2.0
        got = beta_update(y, psi, stats, gamma, beta_prev, 1e-4, 1e-4)
        resid = y - psi @ stats.mu_theta
        want_inv = (
            resid @ resid
            + np.sum(1 - gamma * stats.sigma_theta_diag) / beta_prev
            + 2e-4
        ) / (n + 2e-4)
        assert_allclose(1.0 / got, want_inv, rtol=1e-14)


class TestPriorPull:
    def test_symmetric_midpoint(self):
        assert prior_pull_first(0.5, 0.5, 1.3) == pytest.approx(0.0, abs=1e-15)

    def test_value_at_zero(self):
        p, sigma0 = 0.9, 0.8
        e = np.exp(-1.0 / (2 * sigma0**2))
        expected = (1 - p) * (-1.0) * e / (p + (1 - p) * e)
        assert_allclose(prior_pull_first(0.0, p, sigma0), expected, rtol=1e-13)

    def test_matches_unstabilized_form(self):
        p01, p10, sigma0, s = 0.09, 0.01, 1.0, 0.3
        q1, q2 = p01 + 1 - p10, p10 + 1 - p01
        e1 = np.exp(-(s**2) / (2 * sigma0**2))
        e2 = np.exp(-((s - 1) ** 2) / (2 * sigma0**2))
        naive = (q1 * s * e1 + q2 * (s - 1) * e2) / (q1 * e1 + q2 * e2)
        assert_allclose(prior_pull_later(s, p01, p10, sigma0), naive, rtol=1e-12)

    @pytest.mark.parametrize("s", [-1e6, -50.0, 50.0, 1e6, 1e160])
    def test_stable_for_extreme_arguments(self, s):
        val = prior_pull_later(s, 0.09, 0.01, 0.05)
        assert np.isfinite(val)
        # far from the anchors the pull approaches distance to the nearer one
        nearer = s if s < 0.5 else s - 1.0
        assert_allclose(val, nearer, rtol=1e-6)


class TestCostAndGradient:
    def test_gradient_matches_finite_differences(self):
        for seed in range(3):
            s, theta, phi, y, markov, sigma0, sigma_n = gradient_instance(seed)
            analytic = support_cost_grad(s, theta, phi, y, markov, sigma0, sigma_n)
            numeric = finite_diff_gradient(
                lambda x: support_cost(x, theta, phi, y, markov, sigma0, sigma_n),
                s,
                h=1e-6,
            )
            rel = np.abs(analytic - numeric) / np.maximum(np.abs(analytic), 1e-6)
            assert rel.max() < 1e-5

    def test_zero_amplitudes_leave_prior_term_only(self):
        s, theta, phi, y, markov, sigma0, sigma_n = gradient_instance(7)
        g = support_cost_grad(s, np.zeros_like(theta), phi, y, markov, sigma0, sigma_n)
        g_inf = support_cost_grad(s, theta, phi, y, markov, sigma0, 1e12)
        assert_allclose(g, g_inf, atol=1e-10)

    def test_large_noise_reduces_cost_to_prior(self):
        s, theta, phi, y, markov, sigma0, _ = gradient_instance(2)
        full = support_cost(s, theta, phi, y, markov, sigma0, 1e154)
        prior_only = support_cost(
            s, np.zeros_like(theta), phi, np.zeros_like(y), markov, sigma0, 1.0
        )
        assert_allclose(full, prior_only, rtol=1e-10)

    def test_single_coordinate_hand_evaluation(self):
        markov = MarkovParams(p=0.9, p01=0.09)
        phi = np.array([[1.0], [0.0]])
        y = np.array([0.4, 0.1])
        s, theta, sigma0, sigma_n = np.array([0.6]), np.array([0.5]), 0.8, 0.3
        mix = 0.9 * np.exp(-0.36 / (2 * 0.64)) + 0.1 * np.exp(-0.16 / (2 * 0.64))
        resid = y - phi[:, 0] * 0.6 * 0.5
        expected = np.log(mix) - resid @ resid / (2 * 0.09)
        got = support_cost(s, theta, phi, y, markov, sigma0, sigma_n)
        assert_allclose(got, expected, rtol=1e-12)

    def test_upper_bound_with_nonpositive_data_term(self):
        # per-coordinate mixtures are bounded by their weight sums: the
        # first sums to 1, later ones to 2
        for seed in range(5):
            s, theta, phi, y, markov, sigma0, sigma_n = gradient_instance(seed)
            cost = support_cost(s, theta, phi, y, markov, sigma0, sigma_n)
            assert cost <= (s.size - 1) * np.log(2.0) + 1e-12


class TestStepSizeMachinery:
    def test_inverse_q_median(self):
        assert inverse_q(0.5) == pytest.approx(0.0, abs=1e-12)

    def test_inverse_q_roundtrip(self):
        q_of_one = 0.5 * special.erfc(1.0 / np.sqrt(2.0))
        assert inverse_q(q_of_one) == pytest.approx(1.0, abs=1e-10)

    def test_inverse_q_small_tail(self):
        assert inverse_q(1e-6) == pytest.approx(4.7534, abs=1e-3)

    @pytest.mark.parametrize("bad", [0.0, 1.0, -0.2, 1.5])
    def test_inverse_q_domain(self, bad):
        with pytest.raises(ParameterError):
            inverse_q(bad)

    def test_bound_reproduces_reported_interval_endpoint(self):
        # sigma_n = 0.1 reproduces the published endpoint to four figures
        assert step_size_bound(1.0, 0.1, 1.0, 512) == pytest.approx(
            2.1434e-6, rel=1e-3
        )

    def test_bound_noise_free_limit(self):
        assert step_size_bound(1.3, 1e150, 1.0, 64) == pytest.approx(
            2 * 1.3**2, rel=1e-9
        )

    def test_bound_single_coordinate(self):
        expected = 2.0 / (1.0 + inverse_q((1 - 0.99) / 2) ** 2)
        assert step_size_bound(1.0, 1.0, 1.0, 1) == pytest.approx(expected, rel=1e-12)


class TestBinarize:
    def test_basic(self):
        assert np.array_equal(binarize(np.array([0.2, 0.6]), 0.5), [0, 1])

    def test_ties_are_inactive(self):
        assert not binarize(np.full(4, 0.5), 0.5).any()

    def test_decayed_threshold_boundary(self):
        s = np.array([0.49, 0.51])
        assert np.array_equal(binarize(s, 0.5), [0, 1])
        assert np.array_equal(binarize(s, 0.5 * 0.98), [0, 1])  # 0.49 not > 0.49

    def test_domain(self):
        with pytest.raises(ParameterError):
            binarize(np.zeros(3), 0.0)


class TestMStep:
    def test_fixed_point_when_gradient_vanishes(self, rng):
        # p = 0.5 balances the anchor weights for every coordinate, and the
        # midpoint is their common stationary point; zero amplitudes kill
        # the data term
        phi = sample_measurement_matrix(6, 12, rng)
        markov = MarkovParams(p=0.5, p01=0.3)
        config = RecoveryConfig(m_step_iters=4)
        state = make_state(
            np.full(12, 0.5), np.zeros(12), markov, 1.0, 0.5, config
        )
        before = state.s_relaxed.copy()
        m_step(state, config, phi, np.zeros(6))
        assert np.array_equal(state.s_relaxed, before)

    def test_monotone_under_auto_step(self, rng):
        for seed in range(3):
            r = np.random.default_rng([31, seed])
            phi = sample_measurement_matrix(96, 256, r)
            theta = r.normal(size=256)
            s = r.uniform(0, 1, 256)
            y = phi @ (s * theta) + 0.5 * r.normal(size=96)
            config = RecoveryConfig(m_step_iters=5)
            state = make_state(s, theta, MarkovParams(p=0.9, p01=0.09), 1.0, 0.5, config)
            m_step(state, config, phi, y)
            assert state.m_step_monotone
            assert np.min(state.last_m_costs[:, 1] - state.last_m_costs[:, 0]) >= -1e-9

    def test_oversized_step_is_flagged_or_aborts(self, rng):
        r = np.random.default_rng(77)
        phi = sample_measurement_matrix(96, 256, r)
        theta = r.normal(size=256)
        s = r.uniform(0, 1, 256)
        y = phi @ (s * theta) + 0.5 * r.normal(size=96)
        bound = step_size_bound(1.0, 0.5, 1.0, 256)
        config = RecoveryConfig(mu=1e3 * bound, mu_auto=False, m_step_iters=5)
        state = make_state(s, theta, MarkovParams(p=0.9, p01=0.09), 1.0, 0.5, config)
        try:
            m_step(state, config, phi, y)
            assert not state.m_step_monotone
        except FloatingPointError:
            pass  # an aborted ascent is also an acceptable detection

    def test_annealing_schedule_exact(self, rng):
        phi = sample_measurement_matrix(6, 12, rng)
        y = rng.normal(size=6)
        config = RecoveryConfig(m_step_iters=5, alpha=0.98)
        state = make_state(
            rng.uniform(0, 1, 12), rng.normal(size=12),
            MarkovParams(p=0.9, p01=0.09), 1.0, 0.5, config,
        )
        for k in range(1, 4):
            m_step(state, config, phi, y)
            assert state.sigma0 == config.sigma0_init * config.alpha ** (
                k * config.m_step_iters
            )


class TestSignalLogPosterior:
    def test_zero_signal_zero_observation(self, rng):
        phi = sample_measurement_matrix(4, 6, rng)
        got = signal_log_posterior(np.zeros(6), phi, np.zeros(4), 0.9, 1.0, 0.3)
        expected = 6 * bernoulli_gaussian_log_pdf(0.0, 0.9, 1.0, 0.005)
        assert_allclose(got, expected, rtol=1e-12)

    def test_concavity_probe(self, rng):
        phi = sample_measurement_matrix(5, 8, rng)
        y = rng.normal(size=5)
        for _ in range(20):
            w1 = rng.normal(size=8)
            w2 = rng.normal(size=8)
            t = rng.uniform(0.05, 0.95)
            lhs = signal_log_posterior(t * w1 + (1 - t) * w2, phi, y, 0.9, 1.0, 0.3)
            rhs = t * signal_log_posterior(w1, phi, y, 0.9, 1.0, 0.3) + (
                1 - t
            ) * signal_log_posterior(w2, phi, y, 0.9, 1.0, 0.3)
            assert lhs >= rhs - 1e-9

    def test_large_noise_reduces_to_prior(self, rng):
        phi = sample_measurement_matrix(4, 6, rng)
        y = rng.normal(size=4)
        w = rng.normal(size=6)
        got = signal_log_posterior(w, phi, y, 0.9, 1.0, 1e150)
        expected = float(np.sum(bernoulli_gaussian_log_pdf(w, 0.9, 1.0, 0.005)))
        assert_allclose(got, expected, rtol=1e-10)


class TestOuterLoopAscent:
    def test_statistical_ascent_of_signal_posterior(self):
        # drive the E/M alternation directly at fixed model parameters and
        # track the signal log posterior of the binarized iterate; the
        # E-step optimizes a support-conditioned objective, so the
        # sequence is only statistically non-decreasing
        from blockbayes import HyperState, binarize, e_step, m_step, recover
        from blockbayes.estimator import RecoveryState

        monotone = 0
        trials = 20
        for seed in range(trials):
            rng = np.random.default_rng([55, seed])
            phi = sample_measurement_matrix(12, 32, rng)
            s_true = (rng.random(32) < 0.15).astype(float)
            w_true = s_true * rng.normal(size=32)
            y = phi @ w_true + 0.05 * rng.normal(size=12)
            markov = MarkovParams(p=0.85, p01=0.4)
            config = RecoveryConfig(m_step_iters=5, noise_known=True)
            state = make_state(
                (np.abs(phi.T @ np.linalg.solve(phi @ phi.T, y)) > 0.5).astype(float),
                np.zeros(32),
                markov,
                1.0,
                0.2,
                config,
            )
            seq = []
            for outer in range(6):
                th = config.th_init * config.alpha**outer
                s_bin = binarize(state.s_relaxed, th)
                stats = e_step(phi, s_bin, y, 0.2, state.hyper.gamma)
                state.theta_hat = stats.mu_theta
                m_step(state, config, phi, y)
                w_hat = binarize(state.s_relaxed, th) * stats.mu_theta
                seq.append(signal_log_posterior(w_hat, phi, y, 0.85, 1.0, 0.2))
            if np.all(np.diff(seq) >= -1e-9):
                monotone += 1
        assert monotone / trials >= 0.9


class TestRecover:
    def test_zero_observation_converges_immediately(self, rng):
        phi = sample_measurement_matrix(6, 12, rng)
        w_hat, state = recover(phi, np.zeros(6))
        assert not w_hat.any()
        assert state.converged
        assert state.outer_iters == 1

    def test_threshold_decay_exact(self, rng):
        phi = sample_measurement_matrix(8, 20, rng)
        y = rng.normal(size=8)
        cfg = RecoveryConfig(max_outer_iters=3, outer_tol=1e-30)
        _, state = recover(phi, y, cfg)
        assert state.th == cfg.th_init * cfg.alpha**3
        assert not state.converged

    def test_nonconvergence_flag_and_trace(self, rng):
        phi = sample_measurement_matrix(8, 20, rng)
        y = rng.normal(size=8)
        cfg = RecoveryConfig(max_outer_iters=4, outer_tol=1e-30)
        _, state = recover(phi, y, cfg)
        assert len(state.trace) == 4
        assert state.trace[0].outer_iter == 1

    def test_config_validation(self):
        with pytest.raises(ParameterError):
            RecoveryConfig(alpha=1.0)
        with pytest.raises(ParameterError):
            RecoveryConfig(th_init=1.0)
        with pytest.raises(ParameterError):
            RecoveryConfig(mu=-1.0)
        with pytest.raises(ParameterError):
            RecoveryConfig(mu_auto=False, mu=None)

    def test_renormalizes_columns_with_warning(self, rng):
        phi = 2.0 * sample_measurement_matrix(5, 10, rng)
        y = rng.normal(size=5)
        with pytest.warns(UserWarning):
            recover(phi, y, RecoveryConfig(max_outer_iters=2))

    def test_precision_pruning_zeroes_amplitudes(self, rng):
        # with a prune threshold below every precision, all amplitudes are
        # treated as numerically zero
        phi = sample_measurement_matrix(6, 12, rng)
        y = rng.normal(size=6)
        w_hat, state = recover(
            phi, y, RecoveryConfig(max_outer_iters=3, gamma_prune=1e-9)
        )
        assert not state.theta_hat.any()
        assert not w_hat.any()
