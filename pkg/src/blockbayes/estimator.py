"""Annealed EM recovery of block-sparse signals.

The solver alternates two phases.  The E-step solves the amplitude MAP
problem on the current support under independent Gamma-hyperprior
precisions.  The M-step relaxes the binary support to a real vector,
models each coordinate as a two-Gaussian mixture anchored at 0 and 1 with
shrinking width sigma0, and climbs the relaxed log posterior by steepest
ascent.  A decaying threshold converts the relaxed support back to binary
between phases, and the model parameters (p, p01, sigma_theta, sigma_n)
are re-estimated from data every outer iteration.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from scipy import special

from .errors import ParameterError
from .learning import init_params as default_init_params
from .learning import update_p, update_p01, update_sigma_theta
from .model import (
    HyperState,
    MarkovParams,
    ModelParams,
    bernoulli_gaussian_log_pdf,
)

_SIGMA_N_FLOOR = 1e-12


@dataclass
class RecoveryConfig:
    """Algorithm knobs.

    mu is the manual ascent step size; with ``mu_auto`` (default) it is
    ignored and mu is set to half the analytic stability bound, recomputed
    at every M-step entry from the current sigma0 and noise estimate.
    ``alpha`` drives both the sigma0 annealing (per inner step) and the
    threshold decay (per outer iteration).  ``clip_s`` projects the
    relaxed support onto [0, 1] after every ascent step, which keeps
    manual step sizes beyond the stability bound usable.
    """

    mu: Optional[float] = None
    mu_auto: bool = True
    alpha: float = 0.98
    sigma0_init: float = 1.0
    th_init: float = 0.5
    m_step_iters: int = 5
    outer_tol: float = 1e-3
    max_outer_iters: int = 100
    noise_known: bool = False
    use_relaxed_s_in_estep: bool = False
    clip_s: bool = False
    a: float = 1e-4
    b: float = 1e-4
    c: float = 1e-4
    d: float = 1e-4
    gamma_init: float = 1.0
    gamma_prune: float = 1e5

    def __post_init__(self) -> None:
        if self.mu is not None and self.mu <= 0:
            raise ParameterError(f"mu must be > 0, got {self.mu}")
        if not self.mu_auto and self.mu is None:
            raise ParameterError("manual step size requires mu to be set")
        if not (0.6 <= self.alpha < 1.0):
            raise ParameterError(f"alpha must be in [0.6, 1), got {self.alpha}")
        if self.sigma0_init <= 0:
            raise ParameterError("sigma0_init must be > 0")
        if not (0.0 < self.th_init < 1.0):
            raise ParameterError(f"th_init must be in (0, 1), got {self.th_init}")
        if self.m_step_iters < 1:
            raise ParameterError("m_step_iters must be >= 1")
        if self.outer_tol <= 0:
            raise ParameterError("outer_tol must be > 0")

    @classmethod
    def small_problem(cls) -> "RecoveryConfig":
        """Preset for desk-scale problems (M up to a few dozen).

        Small systems need the support iterate to travel macroscopic
        distances, so a fixed step size well beyond the conservative
        stability bound is used together with per-step clipping of the
        relaxed support to [0, 1]; the admission threshold starts below
        the relaxed prior's interior rest point so coordinates missed by
        the initialization can enter the amplitude solve and be sorted by
        the data term.
        """
        return cls(
            mu=0.02,
            mu_auto=False,
            alpha=0.98,
            th_init=0.4,
            m_step_iters=20,
            outer_tol=1e-6,
            max_outer_iters=200,
            clip_s=True,
        )

    @classmethod
    def rich_support(cls) -> "RecoveryConfig":
        """Preset that starts from a permissive support and lets the
        hyperprior shrinkage sort the extra coordinates.

        A lower initial threshold admits weak entries of the minimum-norm
        start that the canonical 0.5 cutoff would drop; the learned
        per-coefficient precisions then damp the spurious ones.  This
        reliably beats the thresholded minimum-norm baseline on
        underdetermined problems at moderate SNR.
        """
        return cls(th_init=0.3, outer_tol=1e-5, max_outer_iters=60)


@dataclass
class PosteriorStats:
    """Amplitude posterior: mean, covariance diagonal, optional full cov."""

    mu_theta: np.ndarray
    sigma_theta_diag: np.ndarray
    cov: Optional[np.ndarray] = None
    ridged: bool = False


@dataclass
class TraceRow:
    outer_iter: int
    L_s: float
    L_w: float
    nmse: float
    p_hat: float
    p01_hat: float
    sigma_theta_hat: float
    sigma_n_hat: float
    sigma0: float
    th: float
    mu: float


@dataclass
class RecoveryState:
    """Mutable solver state; one instance per `recover` call."""

    s_relaxed: np.ndarray
    s_binary: np.ndarray
    theta_hat: np.ndarray
    sigma0: float
    th: float
    hyper: HyperState
    params: ModelParams
    config: RecoveryConfig
    trace: List[TraceRow] = field(default_factory=list)
    converged: bool = False
    outer_iters: int = 0
    inner_steps: int = 0
    last_m_costs: Optional[np.ndarray] = None
    m_step_monotone: bool = True
    ridge_events: int = 0


# ---------------------------------------------------------------------------
# initialization


def init_solution(
    phi: np.ndarray, y: np.ndarray, th_init: float
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Minimum-norm start: w0 = phi'(phi phi')^{-1} y, thresholded support.

    The support keeps entries whose magnitude exceeds the threshold;
    amplitudes are the masked minimum-norm values.  A rank-deficient
    Gram matrix falls back to the pseudo-inverse with a warning.
    """
    phi = np.asarray(phi, dtype=float)
    y = np.asarray(y, dtype=float)
    try:
        w0 = phi.T @ np.linalg.solve(phi @ phi.T, y)
    except np.linalg.LinAlgError:
        warnings.warn("phi phi' is rank deficient; using pseudo-inverse")
        w0 = np.linalg.pinv(phi) @ y
    s0 = (np.abs(w0) > th_init).astype(np.int8)
    return w0, s0, w0 * s0


# ---------------------------------------------------------------------------
# E-step and hyperparameter updates


def _solve_with_jitter(A: np.ndarray, B: np.ndarray) -> Tuple[np.ndarray, bool]:
    """Solve A X = B, retrying once with trace-scaled ridge jitter."""
    try:
        X = np.linalg.solve(A, B)
        if np.all(np.isfinite(X)):
            return X, False
    except np.linalg.LinAlgError:
        pass
    scale = max(float(np.trace(A)) / A.shape[0], 1.0)
    X = np.linalg.solve(A + 1e-12 * scale * np.eye(A.shape[0]), B)
    return X, True


def e_step(
    phi: np.ndarray,
    s: np.ndarray,
    y: np.ndarray,
    sigma_n: float,
    gamma: np.ndarray,
    return_cov: bool = False,
) -> PosteriorStats:
    """Amplitude MAP solve on the masked dictionary psi = phi * s.

    Two algebraically identical routes exist; the one inverting the
    smaller matrix is chosen (N x N when N < M, else M x M).  Near-singular
    systems are stabilized with a 1e-12 trace-scaled ridge and flagged.
    """
    phi = np.asarray(phi, dtype=float)
    s = np.asarray(s, dtype=float)
    y = np.asarray(y, dtype=float)
    gamma = np.asarray(gamma, dtype=float)
    N, M = phi.shape
    psi = phi * s
    sn2 = float(sigma_n) ** 2

    use_dual = N < M and np.all(gamma > 0) and not return_cov
    if use_dual:
        ginv = 1.0 / gamma
        K = sn2 * np.eye(N) + (psi * ginv) @ psi.T
        X, ridged = _solve_with_jitter(K, np.column_stack([y[:, None], psi]))
        v, KinvPsi = X[:, 0], X[:, 1:]
        mu = ginv * (psi.T @ v)
        diag = ginv - ginv**2 * np.einsum("ni,ni->i", psi, KinvPsi)
        return PosteriorStats(
            mu_theta=mu, sigma_theta_diag=np.maximum(diag, 0.0), ridged=ridged
        )

    A = psi.T @ psi + sn2 * np.diag(gamma)
    X, ridged = _solve_with_jitter(A, np.column_stack([psi.T @ y, np.eye(M)]))
    mu, Ainv = X[:, 0], X[:, 1:]
    cov = sn2 * Ainv
    return PosteriorStats(
        mu_theta=mu,
        sigma_theta_diag=np.maximum(np.diag(cov).copy(), 0.0),
        cov=cov if return_cov else None,
        ridged=ridged,
    )


def gamma_update(stats: PosteriorStats, a: float, b: float) -> np.ndarray:
    """Precision update gamma_i = (1 + 2a) / (mu_i^2 + Sigma_ii + 2b)."""
    return (1.0 + 2.0 * a) / (stats.mu_theta**2 + stats.sigma_theta_diag + 2.0 * b)


def beta_update(
    y: np.ndarray,
    psi_hat: np.ndarray,
    stats: PosteriorStats,
    gamma_prev: np.ndarray,
    beta_prev: float,
    c: float,
    d: float,
) -> float:
    """Noise precision update from the residual and posterior spread.

    1/beta_new = (||y - psi mu||^2 + (1/beta_prev) sum_i(1 - gamma_i Sigma_ii)
                  + 2 d) / (N + 2 c)
    """
    N = y.shape[0]
    resid = y - psi_hat @ stats.mu_theta
    spread = float(np.sum(1.0 - gamma_prev * stats.sigma_theta_diag))
    inv_beta = (float(resid @ resid) + spread / beta_prev + 2.0 * d) / (N + 2.0 * c)
    return 1.0 / max(inv_beta, 1e-300)


# ---------------------------------------------------------------------------
# relaxed support prior: two-Gaussian mixtures anchored at 0 and 1


def _mixture_pull(s, w_zero: float, w_one: float, sigma0: float):
    """Weighted pull of a two-anchor Gaussian mixture, evaluated stably.

    Returns (w0 s e^{e0} + w1 (s-1) e^{e1}) / (w0 e^{e0} + w1 e^{e1}) with
    e0 = -s^2/(2 sigma0^2), e1 = -(s-1)^2/(2 sigma0^2).  The exponent
    difference (1 - 2s)/(2 sigma0^2) is linear in s, so the ratio stays
    finite for arbitrarily large |s|.
    """
    s = np.asarray(s, dtype=float)
    diff = (1.0 - 2.0 * s) / (2.0 * sigma0**2)  # e0 - e1
    scale = np.exp(-np.abs(diff))
    zero_dominates = diff >= 0
    num = np.where(
        zero_dominates,
        w_zero * s + w_one * (s - 1.0) * scale,
        w_zero * s * scale + w_one * (s - 1.0),
    )
    den = np.where(
        zero_dominates,
        w_zero + w_one * scale,
        w_zero * scale + w_one,
    )
    return num / den


def _mixture_log(s, w_zero: float, w_one: float, sigma0: float):
    """log(w0 e^{-s^2/2sig^2} + w1 e^{-(s-1)^2/2sig^2}) via logaddexp.

    Gaussian normalizers are constant in s and omitted, matching the
    relaxed prior product whose gradient `_mixture_pull` represents.
    """
    s = np.asarray(s, dtype=float)
    e0 = -(s**2) / (2.0 * sigma0**2)
    e1 = -((s - 1.0) ** 2) / (2.0 * sigma0**2)
    lw0 = np.log(w_zero) if w_zero > 0 else -np.inf
    lw1 = np.log(w_one) if w_one > 0 else -np.inf
    return np.logaddexp(lw0 + e0, lw1 + e1)


def prior_pull_first(s1: float, p: float, sigma0: float) -> float:
    """Mixture pull for the first coordinate (weights p and 1-p)."""
    if sigma0 <= 0:
        raise ParameterError("sigma0 must be > 0")
    return float(_mixture_pull(s1, p, 1.0 - p, sigma0))


def prior_pull_later(si: float, p01: float, p10: float, sigma0: float) -> float:
    """Mixture pull for later coordinates (transition-sum weights).

    Weights are q1 = p01 + (1 - p10) for the zero anchor and
    q2 = p10 + (1 - p01) for the one anchor.
    """
    if sigma0 <= 0:
        raise ParameterError("sigma0 must be > 0")
    q1 = p01 + (1.0 - p10)
    q2 = p10 + (1.0 - p01)
    return float(_mixture_pull(si, q1, q2, sigma0))


def _prior_pull_vector(s: np.ndarray, markov: MarkovParams, sigma0: float) -> np.ndarray:
    pull = _mixture_pull(s, markov.q1, markov.q2, sigma0)
    pull[0] = _mixture_pull(s[0], markov.p, 1.0 - markov.p, sigma0)
    return pull


# ---------------------------------------------------------------------------
# relaxed cost, its gradient, and step-size machinery


def support_cost(
    s_relaxed: np.ndarray,
    theta_hat: np.ndarray,
    phi: np.ndarray,
    y: np.ndarray,
    markov: MarkovParams,
    sigma0: float,
    sigma_n: float,
) -> float:
    """Relaxed support log posterior.

    Sum of the per-coordinate mixture log priors plus the data term
    -||y - phi (s * theta)||^2 / (2 sigma_n^2).  `support_cost_grad` is
    its exact derivative.
    """
    s = np.asarray(s_relaxed, dtype=float)
    prior = float(np.sum(_mixture_log(s[1:], markov.q1, markov.q2, sigma0)))
    prior += float(_mixture_log(s[0], markov.p, 1.0 - markov.p, sigma0))
    resid = y - phi @ (s * theta_hat)
    return prior - float(resid @ resid) / (2.0 * sigma_n**2)


def support_cost_grad(
    s_relaxed: np.ndarray,
    theta_hat: np.ndarray,
    phi: np.ndarray,
    y: np.ndarray,
    markov: MarkovParams,
    sigma0: float,
    sigma_n: float,
) -> np.ndarray:
    """Exact gradient of :func:`support_cost` with respect to s."""
    s = np.asarray(s_relaxed, dtype=float)
    resid = y - phi @ (s * theta_hat)
    data = theta_hat * (phi.T @ resid) / sigma_n**2
    return -_prior_pull_vector(s, markov, sigma0) / sigma0**2 + data


def inverse_q(prob: float) -> float:
    """Inverse of the Gaussian upper-tail probability Q."""
    if not (0.0 < prob < 1.0):
        raise ParameterError(f"tail probability must be in (0, 1), got {prob}")
    return float(np.sqrt(2.0) * special.erfcinv(2.0 * prob))


def step_size_bound(sigma0: float, sigma_n: float, sigma_theta: float, M: int) -> float:
    """Upper endpoint of the stable ascent step-size interval.

    2 / (1/sigma0^2 + M Ms^2 / sigma_n^2) with the amplitude envelope
    Ms = sigma_theta * Qinv((1 - 0.99^(1/M)) / 2).
    """
    if sigma0 <= 0 or sigma_theta <= 0 or M < 1:
        raise ParameterError("sigma0, sigma_theta must be > 0 and M >= 1")
    sn = max(float(sigma_n), _SIGMA_N_FLOOR)
    m_star = sigma_theta * inverse_q((1.0 - 0.99 ** (1.0 / M)) / 2.0)
    return 2.0 / (1.0 / sigma0**2 + M * m_star**2 / sn**2)


def binarize(s_relaxed: np.ndarray, th: float) -> np.ndarray:
    """Strictly threshold the relaxed support: active iff s_i > th."""
    if not (0.0 < th < 1.0):
        raise ParameterError(f"threshold must be in (0, 1), got {th}")
    return (np.asarray(s_relaxed) > th).astype(np.int8)


def signal_log_posterior(
    w: np.ndarray,
    phi: np.ndarray,
    y: np.ndarray,
    p: float,
    sigma_theta: float,
    sigma_n: float,
    sigma_1: Optional[float] = None,
) -> float:
    """Smoothed log posterior of the signal itself (ascent diagnostic)."""
    if sigma_1 is None:
        sigma_1 = 0.005 * sigma_theta
    w = np.asarray(w, dtype=float)
    prior = float(np.sum(bernoulli_gaussian_log_pdf(w, p, sigma_theta, sigma_1)))
    resid = y - phi @ w
    return prior - float(resid @ resid) / (2.0 * max(sigma_n, _SIGMA_N_FLOOR) ** 2)


# ---------------------------------------------------------------------------
# M-step and the outer loop


def _current_mu(state: RecoveryState, M: int) -> float:
    cfg = state.config
    if cfg.mu_auto or cfg.mu is None:
        return 0.5 * step_size_bound(
            state.sigma0, state.params.sigma_n, state.params.sigma_theta, M
        )
    return cfg.mu


def m_step(
    state: RecoveryState,
    config: RecoveryConfig,
    phi: np.ndarray,
    y: np.ndarray,
) -> RecoveryState:
    """Run the configured number of ascent steps on the relaxed support.

    sigma0 shrinks by alpha after every step.  Per-step costs (before and
    after, both at the step's sigma0) are recorded in
    ``state.last_m_costs``; a decrease beyond 1e-9 clears
    ``state.m_step_monotone``, which indicates a step size beyond the
    stability bound.  A non-finite cost aborts.
    """
    s = np.asarray(state.s_relaxed, dtype=float).copy()
    markov = state.params.markov
    sigma_n = max(state.params.sigma_n, _SIGMA_N_FLOOR)
    mu = _current_mu(state, phi.shape[1])
    costs = np.empty((config.m_step_iters, 2))
    monotone = True
    for it in range(config.m_step_iters):
        sigma0 = config.sigma0_init * config.alpha**state.inner_steps
        before = support_cost(s, state.theta_hat, phi, y, markov, sigma0, sigma_n)
        s = s + mu * support_cost_grad(
            s, state.theta_hat, phi, y, markov, sigma0, sigma_n
        )
        if config.clip_s:
            s = np.clip(s, 0.0, 1.0)
        after = support_cost(s, state.theta_hat, phi, y, markov, sigma0, sigma_n)
        if not np.isfinite(after):
            raise FloatingPointError(
                f"support cost became non-finite at inner step {it}; "
                f"step size mu={mu:.3g} is likely too large"
            )
        costs[it] = (before, after)
        if after < before - 1e-9:
            monotone = False
        state.inner_steps += 1
    state.s_relaxed = s
    state.sigma0 = config.sigma0_init * config.alpha**state.inner_steps
    state.last_m_costs = costs
    state.m_step_monotone = monotone
    return state


def _clamped_markov(p: float, p01: float) -> MarkovParams:
    """Build a valid chain from raw estimates, clamping into the open box."""
    p = float(np.clip(p, 1e-3, 1.0 - 1e-3))
    hi = min(1.0 - 1e-3, p / (1.0 - p))  # keep the implied p10 <= 1
    p01 = float(np.clip(p01, 1e-3, hi))
    return MarkovParams(p=p, p01=p01)


def recover(
    phi: np.ndarray,
    y: np.ndarray,
    config: Optional[RecoveryConfig] = None,
    init_guess: Optional[ModelParams] = None,
    w_true: Optional[np.ndarray] = None,
) -> Tuple[np.ndarray, RecoveryState]:
    """Full EM recovery loop.

    Starts from the thresholded minimum-norm solution, then repeats
    E-step, hyperparameter updates, M-step, and parameter re-estimation
    until the relative change of the binarized signal estimate falls
    below ``outer_tol``.  Returns (w_hat, state); when the iteration cap
    is hit without convergence, w_hat is the iterate with the best
    signal log posterior and ``state.converged`` is False.
    """
    cfg = config if config is not None else RecoveryConfig()
    phi = np.asarray(phi, dtype=float)
    y = np.asarray(y, dtype=float)
    N, M = phi.shape

    norms = np.linalg.norm(phi, axis=0)
    if np.any(np.abs(norms - 1.0) > 1e-8):
        warnings.warn("phi columns are not unit norm; renormalizing")
        phi = phi / norms

    if init_guess is None:
        est = default_init_params(y, N, M)
        init_guess = ModelParams(
            markov=_clamped_markov(est.p_hat, est.p01_hat),
            sigma_theta=max(est.sigma_theta_hat, 1e-12),
            sigma_n=est.sigma_n_hat,
        )
    params = init_guess
    sigma_n = max(params.sigma_n, _SIGMA_N_FLOOR)
    hyper = HyperState(
        gamma=np.full(M, cfg.gamma_init, dtype=float),
        beta=1.0 / sigma_n**2,
        a=cfg.a,
        b=cfg.b,
        c=cfg.c,
        d=cfg.d,
    )

    w0, s0, theta0 = init_solution(phi, y, cfg.th_init)
    state = RecoveryState(
        s_relaxed=s0.astype(float),
        s_binary=s0,
        theta_hat=theta0,
        sigma0=cfg.sigma0_init,
        th=cfg.th_init,
        hyper=hyper,
        params=ModelParams(params.markov, params.sigma_theta, sigma_n),
        config=cfg,
    )

    w_prev = s0 * theta0
    best_w, best_lw = w_prev, -np.inf
    for outer in range(1, cfg.max_outer_iters + 1):
        state.outer_iters = outer
        th_cur = cfg.th_init * cfg.alpha ** (outer - 1)
        state.th = th_cur
        s_bin = binarize(state.s_relaxed, th_cur)
        state.s_binary = s_bin

        s_for_estep = state.s_relaxed if cfg.use_relaxed_s_in_estep else s_bin
        stats = e_step(phi, s_for_estep, y, state.params.sigma_n, hyper.gamma)
        state.ridge_events += int(stats.ridged)
        psi = phi * np.asarray(s_for_estep, dtype=float)
        if not cfg.noise_known:
            hyper.beta = beta_update(
                y, psi, stats, hyper.gamma, hyper.beta, cfg.c, cfg.d
            )
        hyper.gamma = gamma_update(stats, cfg.a, cfg.b)
        theta_hat = stats.mu_theta.copy()
        theta_hat[hyper.gamma > cfg.gamma_prune] = 0.0
        state.theta_hat = theta_hat

        sigma_n = state.params.sigma_n if cfg.noise_known else hyper.sigma_n
        state.params = ModelParams(state.params.markov, state.params.sigma_theta, sigma_n)

        mu_used = _current_mu(state, M)
        m_step(state, cfg, phi, y)

        # parameter estimation from the refreshed binary support; fully
        # active or fully inactive supports carry no information about the
        # chain, so the previous estimates are kept in those cases
        s_bin = binarize(state.s_relaxed, th_cur)
        state.s_binary = s_bin
        nnz = int(s_bin.sum())
        markov = state.params.markov
        sigma_theta = state.params.sigma_theta
        if 0 < nnz < M:
            markov = _clamped_markov(
                update_p(s_bin), update_p01(s_bin, markov.p01)
            )
            sigma_theta = update_sigma_theta(y, N, M, markov.p)
        state.params = ModelParams(markov, sigma_theta, sigma_n)

        w_hat = s_bin * theta_hat
        lw = signal_log_posterior(
            w_hat, phi, y, float(np.clip(markov.p, 1e-9, 1 - 1e-9)), sigma_theta,
            max(sigma_n, _SIGMA_N_FLOOR),
        )
        if np.isfinite(lw) and lw > best_lw:
            best_lw, best_w = lw, w_hat
        nmse_val = np.nan
        if w_true is not None and np.linalg.norm(w_true) > 0:
            nmse_val = float(
                np.sum((w_hat - w_true) ** 2) / np.sum(np.asarray(w_true) ** 2)
            )
        state.trace.append(
            TraceRow(
                outer_iter=outer,
                L_s=support_cost(
                    state.s_relaxed, theta_hat, phi, y, markov, state.sigma0,
                    max(sigma_n, _SIGMA_N_FLOOR),
                ),
                L_w=lw,
                nmse=nmse_val,
                p_hat=markov.p,
                p01_hat=markov.p01,
                sigma_theta_hat=sigma_theta,
                sigma_n_hat=sigma_n,
                sigma0=state.sigma0,
                th=th_cur,
                mu=mu_used,
            )
        )

        delta = float(np.linalg.norm(w_hat - w_prev))
        scale = float(np.linalg.norm(w_hat))
        w_prev = w_hat
        zero_case = scale == 0 and delta == 0 and not y.any()
        if (scale > 0 and delta / scale < cfg.outer_tol) or zero_case:
            state.converged = True
            state.th = cfg.th_init * cfg.alpha**outer
            break
        state.th = cfg.th_init * cfg.alpha**outer

    # settle amplitudes on the final binary support
    s_final = binarize(state.s_relaxed, state.th)
    stats = e_step(phi, s_final, y, state.params.sigma_n, hyper.gamma)
    theta_final = stats.mu_theta.copy()
    theta_final[hyper.gamma > cfg.gamma_prune] = 0.0
    state.s_binary = s_final
    state.theta_hat = theta_final
    w_hat = s_final * theta_final
    if not state.converged and best_lw > signal_log_posterior(
        w_hat, phi, y, float(np.clip(state.params.markov.p, 1e-9, 1 - 1e-9)),
        state.params.sigma_theta, max(state.params.sigma_n, _SIGMA_N_FLOOR),
    ):
        w_hat = best_w
    return w_hat, state
