"""Learning rules for the signal-model parameters.

All functions here are pure: the recovery loop feeds them the current
binary support (or the raw observation) and stores the returned scalars.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError


@dataclass
class ParamEstimate:
    """Current scalar estimates of the signal-model parameters."""

    p_hat: float
    p01_hat: float
    sigma_theta_hat: float
    sigma_n_hat: float
    iteration: int = 0


def update_sigma_theta(y: np.ndarray, N: int, M: int, p_hat: float) -> float:
    """Moment estimator of the amplitude scale.

    Uses E(w_i^2) = (1 - p) sigma_theta^2 together with
    E(y_j^2) = M * E(phi_ji^2) * E(w_i^2) and E(phi_ji^2) = 1/N for
    unit-norm columns, so sigma_theta = sqrt(N * mean(y^2) / (M (1 - p))).
    """
    if 1.0 - p_hat < 1e-6:
        raise ParameterError(f"p_hat={p_hat} too close to 1 for the moment estimator")
    y = np.asarray(y, dtype=float)
    if y.size == 0:
        raise ParameterError("y must be non-empty")
    return float(np.sqrt(N * np.mean(y**2) / (M * (1.0 - p_hat))))


def update_p(s_binary: np.ndarray, activity: bool = False) -> float:
    """Inactivity probability from the current binary support.

    Returns 1 - nnz(s)/M, the fraction of inactive samples.  The
    ``activity`` flag flips to the raw activity fraction nnz(s)/M for
    comparison runs.
    """
    s = np.asarray(s_binary)
    frac_active = float(np.count_nonzero(s)) / s.size
    return frac_active if activity else 1.0 - frac_active


def update_p01(s_binary: np.ndarray, prev_p01: float = 0.0) -> float:
    """MAP update of the deactivation probability from observed transitions.

    Counts 1 -> 0 transitions relative to occupied positions among the
    first M-1 samples; with no occupied positions the previous estimate is
    returned unchanged.
    """
    s = np.asarray(s_binary, dtype=float)
    occupied = float(np.sum(s[:-1]))
    if occupied == 0.0:
        return prev_p01
    deactivations = float(np.sum(s[:-1] * (1.0 - s[1:])))
    return deactivations / occupied


def init_params(
    y: np.ndarray, N: int, M: int, p0: float = 0.75, p01_0: float = 0.1
) -> ParamEstimate:
    """Initial parameter estimates from the observation alone.

    p0 defaults to the midpoint of the admissible [0.5, 1] starting range;
    sigma_n starts at the sample standard deviation of y and sigma_theta
    at the moment estimate under p0.
    """
    if N < 2:
        raise ParameterError(f"need N >= 2 observations, got {N}")
    y = np.asarray(y, dtype=float)
    sigma_n0 = float(np.std(y))
    sigma_theta0 = float(np.sqrt(N * np.mean(y**2) / (M * (1.0 - p0))))
    return ParamEstimate(
        p_hat=p0,
        p01_hat=p01_0,
        sigma_theta_hat=sigma_theta0,
        sigma_n_hat=sigma_n0,
        iteration=0,
    )
