"""Domain types for the Bernoulli-Gaussian hidden Markov signal model.

The unknown signal is w = s * theta, where s is a binary support vector
generated by a stationary first-order Markov chain and theta is an i.i.d.
zero-mean Gaussian amplitude vector.  The chain is parameterized by the
marginal inactivity probability p = Pr{s_i = 0} together with the
deactivation probability p01 = Pr{s_{i+1} = 0 | s_i = 1}; the activation
probability p10 follows from stationarity.  Mean run length of active
samples is 1/p01.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError

LOG_2PI = float(np.log(2.0 * np.pi))


@dataclass(frozen=True)
class MarkovParams:
    """Stationary two-state Markov chain for the support process.

    Parameters
    ----------
    p : float
        Marginal probability of an inactive sample, Pr{s_i = 0}.
    p01 : float
        Deactivation probability Pr{s_{i+1} = 0 | s_i = 1}.

    The activation probability ``p10`` is derived from the steady-state
    relation p01 = p * p10 / (1 - p).  The degenerate marginals p = 0 and
    p = 1 are accepted (all-active / all-inactive chains).
    """

    p: float
    p01: float
    p10: float = field(init=False)

    def __post_init__(self) -> None:
        if not (0.0 <= self.p <= 1.0):
            raise ParameterError(f"p must be in [0, 1], got {self.p}")
        if not (0.0 <= self.p01 <= 1.0):
            raise ParameterError(f"p01 must be in [0, 1], got {self.p01}")
        if self.p == 0.0:
            # All-active steady state requires no deactivations.
            if self.p01 != 0.0:
                raise ParameterError("p = 0 requires p01 = 0")
            p10 = 1.0
        elif self.p == 1.0:
            p10 = 0.0
        else:
            p10 = self.p01 * (1.0 - self.p) / self.p
            if p10 > 1.0 + 1e-12:
                raise ParameterError(
                    f"(p={self.p}, p01={self.p01}) implies p10={p10:.4g} > 1"
                )
            p10 = min(p10, 1.0)
        object.__setattr__(self, "p10", p10)

    @property
    def q1(self) -> float:
        """Weight of the zero-anchored component in the relaxed support prior."""
        return self.p01 + (1.0 - self.p10)

    @property
    def q2(self) -> float:
        """Weight of the one-anchored component in the relaxed support prior."""
        return self.p10 + (1.0 - self.p01)


@dataclass(frozen=True)
class ModelParams:
    """Full signal model: support chain, amplitude scale, noise scale."""

    markov: MarkovParams
    sigma_theta: float
    sigma_n: float

    def __post_init__(self) -> None:
        if self.sigma_theta <= 0:
            raise ParameterError(f"sigma_theta must be > 0, got {self.sigma_theta}")
        if self.sigma_n < 0:
            raise ParameterError(f"sigma_n must be >= 0, got {self.sigma_n}")


@dataclass
class HyperState:
    """Gamma-hyperprior state for the amplitude precisions and noise precision.

    gamma holds one non-negative precision per coefficient, beta is the
    noise precision 1/sigma_n^2, and (a, b) / (c, d) are the shape/rate
    constants of the Gamma hyperpriors on gamma and beta.
    """

    gamma: np.ndarray
    beta: float
    a: float = 1e-4
    b: float = 1e-4
    c: float = 1e-4
    d: float = 1e-4

    def __post_init__(self) -> None:
        self.gamma = np.asarray(self.gamma, dtype=float)
        if np.any(self.gamma < 0):
            raise ParameterError("all gamma entries must be >= 0")
        if self.beta <= 0:
            raise ParameterError(f"beta must be > 0, got {self.beta}")
        for name in ("a", "b", "c", "d"):
            if getattr(self, name) <= 0:
                raise ParameterError(f"{name} must be > 0")

    @property
    def sigma_n(self) -> float:
        return float(self.beta ** -0.5)


def bernoulli_gaussian_log_pdf(
    w, p: float, sigma_theta: float, sigma_1: float
):
    """Log density of the smoothed Bernoulli-Gaussian mixture.

    The point mass at zero is replaced by a narrow Gaussian of width
    ``sigma_1``, giving the two-component mixture
    p * N(w; 0, sigma_1^2) + (1 - p) * N(w; 0, sigma_theta^2),
    evaluated in the log domain with log-sum-exp for stability.
    """
    if not (0.0 < p < 1.0):
        raise ParameterError(f"p must be in (0, 1), got {p}")
    if sigma_theta <= 0 or sigma_1 <= 0:
        raise ParameterError("sigma_theta and sigma_1 must be > 0")
    w = np.asarray(w, dtype=float)
    log_a = np.log(p) - 0.5 * LOG_2PI - np.log(sigma_1) - w**2 / (2.0 * sigma_1**2)
    log_b = (
        np.log1p(-p)
        - 0.5 * LOG_2PI
        - np.log(sigma_theta)
        - w**2 / (2.0 * sigma_theta**2)
    )
    return np.logaddexp(log_a, log_b)


def log_support_prior(s: np.ndarray, markov: MarkovParams) -> float:
    """Exact log prior of a binary support vector under the Markov chain.

    Impossible transitions (probability zero under the chain) yield -inf.
    """
    s = np.asarray(s)
    if s.ndim != 1 or s.size == 0:
        raise ParameterError("support must be a non-empty 1-D vector")

    def safe_log(x: float) -> float:
        return float(np.log(x)) if x > 0 else -np.inf

    p, p01, p10 = markov.p, markov.p01, markov.p10
    total = safe_log(1.0 - p) if s[0] else safe_log(p)
    for prev, cur in zip(s[:-1], s[1:]):
        if prev == 0:
            total += safe_log(p10) if cur else safe_log(1.0 - p10)
        else:
            total += safe_log(1.0 - p01) if cur else safe_log(p01)
    return total
