"""Desk-scale ground-truth references.

The exhaustive search scores every one of the 2^M support patterns, so it
is capped at M <= 20 and exists purely to audit the iterative solver on
small instances.  The finite-difference helper and the thresholded
minimum-norm baseline live here for the same reason: they are the
independent sides of the package's dual-route checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

import numpy as np

from .errors import ParameterError
from .model import ModelParams, log_support_prior

EXHAUSTIVE_M_CAP = 20


@dataclass
class OracleResult:
    s_star: np.ndarray
    score: float
    ranking: Optional[List[Tuple[int, float]]] = None


def support_log_score(
    phi: np.ndarray,
    y: np.ndarray,
    s: np.ndarray,
    params: ModelParams,
    textbook_likelihood: bool = False,
) -> float:
    """Log posterior score of one binary support pattern.

    The likelihood uses the marginal covariance
    C = sigma_n^2 I + sigma_theta^2 * phi S phi^T and the unnormalized
    density exp(-y' C^{-1} y / 2) / det(C).  ``textbook_likelihood``
    switches the determinant power to the Gaussian det^{1/2}.
    """
    N = phi.shape[0]
    cov = params.sigma_n**2 * np.eye(N) + params.sigma_theta**2 * (phi * s) @ phi.T
    sign, logdet = np.linalg.slogdet(cov)
    if sign <= 0:
        raise ParameterError("support covariance is not positive definite")
    quad = float(y @ np.linalg.solve(cov, y))
    det_weight = 0.5 if textbook_likelihood else 1.0
    return log_support_prior(s, params.markov) - 0.5 * quad - det_weight * logdet


def exhaustive_map_support(
    phi: np.ndarray,
    y: np.ndarray,
    params: ModelParams,
    textbook_likelihood: bool = False,
    return_ranking: bool = False,
) -> OracleResult:
    """Maximize the support posterior over all 2^M binary patterns."""
    N, M = phi.shape
    if M > EXHAUSTIVE_M_CAP:
        raise ParameterError(
            f"exhaustive search is capped at M <= {EXHAUSTIVE_M_CAP}, got M={M}"
        )
    best_score = -np.inf
    best_s = np.zeros(M, dtype=np.int8)
    ranking: List[Tuple[int, float]] = []
    for bits in range(2**M):
        s = np.fromiter(((bits >> i) & 1 for i in range(M)), dtype=np.int8, count=M)
        score = support_log_score(phi, y, s, params, textbook_likelihood)
        if return_ranking:
            ranking.append((bits, score))
        if score > best_score:
            best_score = score
            best_s = s
    if return_ranking:
        ranking.sort(key=lambda t: -t[1])
    return OracleResult(
        s_star=best_s,
        score=float(best_score),
        ranking=ranking if return_ranking else None,
    )


def dump_ranking_csv(result: OracleResult, path) -> None:
    """Write the enumeration table as (bitmask, score) CSV rows."""
    if result.ranking is None:
        raise ValueError("oracle result was computed without return_ranking=True")
    with open(path, "w", newline="") as fh:
        fh.write("support_bitmask,score\n")
        for bits, score in result.ranking:
            fh.write(f"{bits},{score!r}\n")


def finite_diff_gradient(
    f: Callable[[np.ndarray], float], x: np.ndarray, h: float = 1e-6
) -> np.ndarray:
    """Central-difference gradient of a scalar field."""
    if h <= 0:
        raise ParameterError(f"h must be > 0, got {h}")
    x = np.asarray(x, dtype=float)
    grad = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        hi, lo = f(x + e), f(x - e)
        if not (np.isfinite(hi) and np.isfinite(lo)):
            raise FloatingPointError(f"non-finite evaluation at coordinate {i}")
        grad[i] = (hi - lo) / (2.0 * h)
    return grad


def minnorm_threshold_baseline(phi: np.ndarray, y: np.ndarray, th: float) -> np.ndarray:
    """Minimum-norm solution, magnitude thresholding, least-squares refit.

    Entries off the selected support are zero; on-support amplitudes solve
    the restricted least-squares problem.  An empty selection returns the
    zero vector.
    """
    phi = np.asarray(phi, dtype=float)
    y = np.asarray(y, dtype=float)
    N, M = phi.shape
    try:
        w0 = phi.T @ np.linalg.solve(phi @ phi.T, y)
    except np.linalg.LinAlgError:
        w0 = np.linalg.pinv(phi) @ y
    support = np.abs(w0) > th
    w_hat = np.zeros(M)
    if np.any(support):
        sub = phi[:, support]
        w_hat[support], *_ = np.linalg.lstsq(sub, y, rcond=None)
    return w_hat
