"""Performance metrics: NMSE, support F1, and support-process spectra."""

from __future__ import annotations

from typing import Optional, Tuple

import numpy as np

from .errors import DegenerateMetricError, ParameterError


def nmse(w_hat: np.ndarray, w_gen: np.ndarray) -> float:
    """Normalized mean square error ||w_hat - w_gen||^2 / ||w_gen||^2."""
    w_hat = np.asarray(w_hat, dtype=float)
    w_gen = np.asarray(w_gen, dtype=float)
    energy = float(np.sum(w_gen**2))
    if energy == 0.0:
        raise DegenerateMetricError("ground truth has zero energy")
    return float(np.sum((w_hat - w_gen) ** 2)) / energy


def nmse_db(value: float) -> float:
    return float(10.0 * np.log10(value)) if value > 0 else -np.inf


def support_f1(s_hat: np.ndarray, s_true: np.ndarray) -> float:
    """Harmonic mean of precision and recall on active positions."""
    s_hat = np.asarray(s_hat).astype(bool)
    s_true = np.asarray(s_true).astype(bool)
    if s_hat.shape != s_true.shape:
        raise ValueError("support vectors must have equal length")
    tp = int(np.sum(s_hat & s_true))
    if not s_hat.any() and not s_true.any():
        return 1.0
    denom = int(s_hat.sum()) + int(s_true.sum())
    return 2.0 * tp / denom if denom else 0.0


def psd_periodogram(
    sequences, nfft: Optional[int] = None
) -> Tuple[np.ndarray, np.ndarray]:
    """Averaged mean-removed periodogram of a batch of sequences.

    Each sequence is mean-removed and transformed with a rectangular
    window over its first ``nfft`` samples (default: full length).  The
    one-sided spectrum is normalized so the bins sum to the average
    sequence variance.  Returns (frequencies in cycles/sample, power).
    """
    x = np.atleast_2d(np.asarray(sequences, dtype=float))
    if x.size == 0 or x.shape[0] == 0:
        raise ParameterError("need at least one sequence")
    n = nfft if nfft is not None else x.shape[1]
    if x.shape[1] < n:
        raise ParameterError(f"sequences shorter than nfft={n}")
    x = x[:, :n]
    x = x - x.mean(axis=1, keepdims=True)
    spec = np.fft.rfft(x, axis=1)
    power = np.abs(spec) ** 2 / n**2
    power[:, 1:] *= 2.0
    if n % 2 == 0:
        power[:, -1] /= 2.0
    freqs = np.arange(power.shape[1]) / n
    return freqs, power.mean(axis=0)


def half_power_bandwidth(
    freqs: np.ndarray, power: np.ndarray, smooth_bins: int = 9
) -> float:
    """Smallest frequency past the spectral peak where the smoothed
    spectrum falls below half its peak value."""
    power = np.asarray(power, dtype=float)
    if smooth_bins > 1:
        kernel = np.ones(smooth_bins) / smooth_bins
        power = np.convolve(power, kernel, mode="same")
    peak_idx = int(np.argmax(power))
    below = np.nonzero(power[peak_idx:] < power[peak_idx] / 2.0)[0]
    if below.size == 0:
        return float(freqs[-1])
    return float(freqs[peak_idx + below[0]])
