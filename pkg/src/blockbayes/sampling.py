"""Synthetic signal and measurement generation.

All samplers take an explicit ``numpy.random.Generator`` so that every
Monte-Carlo trial can own an independent, reproducible stream.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DegenerateSignalError, ParameterError
from .model import MarkovParams, ModelParams


@dataclass(frozen=True)
class SignalInstance:
    """Ground-truth triple (s, theta, w) with w = s * theta elementwise."""

    s: np.ndarray
    theta: np.ndarray
    w: np.ndarray
    params: Optional[ModelParams] = None


@dataclass(frozen=True)
class MeasurementSet:
    """Measurement matrix, observation, and the realized noise level.

    ``sigma_n_realized`` is ||n||_2 / sqrt(N) for the noise vector that was
    actually added, so the SNR identity holds exactly per realization.
    """

    phi: np.ndarray
    y: np.ndarray
    snr_db: float
    sigma_n_realized: float


def sample_support(M: int, markov: MarkovParams, rng: np.random.Generator) -> np.ndarray:
    """Draw a length-M binary support vector from the stationary chain.

    The first sample is Bernoulli(1 - p); each later sample is drawn from
    the transition row of its predecessor.
    """
    if M < 1:
        raise ParameterError(f"M must be >= 1, got {M}")
    s = np.empty(M, dtype=np.int8)
    u = rng.random(M)
    s[0] = u[0] < (1.0 - markov.p)
    p10, p01 = markov.p10, markov.p01
    for i in range(1, M):
        s[i] = (u[i] < p10) if s[i - 1] == 0 else (u[i] >= p01)
    return s


def sample_amplitudes(M: int, sigma_theta: float, rng: np.random.Generator) -> np.ndarray:
    """Draw M independent zero-mean Gaussian amplitudes with std sigma_theta."""
    if sigma_theta <= 0:
        raise ParameterError(f"sigma_theta must be > 0, got {sigma_theta}")
    if M < 1:
        raise ParameterError(f"M must be >= 1, got {M}")
    return rng.normal(0.0, sigma_theta, M)


def compose_signal(
    s: np.ndarray, theta: np.ndarray, params: Optional[ModelParams] = None
) -> SignalInstance:
    """Combine a support vector and amplitudes into w = s * theta."""
    s = np.asarray(s)
    theta = np.asarray(theta, dtype=float)
    if s.shape != theta.shape:
        raise ValueError(f"shape mismatch: support {s.shape} vs amplitudes {theta.shape}")
    return SignalInstance(s=s, theta=theta, w=s * theta, params=params)


def generate_signal(M: int, params: ModelParams, rng: np.random.Generator) -> SignalInstance:
    """Sample a full BGHMM signal instance."""
    s = sample_support(M, params.markov, rng)
    theta = sample_amplitudes(M, params.sigma_theta, rng)
    return compose_signal(s, theta, params)


def sample_measurement_matrix(N: int, M: int, rng: np.random.Generator) -> np.ndarray:
    """Draw an N x M matrix with entries uniform on [-1, 1] and unit-norm columns."""
    if N < 1 or M < 1:
        raise ParameterError(f"N and M must be >= 1, got ({N}, {M})")
    phi = rng.uniform(-1.0, 1.0, (N, M))
    norms = np.linalg.norm(phi, axis=0)
    while np.any(norms == 0.0):  # probability zero, but redraw to keep the contract
        bad = norms == 0.0
        phi[:, bad] = rng.uniform(-1.0, 1.0, (N, int(bad.sum())))
        norms = np.linalg.norm(phi, axis=0)
    return phi / norms


def synthesize_measurements(
    phi: np.ndarray, w: np.ndarray, snr_db: float, rng: np.random.Generator
) -> MeasurementSet:
    """Form y = phi @ w + n with the noise rescaled to hit snr_db exactly.

    The SNR convention is 20*log10(||phi w|| / ||n||) for this realization.
    snr_db = inf gives noiseless measurements.
    """
    phi = np.asarray(phi, dtype=float)
    w = np.asarray(w, dtype=float)
    N, M = phi.shape
    if w.shape != (M,):
        raise ValueError(f"signal length {w.shape} does not match phi columns {M}")
    if N >= M:
        warnings.warn(f"measurement system is not underdetermined (N={N} >= M={M})")
    clean = phi @ w
    if np.isinf(snr_db):
        return MeasurementSet(phi=phi, y=clean, snr_db=snr_db, sigma_n_realized=0.0)
    signal_norm = np.linalg.norm(clean)
    if signal_norm == 0.0:
        raise DegenerateSignalError("phi @ w vanishes; finite SNR cannot be realized")
    n = rng.normal(0.0, 1.0, N)
    n *= (signal_norm / 10.0 ** (snr_db / 20.0)) / np.linalg.norm(n)
    return MeasurementSet(
        phi=phi,
        y=clean + n,
        snr_db=snr_db,
        sigma_n_realized=float(np.linalg.norm(n) / np.sqrt(N)),
    )


# Bundle serialization: one value per line so a bundle can be replayed by
# the harness or diffed by eye.  Layout: "key = value" header lines naming
# M, N, p, p01, sigma_theta, snr_db, seed and the realized noise level,
# then "<name> <count>" section markers for s, theta, w, y and phi
# (row-major), one number per line.

_HEADER_KEYS = ("M", "N", "p", "p01", "sigma_theta", "snr_db", "seed", "sigma_n_realized")


def save_bundle(
    path,
    signal: SignalInstance,
    meas: MeasurementSet,
    seed: int,
) -> None:
    """Write a signal/measurement bundle to a text file."""
    if signal.params is None:
        raise ValueError("signal must carry its generation params to be saved")
    N, M = meas.phi.shape
    header = {
        "M": M,
        "N": N,
        "p": signal.params.markov.p,
        "p01": signal.params.markov.p01,
        "sigma_theta": signal.params.sigma_theta,
        "snr_db": meas.snr_db,
        "seed": seed,
        "sigma_n_realized": meas.sigma_n_realized,
    }
    with open(path, "w") as fh:
        for key in _HEADER_KEYS:
            value = int(header[key]) if key in ("M", "N", "seed") else float(header[key])
            fh.write(f"{key} = {value!r}\n")
        for name, arr in (
            ("s", signal.s),
            ("theta", signal.theta),
            ("w", signal.w),
            ("y", meas.y),
            ("phi", meas.phi.ravel()),
        ):
            fh.write(f"{name} {arr.size}\n")
            for v in arr:
                fh.write(f"{float(v)!r}\n")


def load_bundle(path):
    """Read a bundle written by :func:`save_bundle`.

    Returns (signal, measurements, seed).
    """
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh]
    header = {}
    idx = 0
    for idx, ln in enumerate(lines):
        if " = " not in ln:
            break
        key, val = ln.split(" = ", 1)
        header[key] = float(val) if key != "seed" else int(val)
    arrays = {}
    while idx < len(lines):
        name, count = lines[idx].split()
        count = int(count)
        vals = np.array([float(v) for v in lines[idx + 1 : idx + 1 + count]])
        arrays[name] = vals
        idx += 1 + count
    M, N = int(header["M"]), int(header["N"])
    params = ModelParams(
        markov=MarkovParams(p=header["p"], p01=header["p01"]),
        sigma_theta=header["sigma_theta"],
        sigma_n=header["sigma_n_realized"],
    )
    signal = SignalInstance(
        s=arrays["s"].astype(np.int8),
        theta=arrays["theta"],
        w=arrays["w"],
        params=params,
    )
    meas = MeasurementSet(
        phi=arrays["phi"].reshape(N, M),
        y=arrays["y"],
        snr_db=header["snr_db"],
        sigma_n_realized=header["sigma_n_realized"],
    )
    return signal, meas, int(header["seed"])
