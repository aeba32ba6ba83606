"""Monte-Carlo experiment drivers and CSV emission.

Every trial owns an independent generator seeded by (master seed, sweep
index, trial index), so outputs are a pure function of the configuration
and reruns are byte-identical.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence

import numpy as np

from .errors import DegenerateSignalError, ParameterError
from .estimator import RecoveryConfig, RecoveryState, TraceRow, recover
from .metrics import nmse, nmse_db, support_f1
from .model import MarkovParams, ModelParams
from .oracle import minnorm_threshold_baseline
from .sampling import (
    MeasurementSet,
    SignalInstance,
    generate_signal,
    sample_measurement_matrix,
    synthesize_measurements,
)

SWEEP_KINDS = ("p01", "alpha", "th", "eta", "snr")

CSV_HEADER = (
    "sweep_kind,sweep_value,trial,nmse,nmse_db,support_f1,runtime_ms,"
    "outer_iters,converged,p_hat,p01_hat,sigma_theta_hat,sigma_n_hat"
)

TRACE_HEADER = (
    "outer_iter,L_s,L_w,nmse,p_hat,p01_hat,sigma_theta_hat,sigma_n_hat,sigma0,th,mu"
)


@dataclass
class ExperimentConfig:
    """Dimensions, model defaults, sweep grids, and seeding for one study."""

    m: int = 512
    n: int = 192
    trials: int = 50
    snr_db: float = 15.0
    p: float = 0.9
    p01: float = 0.09
    sigma_theta: float = 1.0
    seed: int = 0
    p01_values: Sequence[float] = (0.09, 0.18, 0.36, 0.45, 0.63, 0.9)
    alpha_values: Sequence[float] = (0.9, 0.95, 0.98, 0.99)
    th_values: Sequence[float] = (0.1, 0.3, 0.5, 0.7, 0.9)
    eta_values: Sequence[float] = (0.1, 0.2, 0.3, 0.4, 0.5)
    snr_values: Sequence[float] = (10.0, 15.0, 25.0)
    algo: RecoveryConfig = field(default_factory=RecoveryConfig)
    out: Optional[str] = None

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ParameterError("trials must be >= 1")


@dataclass
class TrialRecord:
    sweep_kind: str
    sweep_value: float
    trial: int
    nmse: float
    support_f1: float
    runtime_ms: float
    outer_iters: int
    converged: bool
    p_hat: float
    p01_hat: float
    sigma_theta_hat: float
    sigma_n_hat: float

    def csv_row(self, include_timing: bool = False) -> str:
        # wall time is not a function of (config, seed); the column is
        # zeroed unless timing output is requested, keeping CSV bytes
        # reproducible by default
        return ",".join(
            [
                self.sweep_kind,
                repr(self.sweep_value),
                str(self.trial),
                repr(self.nmse),
                repr(nmse_db(self.nmse)),
                repr(self.support_f1),
                repr(self.runtime_ms if include_timing else 0.0),
                str(self.outer_iters),
                str(int(self.converged)),
                repr(self.p_hat),
                repr(self.p01_hat),
                repr(self.sigma_theta_hat),
                repr(self.sigma_n_hat),
            ]
        )


def trial_rng(master_seed: int, sweep_index: int, trial_index: int) -> np.random.Generator:
    """Independent generator for one (sweep value, trial) cell."""
    return np.random.default_rng([master_seed, sweep_index, trial_index])


def draw_instance(
    m: int,
    n: int,
    params: ModelParams,
    snr_db: float,
    rng: np.random.Generator,
):
    """Fresh matrix, signal, and measurements; redraws all-zero signals.

    A finite SNR cannot be realized for a signal with no active samples,
    so those draws are rejected and resampled from the same stream.
    """
    phi = sample_measurement_matrix(n, m, rng)
    while True:
        signal = generate_signal(m, params, rng)
        try:
            meas = synthesize_measurements(phi, signal.w, snr_db, rng)
            return signal, meas
        except DegenerateSignalError:
            continue


def _sweep_params(config: ExperimentConfig, kind: str, value: float):
    """Model params, SNR, and algorithm config for one sweep setting."""
    p, p01 = config.p, config.p01
    snr = config.snr_db
    algo = config.algo
    if kind == "p01":
        p01 = value
    elif kind == "alpha":
        algo = replace(algo, alpha=value)
    elif kind == "th":
        algo = replace(algo, th_init=value)
    elif kind == "eta":
        # eta = expected actives / n, so p = 1 - eta n / m; p10 then follows
        # from the steady state at the fixed p01.
        p = 1.0 - value * config.n / config.m
        if not (0.0 < p < 1.0):
            raise ParameterError(f"eta={value} implies p={p} outside (0, 1)")
    elif kind == "snr":
        snr = value
    else:
        raise ParameterError(f"unknown sweep kind {kind!r}; expected one of {SWEEP_KINDS}")
    params = ModelParams(
        markov=MarkovParams(p=p, p01=p01),
        sigma_theta=config.sigma_theta,
        sigma_n=0.0,
    )
    return params, snr, algo


def run_single_trial(
    config: ExperimentConfig,
    kind: str,
    value: float,
    sweep_index: int,
    trial_index: int,
    recover_with: str = "em",
) -> TrialRecord:
    """Generate one instance and recover it; recover_with is 'em' or 'baseline'."""
    params, snr, algo = _sweep_params(config, kind, value)
    rng = trial_rng(config.seed, sweep_index, trial_index)
    signal, meas = draw_instance(config.m, config.n, params, snr, rng)
    guess = ModelParams(
        markov=params.markov,
        sigma_theta=params.sigma_theta,
        sigma_n=max(meas.sigma_n_realized, 1e-12),
    )
    start = time.perf_counter()
    if recover_with == "baseline":
        w_hat = minnorm_threshold_baseline(meas.phi, meas.y, algo.th_init)
        state = None
    else:
        w_hat, state = recover(meas.phi, meas.y, algo, init_guess=guess, w_true=signal.w)
    runtime_ms = (time.perf_counter() - start) * 1e3
    s_hat = w_hat != 0
    return TrialRecord(
        sweep_kind=kind,
        sweep_value=value,
        trial=trial_index,
        nmse=nmse(w_hat, signal.w),
        support_f1=support_f1(s_hat, signal.s),
        runtime_ms=runtime_ms,
        outer_iters=state.outer_iters if state else 0,
        converged=state.converged if state else True,
        p_hat=state.params.markov.p if state else np.nan,
        p01_hat=state.params.markov.p01 if state else np.nan,
        sigma_theta_hat=state.params.sigma_theta if state else np.nan,
        sigma_n_hat=state.params.sigma_n if state else np.nan,
    )


def run_sweep(
    config: ExperimentConfig,
    kind: str,
    recover_with: str = "em",
) -> List[TrialRecord]:
    """Run all (sweep value, trial) cells in deterministic order."""
    values = {
        "p01": config.p01_values,
        "alpha": config.alpha_values,
        "th": config.th_values,
        "eta": config.eta_values,
        "snr": config.snr_values,
    }.get(kind)
    if values is None:
        raise ParameterError(f"unknown sweep kind {kind!r}; expected one of {SWEEP_KINDS}")
    if len(values) == 0:
        raise ParameterError(f"sweep {kind!r} has an empty value list")
    records = []
    for sweep_index, value in enumerate(values):
        for trial_index in range(config.trials):
            records.append(
                run_single_trial(config, kind, value, sweep_index, trial_index, recover_with)
            )
    if config.out:
        write_records_csv(config.out, records)
    return records


def write_records_csv(
    path, records: List[TrialRecord], include_timing: bool = False
) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(CSV_HEADER + "\n")
        for rec in records:
            fh.write(rec.csv_row(include_timing) + "\n")


def write_trace_csv(path, trace: List[TraceRow]) -> None:
    """Export a recovery trace with the fixed column schema."""
    with open(path, "w", newline="") as fh:
        fh.write(TRACE_HEADER + "\n")
        for row in trace:
            fh.write(
                ",".join(
                    [
                        str(row.outer_iter),
                        repr(row.L_s),
                        repr(row.L_w),
                        repr(row.nmse),
                        repr(row.p_hat),
                        repr(row.p01_hat),
                        repr(row.sigma_theta_hat),
                        repr(row.sigma_n_hat),
                        repr(row.sigma0),
                        repr(row.th),
                        repr(row.mu),
                    ]
                )
                + "\n"
            )


def write_psd_csv(path, panels) -> None:
    """Write labeled (frequency, power) panels as long-format CSV rows.

    ``panels`` is an iterable of (label, freqs, power) triples.
    """
    with open(path, "w", newline="") as fh:
        fh.write("label,frequency,power\n")
        for label, freqs, power in panels:
            for f, p in zip(freqs, power):
                fh.write(f"{label},{f!r},{p!r}\n")
