"""Bayesian recovery of non-i.i.d. block-sparse signals.

The signal model is a Bernoulli-Gaussian hidden Markov model: a binary
support vector with first-order Markov correlations gates i.i.d. Gaussian
amplitudes.  The solver alternates an amplitude MAP solve with annealed
steepest-ascent updates of a continuously relaxed support, learning the
model parameters along the way.
"""

from .errors import DegenerateMetricError, DegenerateSignalError, ParameterError
from .estimator import (
    PosteriorStats,
    RecoveryConfig,
    RecoveryState,
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
    signal_log_posterior,
    step_size_bound,
    support_cost,
    support_cost_grad,
)
from .harness import ExperimentConfig, TrialRecord, run_single_trial, run_sweep
from .learning import ParamEstimate, init_params, update_p, update_p01, update_sigma_theta
from .metrics import half_power_bandwidth, nmse, nmse_db, psd_periodogram, support_f1
from .model import (
    HyperState,
    MarkovParams,
    ModelParams,
    bernoulli_gaussian_log_pdf,
    log_support_prior,
)
from .oracle import (
    OracleResult,
    exhaustive_map_support,
    finite_diff_gradient,
    minnorm_threshold_baseline,
)
from .sampling import (
    MeasurementSet,
    SignalInstance,
    compose_signal,
    generate_signal,
    load_bundle,
    sample_amplitudes,
    sample_measurement_matrix,
    sample_support,
    save_bundle,
    synthesize_measurements,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
