"""Command-line entry point.

Subcommands: generate, recover, sweep, psd, oracle.  A config file of
plain ``key = value`` lines (same names as the flags, without dashes)
merges beneath explicitly passed flags.  Exit codes: 0 success, 1 runtime
failure, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from typing import List, Optional

import numpy as np

from .estimator import RecoveryConfig, recover
from .harness import (
    ExperimentConfig,
    draw_instance,
    run_single_trial,
    run_sweep,
    trial_rng,
    write_psd_csv,
    write_records_csv,
    write_trace_csv,
)
from .metrics import psd_periodogram
from .model import MarkovParams, ModelParams
from .oracle import dump_ranking_csv, exhaustive_map_support
from .sampling import sample_support, save_bundle, load_bundle


class UsageError(Exception):
    pass


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise UsageError(f"cannot parse boolean value {text!r}")


def _parse_floats(text: str) -> List[float]:
    return [float(tok) for tok in text.split(",") if tok.strip()]


# flag name (as written in config files, without dashes) -> converter
_CONFIG_KEYS = {
    "m": int,
    "n": int,
    "p": float,
    "p01": float,
    "sigma-theta": float,
    "snr-db": float,
    "trials": int,
    "seed": int,
    "mu": float,
    "alpha": float,
    "th": float,
    "m-step-iters": int,
    "outer-tol": float,
    "max-outer": int,
    "noise-known": _parse_bool,
    "out": str,
    "kind": str,
    "values": _parse_floats,
    "algorithm": str,
    "bundle": str,
    "trace": str,
    "ranking": str,
}

_DEFAULTS = {
    "m": 512,
    "n": 192,
    "p": 0.9,
    "p01": 0.09,
    "sigma_theta": 1.0,
    "snr_db": 15.0,
    "trials": 50,
    "seed": 0,
    "mu": None,
    "alpha": 0.98,
    "th": 0.5,
    "m_step_iters": 5,
    "outer_tol": 1e-3,
    "max_outer": 100,
    "noise_known": False,
    "out": None,
    "kind": "p01",
    "values": None,
    "algorithm": "em",
    "bundle": None,
    "trace": None,
    "ranking": None,
}


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--m", type=int)
    common.add_argument("--n", type=int)
    common.add_argument("--p", type=float)
    common.add_argument("--p01", type=float)
    common.add_argument("--sigma-theta", type=float, dest="sigma_theta")
    common.add_argument("--snr-db", type=float, dest="snr_db")
    common.add_argument("--trials", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--mu", type=float)
    common.add_argument("--alpha", type=float)
    common.add_argument("--th", type=float)
    common.add_argument("--m-step-iters", type=int, dest="m_step_iters")
    common.add_argument("--outer-tol", type=float, dest="outer_tol")
    common.add_argument("--max-outer", type=int, dest="max_outer")
    common.add_argument(
        "--noise-known", action="store_const", const=True, dest="noise_known"
    )
    common.add_argument("--out", type=str)
    common.add_argument("--config", type=str)

    parser = argparse.ArgumentParser(
        prog="blockbayes",
        description="Bayesian recovery of block-sparse signals and its Monte-Carlo harness.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("generate", parents=[common], help="emit a signal/measurement bundle")
    rec = sub.add_parser("recover", parents=[common], help="run the EM recovery")
    rec.add_argument("--bundle", type=str, help="replay a saved bundle instead of synthesizing")
    rec.add_argument("--trace", type=str, help="also write the per-iteration trace CSV here")
    rec.add_argument("--algorithm", choices=("em", "baseline"))
    sw = sub.add_parser("sweep", parents=[common], help="run a Monte-Carlo sweep")
    sw.add_argument("--kind", choices=("p01", "alpha", "th", "eta", "snr"))
    sw.add_argument("--values", type=_parse_floats, help="comma-separated sweep values")
    sw.add_argument("--algorithm", choices=("em", "baseline"))
    sub.add_parser("psd", parents=[common], help="support-process spectra for two p01 settings")
    orc = sub.add_parser("oracle", parents=[common], help="exhaustive MAP on a small instance")
    orc.add_argument("--ranking", type=str, help="dump the full enumeration table here")
    return parser


def _read_config_file(path) -> dict:
    merged = {}
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}")
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _CONFIG_KEYS:
            raise UsageError(f"{path}:{lineno}: unknown config key {key!r}")
        try:
            merged[key.replace("-", "_")] = _CONFIG_KEYS[key](value)
        except (ValueError, UsageError) as exc:
            raise UsageError(f"{path}:{lineno}: bad value for {key!r}: {exc}")
    return merged


def _effective(args: argparse.Namespace) -> dict:
    """Explicit flags win, then config-file entries, then defaults."""
    from_file = _read_config_file(args.config) if getattr(args, "config", None) else {}
    eff = dict(_DEFAULTS)
    eff.update(from_file)
    for key in _DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            eff[key] = value
    return eff


def _model_params(eff: dict, sigma_n: float = 0.0) -> ModelParams:
    return ModelParams(
        markov=MarkovParams(p=eff["p"], p01=eff["p01"]),
        sigma_theta=eff["sigma_theta"],
        sigma_n=sigma_n,
    )


def _algo_config(eff: dict) -> RecoveryConfig:
    return RecoveryConfig(
        mu=eff["mu"],
        mu_auto=eff["mu"] is None,
        alpha=eff["alpha"],
        th_init=eff["th"],
        m_step_iters=eff["m_step_iters"],
        outer_tol=eff["outer_tol"],
        max_outer_iters=eff["max_outer"],
        noise_known=eff["noise_known"],
    )


def _cmd_generate(eff: dict) -> int:
    if not eff["out"]:
        raise UsageError("generate requires --out")
    params = _model_params(eff)
    rng = trial_rng(eff["seed"], 0, 0)
    signal, meas = draw_instance(eff["m"], eff["n"], params, eff["snr_db"], rng)
    save_bundle(eff["out"], signal, meas, eff["seed"])
    print(f"wrote bundle to {eff['out']}")
    return 0


def _cmd_recover(eff: dict) -> int:
    if not eff["out"]:
        raise UsageError("recover requires --out")
    config = ExperimentConfig(
        m=eff["m"],
        n=eff["n"],
        trials=1,
        snr_db=eff["snr_db"],
        p=eff["p"],
        p01=eff["p01"],
        sigma_theta=eff["sigma_theta"],
        seed=eff["seed"],
        snr_values=(eff["snr_db"],),
        algo=_algo_config(eff),
    )
    if eff["bundle"]:
        signal, meas, _seed = load_bundle(eff["bundle"])
        guess = replace(signal.params, sigma_n=max(meas.sigma_n_realized, 1e-12))
        w_hat, state = recover(meas.phi, meas.y, config.algo, init_guess=guess, w_true=signal.w)
        from .metrics import nmse as _nmse, support_f1 as _f1
        from .harness import TrialRecord

        rec = TrialRecord(
            sweep_kind="snr",
            sweep_value=meas.snr_db,
            trial=0,
            nmse=_nmse(w_hat, signal.w),
            support_f1=_f1(w_hat != 0, signal.s),
            runtime_ms=0.0,
            outer_iters=state.outer_iters,
            converged=state.converged,
            p_hat=state.params.markov.p,
            p01_hat=state.params.markov.p01,
            sigma_theta_hat=state.params.sigma_theta,
            sigma_n_hat=state.params.sigma_n,
        )
    else:
        rec = run_single_trial(
            config, "snr", eff["snr_db"], 0, 0, recover_with=eff["algorithm"]
        )
        state = None
    write_records_csv(eff["out"], [rec])
    if eff["trace"]:
        if state is None:
            # rerun to collect the trace for the synthesized instance
            params = _model_params(eff)
            rng = trial_rng(eff["seed"], 0, 0)
            signal, meas = draw_instance(eff["m"], eff["n"], params, eff["snr_db"], rng)
            guess = replace(params, sigma_n=max(meas.sigma_n_realized, 1e-12))
            _, state = recover(meas.phi, meas.y, config.algo, init_guess=guess, w_true=signal.w)
        write_trace_csv(eff["trace"], state.trace)
    print(f"wrote record to {eff['out']}")
    return 0


def _cmd_sweep(eff: dict) -> int:
    if not eff["out"]:
        raise UsageError("sweep requires --out")
    kwargs = dict(
        m=eff["m"],
        n=eff["n"],
        trials=eff["trials"],
        snr_db=eff["snr_db"],
        p=eff["p"],
        p01=eff["p01"],
        sigma_theta=eff["sigma_theta"],
        seed=eff["seed"],
        algo=_algo_config(eff),
        out=eff["out"],
    )
    if eff["values"]:
        kwargs[f"{eff['kind']}_values"] = tuple(eff["values"])
    config = ExperimentConfig(**kwargs)
    records = run_sweep(config, eff["kind"], recover_with=eff["algorithm"])
    print(f"wrote {len(records)} records to {eff['out']}")
    return 0


def _cmd_psd(eff: dict) -> int:
    if not eff["out"]:
        raise UsageError("psd requires --out")
    n_chains, length = max(eff["trials"], 100), 4096
    panels = []
    values = eff["values"] if eff["values"] else [0.09, 0.45]
    for idx, p01 in enumerate(values):
        markov = MarkovParams(p=eff["p"], p01=p01)
        rng = trial_rng(eff["seed"], idx, 0)
        chains = np.stack(
            [sample_support(length, markov, rng) for _ in range(n_chains)]
        ).astype(float)
        freqs, power = psd_periodogram(chains)
        panels.append((f"p01={p01}", freqs, power))
    write_psd_csv(eff["out"], panels)
    print(f"wrote spectra to {eff['out']}")
    return 0


def _cmd_oracle(eff: dict) -> int:
    params = _model_params(eff)
    rng = trial_rng(eff["seed"], 0, 0)
    signal, meas = draw_instance(eff["m"], eff["n"], params, eff["snr_db"], rng)
    oracle_params = replace(params, sigma_n=max(meas.sigma_n_realized, 1e-12))
    result = exhaustive_map_support(
        meas.phi, meas.y, oracle_params, return_ranking=bool(eff["ranking"])
    )
    print(f"best support: {''.join(str(int(b)) for b in result.s_star)}")
    print(f"score: {result.score!r}")
    print(f"true support: {''.join(str(int(b)) for b in signal.s)}")
    if eff["ranking"]:
        dump_ranking_csv(result, eff["ranking"])
        print(f"wrote ranking to {eff['ranking']}")
    return 0


_COMMANDS = {
    "generate": _cmd_generate,
    "recover": _cmd_recover,
    "sweep": _cmd_sweep,
    "psd": _cmd_psd,
    "oracle": _cmd_oracle,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 0 for --help and 2 for usage errors; pass both through
        return int(exc.code or 0)
    try:
        eff = _effective(args)
        return _COMMANDS[args.command](eff)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # surface runtime failures as exit code 1
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
