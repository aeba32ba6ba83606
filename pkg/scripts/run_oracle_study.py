#!/usr/bin/env python3
"""Small-scale agreement study against the exhaustive MAP search.

Runs the EM recovery on M=10, N=8 instances with an expected two active
samples and reports how often the final support equals the exhaustive
optimum, plus the NMSE conditioned on agreement.
"""

import argparse

import numpy as np

from blockbayes import (
    MarkovParams,
    ModelParams,
    RecoveryConfig,
    exhaustive_map_support,
    nmse,
    recover,
)
from blockbayes.harness import draw_instance, trial_rng


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=100)
    ap.add_argument("--snr-db", type=float, default=30.0)
    ap.add_argument("--m", type=int, default=10)
    ap.add_argument("--n", type=int, default=8)
    args = ap.parse_args()

    params = ModelParams(MarkovParams(p=1 - 2 / args.m, p01=0.5), 1.0, 0.0)
    config = RecoveryConfig.small_problem()
    matches, truth_hits, cond = 0, 0, []
    for seed in range(args.seeds):
        rng = trial_rng(43, 0, seed)
        signal, meas = draw_instance(args.m, args.n, params, args.snr_db, rng)
        guess = ModelParams(params.markov, 1.0, max(meas.sigma_n_realized, 1e-12))
        w_hat, state = recover(meas.phi, meas.y, config, init_guess=guess)
        oracle = exhaustive_map_support(
            meas.phi, meas.y, ModelParams(params.markov, 1.0, max(meas.sigma_n_realized, 1e-6))
        )
        if np.array_equal(oracle.s_star.astype(int), signal.s.astype(int)):
            truth_hits += 1
        if np.array_equal(state.s_binary, oracle.s_star):
            matches += 1
            cond.append(nmse(w_hat, signal.w))
    print(f"exhaustive optimum equals the generating support: {truth_hits}/{args.seeds}")
    print(f"EM support equals the exhaustive optimum:        {matches}/{args.seeds}")
    if cond:
        print(
            f"conditional NMSE on agreement: median {np.median(cond):.2e}, "
            f"worst {max(cond):.2e}"
        )


if __name__ == "__main__":
    main()
