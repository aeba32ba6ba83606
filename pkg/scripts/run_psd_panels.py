#!/usr/bin/env python3
"""Support-process spectra for a blocky and a near-i.i.d. chain.

Writes <out>/psd.csv (label,frequency,power) and prints the measured
half-power bandwidths next to the closed-form chain values.
"""

import argparse
import os

import numpy as np

from blockbayes import MarkovParams, half_power_bandwidth, psd_periodogram, sample_support
from blockbayes.harness import trial_rng, write_psd_csv


def theory_bandwidth(p, p01, freqs):
    p10 = p01 * (1 - p) / p
    lam = 1.0 - p01 - p10
    spectrum = (1 - lam**2) / (1 - 2 * lam * np.cos(2 * np.pi * freqs) + lam**2)
    below = np.nonzero(spectrum < spectrum.max() / 2)[0]
    return freqs[below[0]] if below.size else freqs[-1]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=float, default=0.9)
    ap.add_argument("--p01", type=float, nargs="+", default=[0.09, 0.45])
    ap.add_argument("--chains", type=int, default=200)
    ap.add_argument("--length", type=int, default=4096)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--out", default="results")
    args = ap.parse_args()

    os.makedirs(args.out, exist_ok=True)
    panels = []
    for idx, p01 in enumerate(args.p01):
        markov = MarkovParams(p=args.p, p01=p01)
        rng = trial_rng(args.seed, idx, 0)
        chains = np.stack(
            [sample_support(args.length, markov, rng) for _ in range(args.chains)]
        ).astype(float)
        freqs, power = psd_periodogram(chains)
        panels.append((f"p01={p01}", freqs, power))
        measured = half_power_bandwidth(freqs, power)
        print(
            f"p01={p01}: half-power bandwidth {measured:.4f} cycles/sample "
            f"(chain theory {theory_bandwidth(args.p, p01, freqs):.4f})"
        )
    path = os.path.join(args.out, "psd.csv")
    write_psd_csv(path, panels)
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
