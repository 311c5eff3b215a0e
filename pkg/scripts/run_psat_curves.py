#!/usr/bin/env python3
"""Satisfiability-probability curves across sizes, with an optional
finite-size-scaling fit.

Examples:
    # exact 3-XORSAT curves around the threshold
    python3 scripts/run_psat_curves.py --ensemble xorsat --decider gf2_solve \
        --k 3 --n 500 1000 2000 --alpha-min 0.86 --alpha-max 0.96 \
        --alpha-step 0.005 --samples 200 --out runs/xorsat-psat --fss

    # 2-SAT curves for the window-exponent fit
    python3 scripts/run_psat_curves.py --ensemble ksat --decider dpll_complete \
        --k 2 --n 500 1000 2000 --alpha-min 0.8 --alpha-max 1.2 \
        --alpha-step 0.02 --samples 200 --out runs/2sat-psat --fss
"""

import argparse
import json

import numpy as np

from satlab.harness import ExperimentConfig, fss_fit, psat_curve


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ensemble", default="ksat")
    ap.add_argument("--decider", default="dpll_complete")
    ap.add_argument("--k", type=int, default=3)
    ap.add_argument("--n", type=int, nargs="+", required=True)
    ap.add_argument("--alpha-min", type=float, required=True)
    ap.add_argument("--alpha-max", type=float, required=True)
    ap.add_argument("--alpha-step", type=float, default=0.02)
    ap.add_argument("--samples", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", required=True)
    ap.add_argument("--fss", action="store_true")
    args = ap.parse_args()

    alphas = np.arange(args.alpha_min, args.alpha_max + 1e-12, args.alpha_step)
    config = ExperimentConfig(
        decider=args.decider,
        ensemble=args.ensemble,
        k=args.k,
        n_list=tuple(args.n),
        alphas=tuple(round(float(a), 10) for a in alphas),
        samples=args.samples,
        seed=args.seed,
    )
    table = psat_curve(config, args.out)
    print(f"curve written to {args.out}/curve.csv")
    if args.fss:
        fit = fss_fit(table)
        print(
            json.dumps(
                {
                    "alpha_c": fit.alpha_c,
                    "alpha_c_err": fit.alpha_c_err,
                    "nu": fit.nu,
                    "nu_err": fit.nu_err,
                    "smoothed": fit.smoothed,
                    "below_sharpness_bound": fit.below_sharpness_bound,
                },
                indent=2,
            )
        )


if __name__ == "__main__":
    main()
