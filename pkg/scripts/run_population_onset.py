#!/usr/bin/env python3
"""Clustering onset from survey-population dynamics.

Example:
    python3 scripts/run_population_onset.py --k 3 \
        --alpha-grid 3.6 3.75 3.9 4.05 4.2 --pop-size 50000
"""

import argparse
import json

from satlab.population import sp_population_onset


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=int, default=3)
    ap.add_argument("--alpha-grid", type=float, nargs="+",
                    default=[3.6, 3.75, 3.9, 4.05, 4.2])
    ap.add_argument("--pop-size", type=int, default=50_000)
    ap.add_argument("--sweeps", type=int, default=300)
    ap.add_argument("--n-seeds", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    est = sp_population_onset(
        args.k,
        args.alpha_grid,
        P=args.pop_size,
        sweeps=args.sweeps,
        seed=args.seed,
        n_seeds=args.n_seeds,
    )
    print(
        json.dumps(
            {
                "k": args.k,
                "alpha_d": est.alpha_d,
                "bracket": list(est.bracket),
                "labels": [list(x) for x in est.labels],
            },
            indent=2,
        )
    )


if __name__ == "__main__":
    main()
