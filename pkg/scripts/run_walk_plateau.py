#!/usr/bin/env python3
"""Pure-random-walk plateau scan: asymptotic unsatisfied fraction vs alpha.

Below the walk threshold the dynamics reaches a solution in linear time; above
it the energy density settles on a positive plateau.  The threshold estimate
is the interpolated vanishing point of the plateau height.

Example:
    python3 scripts/run_walk_plateau.py --n 10000 --alpha-min 2.4 \
        --alpha-max 3.0 --alpha-step 0.1 --runs 3 --out plateau.csv
"""

import argparse
import csv

import numpy as np

from satlab.generators import EnsembleSpec, gen_formula
from satlab.rng import RngSeed
from satlab.walk import prwsat


def plateau_height(alpha, n, runs, t_mult, k, seed) -> tuple[float, float]:
    """Mean unsatisfied fraction over the second half of a fixed time window
    (zero when a solution is found first), averaged over instances."""
    vals = []
    base = RngSeed(seed).spawn(int(round(alpha * 1000)))
    for r in range(runs):
        f = gen_formula(
            EnsembleSpec("ksat", n=n, k=k, alpha=alpha, seed=base.spawn(r, 0))
        )
        out = prwsat(f, t_max=t_mult * f.n_clauses, seed=base.spawn(r, 1))
        if out.status == "solution":
            vals.append(0.0)
        else:
            tr = out.trajectory
            window = tr.T > 0.5 * tr.T[-1]
            vals.append(float(tr.phi[window].mean()))
    return float(np.mean(vals)), float(np.std(vals))


def vanishing_point(alphas, heights, eps=1e-4) -> float | None:
    """Interpolated alpha where the plateau height first exceeds eps."""
    for i in range(1, len(alphas)):
        if heights[i - 1] <= eps < heights[i]:
            a0, a1, h0, h1 = alphas[i - 1], alphas[i], heights[i - 1], heights[i]
            return a0 + (a1 - a0) * (eps - h0) / (h1 - h0)
    return None


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=10_000)
    ap.add_argument("--k", type=int, default=3)
    ap.add_argument("--alpha-min", type=float, default=2.4)
    ap.add_argument("--alpha-max", type=float, default=3.0)
    ap.add_argument("--alpha-step", type=float, default=0.1)
    ap.add_argument("--runs", type=int, default=3)
    ap.add_argument("--t-mult", type=int, default=100,
                    help="time budget in units of the clause count")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="plateau.csv")
    args = ap.parse_args()

    alphas = list(np.arange(args.alpha_min, args.alpha_max + 1e-12, args.alpha_step))
    heights = []
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["alpha", "phi_as", "std"])
        for a in alphas:
            h, s = plateau_height(a, args.n, args.runs, args.t_mult, args.k, args.seed)
            heights.append(h)
            w.writerow([f"{a:.4f}", f"{h:.6f}", f"{s:.6f}"])
            print(f"alpha={a:.2f}  phi_as={h:.5f} +- {s:.5f}", flush=True)
    est = vanishing_point(alphas, heights)
    print(f"plateau vanishing point: {est}")


if __name__ == "__main__":
    main()
