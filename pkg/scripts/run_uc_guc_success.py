#!/usr/bin/env python3
"""Success probability of the no-backtracking UC/GUC heuristics vs alpha,
compared with the closed-form UC prediction.

Example:
    python3 scripts/run_uc_guc_success.py --heuristic uc --n 10000 \
        --alphas 1.0 2.0 2.5 --runs 200
"""

import argparse

from satlab.analytic import p_success_uc
from satlab.dpll import run_no_backtrack
from satlab.generators import EnsembleSpec, gen_formula
from satlab.rng import RngSeed


def success_frequency(heuristic, n, alpha, runs, k, seed) -> float:
    base = RngSeed(seed).spawn(int(round(alpha * 1000)))
    wins = 0
    for r in range(runs):
        f = gen_formula(
            EnsembleSpec("ksat", n=n, k=k, alpha=alpha, seed=base.spawn(r, 0))
        )
        wins += run_no_backtrack(f, heuristic, seed=base.spawn(r, 1)).success
    return wins / runs


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--heuristic", choices=["uc", "guc"], default="uc")
    ap.add_argument("--n", type=int, default=10_000)
    ap.add_argument("--k", type=int, default=3)
    ap.add_argument("--alphas", type=float, nargs="+", default=[1.0, 2.0, 2.5])
    ap.add_argument("--runs", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    for alpha in args.alphas:
        emp = success_frequency(
            args.heuristic, args.n, alpha, args.runs, args.k, args.seed
        )
        line = f"{args.heuristic} alpha={alpha}: empirical={emp:.4f}"
        if args.heuristic == "uc" and args.k == 3:
            line += f"  closed-form={p_success_uc(alpha):.4f}"
        print(line, flush=True)


if __name__ == "__main__":
    main()
