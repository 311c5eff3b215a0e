#!/usr/bin/env python3
"""Survey-guided decimation with walk fallback on large random 3-SAT.

Example:
    python3 scripts/run_sp_decimation.py --n 50000 --alpha 4.2 --instances 20
"""

import argparse
import time

from satlab.formulas import energy
from satlab.generators import EnsembleSpec, gen_formula
from satlab.mp import MpParams, mp_decimate
from satlab.rng import RngSeed


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=50_000)
    ap.add_argument("--k", type=int, default=3)
    ap.add_argument("--alpha", type=float, default=4.2)
    ap.add_argument("--instances", type=int, default=20)
    ap.add_argument("--block-fraction", type=float, default=0.01)
    ap.add_argument("--epsilon", type=float, default=1e-3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    solved = 0
    for i in range(args.instances):
        base = RngSeed(args.seed).spawn(i)
        f = gen_formula(
            EnsembleSpec("ksat", n=args.n, k=args.k, alpha=args.alpha,
                         seed=base.spawn(0))
        )
        t0 = time.perf_counter()
        res = mp_decimate(
            f,
            guide="sp",
            params=MpParams(epsilon=args.epsilon, seed=base.spawn(1)),
            block_fraction=args.block_fraction,
            seed=base.spawn(2),
        )
        ok = res.status == "SAT" and energy(f, res.assignment) == 0
        solved += ok
        print(
            f"instance {i}: {res.status}"
            f" reason={res.reason} fallback={res.fallback_used}"
            f" fixed={len(res.steps)} {time.perf_counter() - t0:.1f}s valid={ok}",
            flush=True,
        )
    print(f"solved {solved}/{args.instances}")


if __name__ == "__main__":
    main()
