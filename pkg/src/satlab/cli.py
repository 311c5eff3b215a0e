"""Command-line interface.

Subcommands mirror the library modules: closed-form values (`analytic`),
local search (`walk`), backtracking search (`dpll`), linear-system analyses
(`xorsat`), message passing (`mp`), population dynamics (`population`), and
the experiment harness (`experiment`, `fss`).  All subcommands print JSON to
stdout; trajectory/curve CSVs are written where requested.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import asdict, is_dataclass
from pathlib import Path

import numpy as np

from . import analytic
from .generators import EnsembleSpec, gen_formula
from .rng import RngSeed

LN2 = math.log(2.0)


def _jsonable(obj):
    if is_dataclass(obj) and not isinstance(obj, type):
        return _jsonable(asdict(obj))
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if obj.size > 64:
            return {"size": obj.size, "mean": float(np.mean(obj))}
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def _emit(payload) -> None:
    json.dump(_jsonable(payload), sys.stdout, indent=2)
    sys.stdout.write("\n")


def _load_formula(args, kind: str = "ksat"):
    if getattr(args, "dimacs", None):
        from .formulas import read_dimacs

        with open(args.dimacs) as fh:
            formula, _ = read_dimacs(fh)
        return formula
    spec = EnsembleSpec(
        kind, n=args.n, k=args.k, alpha=args.alpha, seed=RngSeed(args.seed).spawn(0)
    )
    return gen_formula(spec)


def _add_instance_args(p, kind="ksat", default_k=3):
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--k", type=int, default=default_k)
    p.add_argument("--alpha", type=float, default=3.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dimacs", help="read the instance from a DIMACS file instead")


# ---------------------------------------------------------------------------
# analytic
# ---------------------------------------------------------------------------

_ANALYTIC = {
    "cover-probability": (("N", int), ("M", int)),
    "cover-window": (("lam", float),),
    "annealed-exponent": (("alpha", float),),
    "second-moment": (("alpha", float),),
    "rs-entropy": (("alpha", float),),
    "perceptron-threshold": (),
    "p-success-uc": (("alpha", float),),
    "contradiction-line": (("p", float),),
    "xorsat-clustering": (("k", int),),
}


def _cmd_analytic(args) -> None:
    name = args.formula
    params = dict(kv.split("=", 1) for kv in args.param)
    sig = _ANALYTIC[name]
    inputs = {key: cast(params[key]) for key, cast in sig}
    unit = LN2 if args.units == "ln2" else 1.0
    if name == "cover-probability":
        out = {"P": analytic.cover_probability(inputs["N"], inputs["M"])}
    elif name == "cover-window":
        out = {"P": analytic.cover_window(inputs["lam"])}
    elif name == "annealed-exponent":
        out = {"G1": analytic.annealed_exponent(inputs["alpha"]) / unit}
    elif name == "second-moment":
        q, val = analytic.second_moment_exponent(inputs["alpha"])
        out = {"q_star": q, "G2_max": val / unit}
    elif name == "rs-entropy":
        res = analytic.rs_entropy_perceptron(inputs["alpha"])
        out = {"q": res.q, "q_hat": res.q_hat, "entropy": res.value / unit}
    elif name == "perceptron-threshold":
        out = {"alpha_s": analytic.perceptron_threshold()}
    elif name == "p-success-uc":
        out = {"p_success": analytic.p_success_uc(inputs["alpha"])}
    elif name == "contradiction-line":
        out = {"alpha": analytic.contradiction_line(inputs["p"])}
    else:
        out = {"alpha_d": analytic.xorsat_clustering_threshold(inputs["k"])}
    _emit({"formula": name, "inputs": inputs, "units": args.units, "outputs": out})


# ---------------------------------------------------------------------------
# walk
# ---------------------------------------------------------------------------


def _write_walk_trajectory(path, outcome) -> None:
    tr = outcome.trajectory
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["T", "t", "E", "phi"])
        for T, t, E, phi in zip(tr.T, tr.t, tr.E, tr.phi):
            w.writerow([T, f"{t:.6f}", E, f"{phi:.6f}"])


def _cmd_walk(args) -> None:
    from . import walk

    formula = _load_formula(args)
    if args.solver == "prwsat":
        out = walk.prwsat(formula, t_max=args.t_max, seed=args.seed)
    elif args.solver == "schoening":
        out = walk.schoening(formula, max_restarts=args.restarts, seed=args.seed)
    else:
        out = walk.focused_walk(
            formula,
            heuristic=args.heuristic,
            noise=args.noise,
            t_max=args.t_max,
            seed=args.seed,
            tolerance=args.tolerance,
        )
    if args.trajectory:
        _write_walk_trajectory(args.trajectory, out)
    _emit(
        {
            "solver": args.solver,
            "n": formula.n_vars,
            "m": formula.n_clauses,
            "status": out.status,
            "steps": out.steps,
            "restarts": out.restarts,
        }
    )


# ---------------------------------------------------------------------------
# dpll
# ---------------------------------------------------------------------------


def _cmd_dpll(args) -> None:
    from . import dpll

    results = []
    for s in range(args.samples):
        seed = RngSeed(args.seed).spawn(s)
        spec = EnsembleSpec(
            "ksat", n=args.n, k=args.k, alpha=args.alpha, seed=seed.spawn(0)
        )
        formula = gen_formula(spec)
        if args.complete:
            res = dpll.dpll_complete(
                formula, args.heuristic, seed=seed.spawn(1), node_budget=args.budget
            )
            results.append(
                {"sample": s, "outcome": res.outcome, **asdict(res.stats)}
            )
        else:
            res = dpll.run_no_backtrack(formula, args.heuristic, seed=seed.spawn(1))
            results.append({"sample": s, "success": res.success})
            if args.trajectory and s == 0:
                tr = res.trajectory
                with open(args.trajectory, "w", newline="") as fh:
                    w = csv.writer(fh)
                    w.writerow(["t", "p", "alpha"])
                    for t, p, a in zip(tr.t, tr.p, tr.alpha):
                        w.writerow([f"{t:.6f}", f"{p:.6f}", f"{a:.6f}"])
    _emit(
        {
            "heuristic": args.heuristic,
            "complete": args.complete,
            "n": args.n,
            "alpha": args.alpha,
            "results": results,
        }
    )


# ---------------------------------------------------------------------------
# xorsat
# ---------------------------------------------------------------------------


def _cmd_xorsat(args) -> None:
    from . import xorsat

    xf = _load_formula(args, kind="xorsat")
    if args.action == "solve":
        sol = xorsat.gf2_solve(xf)
        _emit(
            {
                "satisfiable": sol.satisfiable,
                "rank": sol.rank,
                "nullity": sol.nullity,
                "log2_solutions": sol.nullity if sol.satisfiable else None,
            }
        )
    elif args.action == "core":
        dec = xorsat.leaf_removal(xf)
        _emit(
            {
                "n": xf.n_vars,
                "m": xf.n_equations,
                "core_equations": dec.core.n_equations,
                "core_vars": len(dec.core_vars),
                "t_star": dec.t_star,
                "isolated_vars": len(dec.isolated_vars),
            }
        )
    elif args.action == "entropy":
        split = xorsat.entropy_decomposition(xf)
        unit = LN2 if args.units == "ln2" else 1.0
        _emit(
            {
                "satisfiable": True,
                "s": split.s / unit,
                "sigma": split.sigma / unit,
                "s_int": split.s_int / unit,
                "units": args.units,
            }
        )
    else:  # overlaps
        stats = xorsat.cluster_overlap_stats(xf, samples=args.samples, seed=args.seed)
        _emit(
            {
                "intra_mean": float(np.mean(stats.intra)),
                "inter_mean": float(np.mean(stats.inter)),
                "n_pairs": len(stats.intra),
            }
        )


# ---------------------------------------------------------------------------
# mp
# ---------------------------------------------------------------------------


def _cmd_mp(args) -> None:
    from . import mp
    from .factor_graph import to_factor_graph

    params = mp.MpParams(
        max_sweeps=args.max_sweeps,
        epsilon=args.epsilon,
        damping=args.damping,
        seed=RngSeed(args.seed).spawn(1),
    )
    if args.planted:
        res = mp.planted_wp_experiment(
            args.n, args.alpha, k=args.k, seed=args.seed, params=params
        )
        _emit({"mode": "planted-wp", **asdict(res)})
        return
    formula = _load_formula(args)
    if args.decimate:
        res = mp.mp_decimate(
            formula,
            guide=args.guide,
            params=params,
            block_fraction=args.block_fraction,
            seed=RngSeed(args.seed).spawn(2),
        )
        log = [
            {
                "variable": st.variable,
                "value": st.value,
                "gap": st.gap,
                "n_free": st.n_free,
                "n_clauses": st.n_clauses,
            }
            for st in res.steps[: args.log_limit]
        ]
        _emit(
            {
                "mode": "decimate",
                "guide": args.guide,
                "status": res.status,
                "reason": res.reason,
                "fallback_used": res.fallback_used,
                "variables_fixed": len(res.steps),
                "log": log,
            }
        )
        return
    fg = to_factor_graph(formula)
    if args.guide == "bp":
        res = mp.bp_run(fg, params)
        if args.marginals:
            with open(args.marginals, "w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["variable", "p_plus"])
                for i, p in enumerate(res.marginals):
                    w.writerow([i, f"{p:.8f}"])
        _emit(
            {
                "mode": "bp",
                "converged": res.converged,
                "sweeps": res.sweeps,
                "entropy": res.entropy,
                "entropy_per_var": res.entropy / formula.n_vars,
            }
        )
    elif args.guide == "wp":
        res = mp.wp_run(fg, params)
        _emit(
            {
                "mode": "wp",
                "converged": res.converged,
                "sweeps": res.sweeps,
                "contradiction": res.contradiction,
                "frozen_fraction": float(np.mean(res.fields != 0)),
            }
        )
    else:
        res = mp.sp_run(fg, params)
        _emit(
            {
                "mode": "sp",
                "converged": res.converged,
                "sweeps": res.sweeps,
                "contradiction": res.contradiction,
                "nontrivial_fraction": res.nontrivial_fraction,
                "max_gap": float(res.biases.gap.max()) if fg.n_edges else 0.0,
            }
        )


# ---------------------------------------------------------------------------
# population
# ---------------------------------------------------------------------------


def _cmd_population(args) -> None:
    from . import population

    unit = LN2 if args.units == "ln2" else 1.0
    if args.action == "rs":
        res = population.rs_population(
            args.k,
            args.alpha,
            P=args.pop_size,
            sweeps=args.sweeps,
            seed=args.seed,
            model=args.model,
        )
        if args.hist:
            counts, edges = np.histogram(res.population.fields, bins=args.bins)
            with open(args.hist, "w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["bin_lo", "bin_hi", "count"])
                for lo, hi, c in zip(edges[:-1], edges[1:], counts):
                    w.writerow([f"{lo:.6f}", f"{hi:.6f}", c])
        _emit(
            {
                "action": "rs",
                "k": args.k,
                "alpha": args.alpha,
                "model": args.model,
                "s_rs": res.s_rs / unit,
                "stderr": res.stderr / unit,
                "units": args.units,
                "diverged": res.diverged,
            }
        )
    else:
        est = population.sp_population_onset(
            args.k,
            args.alpha_grid,
            P=args.pop_size,
            sweeps=args.sweeps,
            seed=args.seed,
            n_seeds=args.n_seeds,
        )
        _emit(
            {
                "action": "sp-onset",
                "k": args.k,
                "alpha_d": est.alpha_d,
                "bracket": list(est.bracket),
                "labels": [list(x) for x in est.labels],
            }
        )


# ---------------------------------------------------------------------------
# experiment / fss
# ---------------------------------------------------------------------------


def _cmd_experiment(args) -> None:
    from . import harness

    cfg_dict = json.loads(Path(args.config).read_text())
    for kv in args.set:
        key, val = kv.split("=", 1)
        cfg_dict[key] = json.loads(val)
    config = harness.ExperimentConfig(**cfg_dict)
    table = harness.psat_curve(config, args.out)
    payload = {
        "config_hash": config.digest(),
        "points": [asdict(pt) for pt in table.points],
    }
    if args.fss:
        fit = harness.fss_fit(table)
        payload["fss"] = asdict(fit)
    _emit(payload)


def _cmd_fss(args) -> None:
    from . import harness

    points = []
    k = 0
    with open(args.curve, newline="") as fh:
        for rec in csv.DictReader(fh):
            k = int(rec["k"])
            succ, trials = int(rec["successes"]), int(rec["trials"])
            lo, hi = harness.wilson_interval(succ, trials)
            points.append(
                harness.CurvePoint(
                    int(rec["N"]), float(rec["alpha"]), trials, succ, 0,
                    succ / trials, lo, hi,
                )
            )
    table = harness.CurveTable(k=k, decider="csv", is_complete=True, points=tuple(points))
    _emit(asdict(harness.fss_fit(table)))


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="satlab")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analytic", help="closed-form / numeric ensemble values")
    p.add_argument("formula", choices=sorted(_ANALYTIC))
    p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE")
    p.add_argument("--units", choices=["nats", "ln2"], default="nats")
    p.set_defaults(func=_cmd_analytic)

    p = sub.add_parser("walk", help="stochastic local search")
    p.add_argument("--solver", choices=["prwsat", "schoening", "focused"],
                   default="prwsat")
    _add_instance_args(p)
    p.add_argument("--t-max", type=int, default=10_000_000)
    p.add_argument("--restarts", type=int, default=100)
    p.add_argument("--heuristic", default="greedy_zero_break")
    p.add_argument("--noise", type=float, default=0.3)
    p.add_argument("--tolerance", type=float, default=0.0)
    p.add_argument("--trajectory", help="write T,t,E,phi CSV here")
    p.set_defaults(func=_cmd_walk)

    p = sub.add_parser("dpll", help="backtracking / heuristic tree search")
    p.add_argument("--heuristic", choices=["uc", "guc"], default="uc")
    p.add_argument("--complete", action="store_true")
    _add_instance_args(p)
    p.add_argument("--samples", type=int, default=1)
    p.add_argument("--budget", type=int, default=10_000_000)
    p.add_argument("--trajectory", help="write t,p,alpha CSV here (first sample)")
    p.set_defaults(func=_cmd_dpll)

    p = sub.add_parser("xorsat", help="linear-system structure and entropy")
    p.add_argument("action", choices=["core", "solve", "entropy", "overlaps"])
    _add_instance_args(p, kind="xorsat")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--units", choices=["nats", "ln2"], default="nats")
    p.set_defaults(func=_cmd_xorsat)

    p = sub.add_parser("mp", help="message passing and decimation")
    p.add_argument("--guide", choices=["bp", "wp", "sp"], default="bp")
    p.add_argument("--decimate", action="store_true")
    p.add_argument("--planted", action="store_true",
                   help="planted-instance warning propagation experiment")
    _add_instance_args(p)
    p.add_argument("--max-sweeps", type=int, default=1000)
    p.add_argument("--epsilon", type=float, default=1e-7)
    p.add_argument("--damping", type=float, default=0.5)
    p.add_argument("--block-fraction", type=float, default=0.01)
    p.add_argument("--log-limit", type=int, default=20)
    p.add_argument("--marginals", help="write per-variable BP marginals CSV here")
    p.set_defaults(func=_cmd_mp)

    p = sub.add_parser("population", help="distributional cavity dynamics")
    p.add_argument("action", choices=["rs", "sp-onset"])
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--alpha", type=float, default=2.0)
    p.add_argument("--alpha-grid", type=float, nargs="+",
                   default=[3.6, 3.8, 4.0, 4.2])
    p.add_argument("--pop-size", type=int, default=100_000)
    p.add_argument("--sweeps", type=int, default=300)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-seeds", type=int, default=5)
    p.add_argument("--model", choices=["sat", "xor"], default="sat")
    p.add_argument("--units", choices=["nats", "ln2"], default="nats")
    p.add_argument("--hist", help="write population histogram CSV here")
    p.add_argument("--bins", type=int, default=100)
    p.set_defaults(func=_cmd_population)

    p = sub.add_parser("experiment", help="ensemble sweep from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--set", action="append", default=[], metavar="KEY=JSON",
                   help="override a config field")
    p.add_argument("--fss", action="store_true", help="also fit finite-size scaling")
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("fss", help="finite-size-scaling fit of a curve CSV")
    p.add_argument("--curve", required=True)
    p.set_defaults(func=_cmd_fss)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    args.func(args)
    return 0


if __name__ == "__main__":
    sys.exit(main())
