"""Experiment orchestration: ensemble sweeps, satisfiability curves, and
finite-size-scaling fits.

Jobs are expanded deterministically from a config; each (n, alpha, sample)
job derives its own seed from the base seed, so results are independent of
worker scheduling.  Results are written incrementally to CSV with resume
support, then rewritten in sorted order so an interrupted-and-resumed run
produces a byte-identical final file.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .rng import RngSeed
from .generators import EnsembleSpec, gen_formula

DECIDERS = ("dpll_complete", "gf2_solve", "run_no_backtrack", "mp_decimate", "walk")
_COMPLETE_DECIDERS = ("dpll_complete", "gf2_solve")

_JOB_FIELDS = ("n", "alpha", "sample", "outcome")


@dataclass(frozen=True)
class ExperimentConfig:
    decider: str
    ensemble: str  # "ksat" | "xorsat" | "two_plus_p"
    k: int
    n_list: tuple[int, ...]
    alphas: tuple[float, ...]
    samples: int
    seed: int = 0
    out_dir: str | None = None
    workers: int | None = None  # None: $SATLAB_WORKERS or 1
    p: float = 1.0  # two_plus_p only
    decider_params: tuple[tuple[str, float], ...] = ()

    def __post_init__(self):
        if self.decider not in DECIDERS:
            raise ValueError(f"unknown decider {self.decider!r}")
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        object.__setattr__(self, "n_list", tuple(int(n) for n in self.n_list))
        object.__setattr__(self, "alphas", tuple(float(a) for a in self.alphas))

    @property
    def is_complete(self) -> bool:
        """True when the decider gives true SAT/UNSAT verdicts (not bounds)."""
        return self.decider in _COMPLETE_DECIDERS

    def jobs(self):
        for n in self.n_list:
            for alpha in self.alphas:
                for s in range(self.samples):
                    yield n, alpha, s

    def digest(self) -> str:
        blob = json.dumps(asdict(self), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def _job_seed(config: ExperimentConfig, n: int, alpha: float, sample: int) -> RngSeed:
    return RngSeed(config.seed).spawn(n, int(round(alpha * 1_000_000)), sample)


def _run_job(config: ExperimentConfig, n: int, alpha: float, sample: int):
    """One instance decided; returns (n, alpha, sample, outcome)."""
    from . import dpll, mp, walk, xorsat

    seed = _job_seed(config, n, alpha, sample)
    params = dict(config.decider_params)
    spec = EnsembleSpec(
        config.ensemble, n=n, k=config.k, alpha=alpha, p=config.p, seed=seed.spawn(0)
    )
    formula = gen_formula(spec)
    if config.decider == "gf2_solve":
        sol = xorsat.gf2_solve(formula)
        outcome = "sat" if sol.satisfiable else "unsat"
    elif config.decider == "dpll_complete":
        res = dpll.dpll_complete(
            formula,
            heuristic=str(params.get("heuristic", "uc")),
            seed=seed.spawn(1),
            node_budget=int(params.get("node_budget", 10_000_000)),
        )
        outcome = {"SAT": "sat", "UNSAT": "unsat", "budget": "censored"}[res.outcome]
    elif config.decider == "run_no_backtrack":
        res = dpll.run_no_backtrack(
            formula, heuristic=str(params.get("heuristic", "guc")), seed=seed.spawn(1)
        )
        outcome = "sat" if res.success else "fail"
    elif config.decider == "walk":
        res = walk.focused_walk(
            formula,
            heuristic=str(params.get("heuristic", "greedy_zero_break")),
            noise=float(params.get("noise", 0.3)),
            t_max=int(params.get("steps_per_clause", 100)) * max(1, formula.n_clauses),
            seed=seed.spawn(1),
        )
        outcome = "sat" if res.status == "solution" else "fail"
    else:  # mp_decimate
        res = mp.mp_decimate(
            formula,
            guide=str(params.get("guide", "sp")),
            params=mp.MpParams(
                epsilon=float(params.get("epsilon", 1e-3)), seed=seed.spawn(1)
            ),
            block_fraction=float(params.get("block_fraction", 0.01)),
            seed=seed.spawn(2),
        )
        outcome = "sat" if res.status == "SAT" else "fail"
    # no per-job timing in the row: results must be byte-identical across
    # reruns, resumes, and worker counts
    return n, alpha, sample, outcome


def _format_row(row) -> list[str]:
    n, alpha, sample, outcome = row
    return [str(n), f"{alpha:.6f}", str(sample), outcome]


def run_experiment(config: ExperimentConfig, out_dir: str | Path | None = None) -> Path:
    """Execute the job list; returns the directory holding results.csv and
    manifest.json.  Re-running with the same config resumes and yields a
    byte-identical results.csv."""
    out = Path(out_dir or config.out_dir or f"experiment-{config.digest()}")
    out.mkdir(parents=True, exist_ok=True)
    results_path = out / "results.csv"
    done: dict[tuple[int, float, int], tuple] = {}
    if results_path.exists():
        with open(results_path, newline="") as fh:
            for rec in csv.DictReader(fh):
                key = (int(rec["n"]), float(rec["alpha"]), int(rec["sample"]))
                done[key] = (*key, rec["outcome"])
    todo = [j for j in config.jobs() if j not in done]
    workers = config.workers or int(os.environ.get("SATLAB_WORKERS", "1"))
    t0 = time.perf_counter()
    new_file = not results_path.exists()
    with open(results_path, "a", newline="") as fh:
        writer = csv.writer(fh)
        if new_file:
            writer.writerow(_JOB_FIELDS)
        if workers > 1 and len(todo) > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                for row in pool.map(
                    _run_job, [config] * len(todo), *zip(*todo), chunksize=1
                ):
                    done[row[:3]] = row
                    writer.writerow(_format_row(row))
                    fh.flush()
        else:
            for job in todo:
                row = _run_job(config, *job)
                done[row[:3]] = row
                writer.writerow(_format_row(row))
                fh.flush()
    # deterministic final file: sorted job order, fixed formatting
    with open(results_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_JOB_FIELDS)
        for job in config.jobs():
            writer.writerow(_format_row(done[job]))
    manifest = {
        "config": asdict(config),
        "config_hash": config.digest(),
        "versions": _versions(),
        "wall_seconds": round(time.perf_counter() - t0, 3),
        "jobs_total": len(done),
        "jobs_run": len(todo),
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True))
    return out


def _versions() -> dict[str, str]:
    import numba
    import scipy

    from . import __version__

    return {
        "satlab": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "numba": numba.__version__,
    }


# ---------------------------------------------------------------------------
# Satisfiability curves
# ---------------------------------------------------------------------------


def wilson_interval(successes: int, trials: int, z: float = 1.96) -> tuple[float, float]:
    if trials == 0:
        return 0.0, 1.0
    p = successes / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)


@dataclass(frozen=True)
class CurvePoint:
    n: int
    alpha: float
    trials: int
    successes: int
    censored: int
    p_hat: float
    ci_lo: float
    ci_hi: float


@dataclass(frozen=True)
class CurveTable:
    k: int
    decider: str
    is_complete: bool  # heuristic deciders yield lower bounds on P(sat)
    points: tuple[CurvePoint, ...]

    def for_n(self, n: int) -> tuple[CurvePoint, ...]:
        return tuple(pt for pt in self.points if pt.n == n)

    @property
    def n_values(self) -> tuple[int, ...]:
        return tuple(sorted({pt.n for pt in self.points}))

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(
                ["k", "N", "alpha", "trials", "successes", "p_hat", "ci_lo", "ci_hi"]
            )
            for pt in self.points:
                w.writerow(
                    [
                        self.k,
                        pt.n,
                        f"{pt.alpha:.6f}",
                        pt.trials,
                        pt.successes,
                        f"{pt.p_hat:.6f}",
                        f"{pt.ci_lo:.6f}",
                        f"{pt.ci_hi:.6f}",
                    ]
                )


def psat_curve(
    config: ExperimentConfig, out_dir: str | Path | None = None
) -> CurveTable:
    """P(sat) (or heuristic success probability) per (N, alpha)."""
    out = run_experiment(config, out_dir)
    rows: dict[tuple[int, float], list[str]] = {}
    with open(out / "results.csv", newline="") as fh:
        for rec in csv.DictReader(fh):
            rows.setdefault((int(rec["n"]), float(rec["alpha"])), []).append(
                rec["outcome"]
            )
    points = []
    for n in config.n_list:
        for alpha in config.alphas:
            outcomes = rows[(n, alpha)]
            trials = len(outcomes)
            succ = sum(o == "sat" for o in outcomes)
            cens = sum(o == "censored" for o in outcomes)
            lo, hi = wilson_interval(succ, trials)
            points.append(
                CurvePoint(n, alpha, trials, succ, cens, succ / trials, lo, hi)
            )
    table = CurveTable(
        k=config.k,
        decider=config.decider,
        is_complete=config.is_complete,
        points=tuple(points),
    )
    table.write_csv(out / "curve.csv")
    return table


# ---------------------------------------------------------------------------
# Finite-size scaling
# ---------------------------------------------------------------------------


def _isotonic_decreasing(y: np.ndarray) -> np.ndarray:
    """Pool-adjacent-violators fit of a nonincreasing sequence (L2)."""
    # fit nondecreasing to the reversed sequence
    vals = list(y[::-1].astype(float))
    blocks = []  # (mean, weight)
    for v in vals:
        blocks.append([v, 1.0])
        while len(blocks) > 1 and blocks[-2][0] > blocks[-1][0]:
            m2, w2 = blocks.pop()
            m1, w1 = blocks.pop()
            blocks.append([(m1 * w1 + m2 * w2) / (w1 + w2), w1 + w2])
    fit = np.concatenate([np.full(int(w), m) for m, w in blocks])
    return fit[::-1]


def _crossing_alpha(alphas: np.ndarray, p: np.ndarray, level: float) -> float | None:
    """First alpha where the nonincreasing curve passes below `level`."""
    below = np.nonzero(p <= level)[0]
    if len(below) == 0 or below[0] == 0:
        return None
    j = below[0]
    a0, a1, p0, p1 = alphas[j - 1], alphas[j], p[j - 1], p[j]
    if p0 == p1:
        return float(0.5 * (a0 + a1))
    return float(a0 + (a1 - a0) * (p0 - level) / (p0 - p1))


@dataclass(frozen=True)
class FssFit:
    alpha_c: float
    alpha_c_err: float  # spread (median absolute deviation) of pairwise crossings
    nu: float
    nu_err: float
    windows: tuple[tuple[int, float], ...]  # (N, window width)
    crossings: tuple[float, ...]
    smoothed: bool  # isotonic regression had to repair non-monotone curves
    below_sharpness_bound: bool  # fitted nu < 2, sharper than achievable

    def __post_init__(self):
        if self.nu <= 0:
            raise ValueError("nu must be positive")


def fss_fit(
    table: CurveTable, lo_level: float = 0.25, hi_level: float = 0.75
) -> FssFit:
    """Transition point and window exponent from curves at >= 3 sizes.

    Window width W(N) = alpha(P=lo) - alpha(P=hi) scales as N^{-1/nu};
    alpha_c is the median of pairwise curve crossings.
    """
    ns = table.n_values
    if len(ns) < 3:
        raise ValueError("need curves at >= 3 distinct sizes")
    smoothed = False
    curves: dict[int, tuple[np.ndarray, np.ndarray]] = {}
    for n in ns:
        pts = sorted(table.for_n(n), key=lambda pt: pt.alpha)
        alphas = np.array([pt.alpha for pt in pts])
        p = np.array([pt.p_hat for pt in pts])
        p_fit = _isotonic_decreasing(p)
        if not np.allclose(p_fit, p):
            smoothed = True
        curves[n] = (alphas, p_fit)
    windows = []
    for n in ns:
        alphas, p = curves[n]
        a_hi = _crossing_alpha(alphas, p, hi_level)
        a_lo = _crossing_alpha(alphas, p, lo_level)
        if a_hi is None or a_lo is None:
            raise ValueError(
                f"curve at N={n} does not span [{lo_level}, {hi_level}]"
            )
        windows.append((n, max(a_lo - a_hi, 1e-12)))
    log_n = np.log([n for n, _ in windows])
    log_w = np.log([w for _, w in windows])
    (slope, _), cov = np.polyfit(log_n, log_w, 1, cov=True)
    if slope >= 0:
        raise ValueError(f"window width does not shrink with N (slope {slope:.3f})")
    nu = -1.0 / slope
    nu_err = nu * nu * math.sqrt(cov[0, 0])
    crossings = []
    for i, n1 in enumerate(ns):
        for n2 in ns[i + 1 :]:
            a = _pair_crossing(curves[n1], curves[n2])
            if a is not None:
                crossings.append(a)
    if not crossings:
        raise ValueError("no pairwise curve crossings found")
    alpha_c = float(np.median(crossings))
    spread = float(np.median(np.abs(np.array(crossings) - alpha_c)))
    return FssFit(
        alpha_c=alpha_c,
        alpha_c_err=spread,
        nu=float(nu),
        nu_err=float(nu_err),
        windows=tuple(windows),
        crossings=tuple(sorted(crossings)),
        smoothed=smoothed,
        below_sharpness_bound=bool(nu < 2.0),
    )


def _pair_crossing(c1, c2) -> float | None:
    """Crossing of two piecewise-linear curves on a common alpha grid,
    preferring sign changes inside the transition region."""
    a1, p1 = c1
    a2, p2 = c2
    grid = np.union1d(a1, a2)
    grid = grid[(grid >= max(a1[0], a2[0])) & (grid <= min(a1[-1], a2[-1]))]
    if len(grid) < 2:
        return None
    f1 = np.interp(grid, a1, p1)
    f2 = np.interp(grid, a2, p2)
    d = f1 - f2
    best = None
    for j in range(1, len(grid)):
        if d[j - 1] == 0.0 and d[j] == 0.0:
            continue
        if d[j - 1] * d[j] <= 0.0 and (d[j - 1] != 0.0 or d[j] != 0.0):
            t = d[j - 1] / (d[j - 1] - d[j]) if d[j - 1] != d[j] else 0.5
            a = float(grid[j - 1] + t * (grid[j] - grid[j - 1]))
            mid = 0.5 * (f1[j - 1] + f1[j])
            score = abs(mid - 0.5)
            if best is None or score < best[0]:
                best = (score, a)
    return None if best is None else best[1]


# ---------------------------------------------------------------------------
# Synthetic scaling-form generator (self-consistency oracle for fss_fit)
# ---------------------------------------------------------------------------


def synthetic_curve_table(
    alpha_c: float,
    nu: float,
    n_list,
    alphas,
    trials: int = 0,
    seed: int = 0,
) -> CurveTable:
    """Curves drawn from the scaling form P = F((alpha - alpha_c) N^{1/nu})
    with a smooth sigmoidal F; trials > 0 adds binomial sampling noise."""
    rng = RngSeed(seed).rng()
    points = []
    for n in n_list:
        for alpha in alphas:
            lam = (alpha - alpha_c) * n ** (1.0 / nu)
            p = 1.0 / (1.0 + math.exp(2.0 * lam))
            if trials > 0:
                succ = int(rng.binomial(trials, p))
                t = trials
            else:
                t = 10**9
                succ = int(round(p * t))
            lo, hi = wilson_interval(succ, t)
            points.append(CurvePoint(int(n), float(alpha), t, succ, 0, succ / t, lo, hi))
    return CurveTable(k=0, decider="synthetic", is_complete=True, points=tuple(points))
