"""Population dynamics for the ensemble-level cavity equations.

A population is a size-P multiset of message values.  One sweep performs P
updates; each update draws the incoming neighborhood degrees from two
independent Poisson(alpha*k/2) variables (clauses agreeing / disagreeing with
the receiving edge), builds the incoming clause->variable messages from k-1
population members each, and overwrites a uniformly chosen member.

Two levels are implemented:
  * RS field populations (`rs_population`), for k-SAT clauses or k-XOR
    (parity) clauses, with a sampled Bethe entropy estimate;
  * survey populations (`sp_population_onset`), whose nontrivial fixed point
    signals the clustering transition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from .rng import RngSeed, as_seed

_H_CLAMP = 30.0
_P_CLAMP = 1e-15
TRIVIAL_MASS = 0.999
TRIVIAL_DELTA = 1e-6


@dataclass(frozen=True)
class Population:
    fields: np.ndarray  # size-P multiset of message values
    generation: int  # completed sweeps


# ---------------------------------------------------------------------------
# RS field populations
# ---------------------------------------------------------------------------


@numba.njit(cache=True)
def _sat_u(h, mem, ptr, k):
    """Clause->variable message from k-1 member fields (k-SAT clause)."""
    p = 1.0
    for _ in range(k - 1):
        p *= (1.0 - math.tanh(h[mem[ptr]])) / 2.0
        ptr += 1
    if p > 1.0 - _P_CLAMP:
        p = 1.0 - _P_CLAMP
    return -0.5 * math.log(1.0 - p), ptr


@numba.njit(cache=True)
def _xor_u(h, mem, ptr, k, sgn):
    """Signed message from k-1 member fields (parity clause, random coupling)."""
    p = sgn
    for _ in range(k - 1):
        p *= math.tanh(h[mem[ptr]])
        ptr += 1
    if p > 1.0 - _P_CLAMP:
        p = 1.0 - _P_CLAMP
    elif p < -1.0 + _P_CLAMP:
        p = -1.0 + _P_CLAMP
    return 0.5 * math.log((1.0 + p) / (1.0 - p)), ptr


@numba.njit(cache=True)
def _rs_sweep(h, repl, dp, dm, mem, sgn, k, is_xor):
    """One population sweep; returns the number of clamped fields."""
    ptr = 0
    n_clamp = 0
    for t in range(len(repl)):
        d = dp[t] + dm[t]
        hn = 0.0
        for j in range(d):
            if is_xor:
                u, ptr = _xor_u(h, mem, ptr, k, sgn[ptr // (k - 1)])
                hn += u
            else:
                u, ptr = _sat_u(h, mem, ptr, k)
                hn += u if j < dp[t] else -u
        if hn > _H_CLAMP:
            hn = _H_CLAMP
            n_clamp += 1
        elif hn < -_H_CLAMP:
            hn = -_H_CLAMP
            n_clamp += 1
        h[repl[t]] = hn
    return n_clamp


@numba.njit(cache=True)
def _rs_measure(h, dp, dm, mem, sgn, za_mem, zai_mem, za_sgn, k, is_xor):
    """Per-sample Bethe terms ln z_i, ln z_a, ln z_ai (z_ai NaN when d = 0)."""
    n = len(dp)
    lnzi = np.empty(n)
    lnza = np.empty(n)
    lnzai = np.empty(n)
    ptr = 0
    for t in range(n):
        d = dp[t] + dm[t]
        prod_p = 1.0
        prod_m = 1.0
        u_first = math.nan
        for j in range(d):
            if is_xor:
                u, ptr = _xor_u(h, mem, ptr, k, sgn[ptr // (k - 1)])
                tu = math.tanh(u)
            else:
                u, ptr = _sat_u(h, mem, ptr, k)
                tu = math.tanh(u) if j < dp[t] else -math.tanh(u)
            if j == 0:
                u_first = u
            prod_p *= (1.0 + tu) / 2.0
            prod_m *= (1.0 - tu) / 2.0
        lnzi[t] = math.log(prod_p + prod_m)
        if is_xor:
            p = za_sgn[t]
            for m in range(k):
                p *= math.tanh(h[za_mem[t * k + m]])
            lnza[t] = math.log(max((1.0 + p) / 2.0, _P_CLAMP))
        else:
            p = 1.0
            for m in range(k):
                p *= (1.0 - math.tanh(h[za_mem[t * k + m]])) / 2.0
            if p > 1.0 - _P_CLAMP:
                p = 1.0 - _P_CLAMP
            lnza[t] = math.log(1.0 - p)
        if math.isnan(u_first):
            lnzai[t] = math.nan
        else:
            th = math.tanh(h[zai_mem[t]])
            lnzai[t] = math.log(max((1.0 + th * math.tanh(u_first)) / 2.0, _P_CLAMP))
    return lnzi, lnza, lnzai


@dataclass(frozen=True)
class RsPopulationResult:
    population: Population
    s_rs: float  # Bethe entropy estimate, nats per variable
    stderr: float
    diverged: bool  # clamp hit persistently during measurement


def _sweep_draws(rng, P, k, lam):
    dp = rng.poisson(lam, P)
    dm = rng.poisson(lam, P)
    n_u = int((dp + dm).sum())
    mem = rng.integers(P, size=n_u * (k - 1))
    sgn = 1.0 - 2.0 * rng.integers(2, size=max(1, n_u)).astype(np.float64)
    return dp, dm, mem, sgn


def rs_population(
    k: int,
    alpha: float,
    P: int = 100_000,
    sweeps: int = 300,
    seed: RngSeed | int = 0,
    model: str = "sat",
    burn_in: int | None = None,
) -> RsPopulationResult:
    """RS cavity-field population and its sampled Bethe entropy.

    `model`: "sat" (OR clauses, messages u >= 0 with random edge signs) or
    "xor" (parity clauses with random couplings, signed messages).
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    if model not in ("sat", "xor"):
        raise ValueError(f"unknown model {model!r}")
    if burn_in is None:
        burn_in = min(200, max(1, (2 * sweeps) // 3))
    is_xor = model == "xor"
    rng = as_seed(seed).rng()
    h = rng.uniform(-1.0, 1.0, P)
    lam = alpha * k / 2.0
    zi, za, zai = [], [], []
    clamp_hits = 0
    measure_sweeps = 0
    for sweep in range(sweeps):
        dp, dm, mem, sgn = _sweep_draws(rng, P, k, lam)
        repl = rng.integers(P, size=P)
        n_clamp = _rs_sweep(h, repl, dp, dm, mem, sgn, k, is_xor)
        if sweep >= burn_in:
            measure_sweeps += 1
            clamp_hits += n_clamp
            dp, dm, mem, sgn = _sweep_draws(rng, P, k, lam)
            za_mem = rng.integers(P, size=P * k)
            zai_mem = rng.integers(P, size=P)
            za_sgn = 1.0 - 2.0 * rng.integers(2, size=P).astype(np.float64)
            lnzi, lnza, lnzai = _rs_measure(
                h, dp, dm, mem, sgn, za_mem, zai_mem, za_sgn, k, is_xor
            )
            zi.append(lnzi)
            za.append(lnza)
            zai.append(lnzai)
    if measure_sweeps == 0:
        raise ValueError("sweeps must exceed burn_in to measure the entropy")
    zi = np.concatenate(zi)
    za = np.concatenate(za)
    zai = np.concatenate(zai)
    has_edge = np.isfinite(zai)
    m_zai = float(np.mean(zai[has_edge])) if has_edge.any() else 0.0
    v_zai = float(np.var(zai[has_edge]) / max(1, has_edge.sum())) if has_edge.any() else 0.0
    s_rs = float(zi.mean()) + alpha * float(za.mean()) - alpha * k * m_zai
    stderr = math.sqrt(
        zi.var() / len(zi) + alpha**2 * za.var() / len(za) + (alpha * k) ** 2 * v_zai
    )
    diverged = clamp_hits > 0.01 * P * measure_sweeps
    return RsPopulationResult(
        population=Population(fields=h, generation=sweeps),
        s_rs=s_rs,
        stderr=stderr,
        diverged=diverged,
    )


# ---------------------------------------------------------------------------
# Survey populations and the clustering onset
# ---------------------------------------------------------------------------


@numba.njit(cache=True)
def _sp_pop_sweep(dlt, repl, da, dd, mem, k):
    ptr = 0
    q = 0
    for t in range(len(repl)):
        d_new = 1.0
        for _ in range(k - 1):
            pa = 1.0
            for _ in range(da[q]):
                pa *= 1.0 - dlt[mem[ptr]]
                ptr += 1
            pd = 1.0
            for _ in range(dd[q]):
                pd *= 1.0 - dlt[mem[ptr]]
                ptr += 1
            q += 1
            norm = pa + pd - pa * pd
            if norm <= 0.0:
                g = 1.0
            else:
                g = (1.0 - pd) * pa / norm
            d_new *= g
        dlt[repl[t]] = d_new
    return 0


def sp_population(
    k: int,
    alpha: float,
    P: int = 100_000,
    sweeps: int = 300,
    seed: RngSeed | int = 0,
) -> Population:
    """Survey population from a symmetry-broken (uniform random) start."""
    rng = as_seed(seed).rng()
    dlt = rng.random(P)
    lam = alpha * k / 2.0
    for _ in range(sweeps):
        da = rng.poisson(lam, P * (k - 1))
        dd = rng.poisson(lam, P * (k - 1))
        mem = rng.integers(P, size=int(da.sum() + dd.sum()))
        repl = rng.integers(P, size=P)
        _sp_pop_sweep(dlt, repl, da, dd, mem, k)
    return Population(fields=dlt, generation=sweeps)


def survey_population_is_trivial(pop: Population) -> bool:
    """A fixed point is trivial when nearly all surveys have collapsed to 0."""
    return float(np.mean(pop.fields < TRIVIAL_DELTA)) > TRIVIAL_MASS


@dataclass(frozen=True)
class OnsetEstimate:
    alpha_d: float  # midpoint of the bracketing interval
    bracket: tuple[float, float]
    labels: tuple[tuple[float, str], ...]  # (alpha, "trivial"|"nontrivial"|"bistable")


def sp_population_onset(
    k: int,
    alphas,
    P: int = 100_000,
    sweeps: int = 300,
    seed: RngSeed | int = 0,
    n_seeds: int = 5,
) -> OnsetEstimate:
    """Clustering onset: where the survey population first keeps a nontrivial
    fixed point.  Each grid point is classified by majority over independent
    seeds; disagreement widens the reported bracket."""
    alphas = sorted(float(a) for a in alphas)
    if len(alphas) < 2:
        raise ValueError("need at least two grid points")
    base = as_seed(seed)
    labels = []
    for i, a in enumerate(alphas):
        votes = sum(
            survey_population_is_trivial(
                sp_population(k, a, P=P, sweeps=sweeps, seed=base.spawn(i, s))
            )
            for s in range(n_seeds)
        )
        if votes == n_seeds:
            labels.append((a, "trivial"))
        elif votes == 0:
            labels.append((a, "nontrivial"))
        else:
            labels.append((a, "trivial" if 2 * votes > n_seeds else "nontrivial"))
    trivials = [a for a, lab in labels if lab == "trivial"]
    nontrivials = [a for a, lab in labels if lab == "nontrivial"]
    if not trivials or not nontrivials:
        raise ValueError(
            f"grid {alphas} does not bracket the onset (labels: {labels})"
        )
    # widened bracket: last trivial alpha below every nontrivial point, first
    # nontrivial alpha above every trivial point
    lo_cands = [a for a in trivials if a < min(nontrivials)]
    hi_cands = [a for a in nontrivials if a > max(trivials)]
    if not lo_cands or not hi_cands:
        raise ValueError(f"onset labels are not orderable: {labels}")
    lo, hi = max(lo_cands), min(hi_cands)
    return OnsetEstimate(
        alpha_d=0.5 * (lo + hi), bracket=(lo, hi), labels=tuple(labels)
    )
