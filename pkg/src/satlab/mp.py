"""Message passing on CNF factor graphs: BP, WP, SP, and decimation.

Conventions (matching FactorGraph): an edge sign s = +1 means the clause is
satisfied by sigma = +1 on that variable.  Cavity fields live in the frame of
the receiving clause: h_{i->a} > 0 means i leans toward satisfying a, so with
G_i the signed sum of incoming u's over all edges of i (global frame, toward
+1), h_{i->a} = s * G_i - u_{a->i}.

Sweeps are asynchronous over clauses (random permutation or fixed order) with
damping on the clause->variable messages; the inner loops are numba kernels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numba
import numpy as np

from .factor_graph import FactorGraph, from_arrays, to_factor_graph
from .formulas import CnfFormula, energy
from .rng import RngSeed, as_seed

_H_CLAMP = 30.0  # cap on tanh arguments
_P_CLAMP = 1e-15  # keep products away from 1 before the log


@dataclass(frozen=True)
class MpParams:
    max_sweeps: int = 1000
    epsilon: float = 1e-7
    damping: float = 0.5  # use 0.0 on trees
    order: str = "random-permutation"  # or "fixed"
    seed: RngSeed | int = 0

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be > 0")
        if not 0.0 <= self.damping < 1.0:
            raise ValueError("damping must be in [0, 1)")
        if self.order not in ("random-permutation", "fixed"):
            raise ValueError(f"unknown update order {self.order!r}")


def _sweep_orders(fg: FactorGraph, params: MpParams):
    rng = as_seed(params.seed).rng()
    fixed = np.arange(fg.n_clauses, dtype=np.int64)
    while True:
        if params.order == "random-permutation":
            yield rng.permutation(fg.n_clauses)
        else:
            yield fixed


# ---------------------------------------------------------------------------
# Belief propagation
# ---------------------------------------------------------------------------


@numba.njit(cache=True)
def _bp_sweep(perm, clause_ptr, edge_var, edge_sign, u, G, damping):
    max_change = 0.0
    for idx in range(len(perm)):
        a = perm[idx]
        lo, hi = clause_ptr[a], clause_ptr[a + 1]
        for e in range(lo, hi):
            h = edge_sign[e] * G[edge_var[e]] - u[e]
            if h > _H_CLAMP:
                h = _H_CLAMP
            elif h < -_H_CLAMP:
                h = -_H_CLAMP
            p = 1.0
            for e2 in range(lo, hi):
                if e2 == e:
                    continue
                h2 = edge_sign[e2] * G[edge_var[e2]] - u[e2]
                if h2 > _H_CLAMP:
                    h2 = _H_CLAMP
                elif h2 < -_H_CLAMP:
                    h2 = -_H_CLAMP
                p *= (1.0 - math.tanh(h2)) / 2.0
            if p > 1.0 - _P_CLAMP:
                p = 1.0 - _P_CLAMP
            u_new = -0.5 * math.log(1.0 - p)
            u_new = (1.0 - damping) * u_new + damping * u[e]
            change = abs(u_new - u[e])
            if change > max_change:
                max_change = change
            G[edge_var[e]] += edge_sign[e] * (u_new - u[e])
            u[e] = u_new
    return max_change


@dataclass(frozen=True)
class BpResult:
    converged: bool
    sweeps: int
    u: np.ndarray  # clause->variable messages, per edge
    fields: np.ndarray  # per-variable local field h_i (toward +1)
    marginals: np.ndarray  # P(sigma_i = +1)
    entropy: float  # Bethe estimate of ln(#solutions)


def _cavity_h(fg: FactorGraph, u: np.ndarray, G: np.ndarray) -> np.ndarray:
    return fg.edge_sign * G[fg.edge_var] - u


def bethe_entropy(fg: FactorGraph, u: np.ndarray, G: np.ndarray) -> float:
    """ln Z = sum_a ln z_a + sum_i ln z_i - sum_edges ln z_ai, exact on trees."""
    h = np.clip(_cavity_h(fg, u, G), -_H_CLAMP, _H_CLAMP)
    th, tu = np.tanh(h), np.tanh(u)
    s = fg.edge_sign
    # clause terms: probability the clause is satisfied under the cavity inputs
    factors = (1.0 - th) / 2.0
    prod_a = np.multiply.reduceat(
        np.concatenate([factors, [1.0]]), fg.clause_ptr[:-1]
    )
    ln_za = np.log(np.clip(1.0 - prod_a, _P_CLAMP, None))
    # variable terms: product over incident clause->variable beliefs
    vm = fg.var_edges
    plus = (1.0 + s[vm] * tu[vm]) / 2.0
    minus = (1.0 - s[vm] * tu[vm]) / 2.0
    pad_ptr = fg.var_ptr[:-1]
    z_i = np.multiply.reduceat(np.concatenate([plus, [1.0]]), pad_ptr)
    z_i += np.multiply.reduceat(np.concatenate([minus, [1.0]]), pad_ptr)
    # degree-0 variables: reduceat on empty segments yields the next element;
    # recompute them explicitly as 1 + 1 = 2
    deg0 = np.diff(fg.var_ptr) == 0
    z_i[deg0] = 2.0
    # edge terms
    z_ai = ((1.0 + s * th) * (1.0 + s * tu) + (1.0 - s * th) * (1.0 - s * tu)) / 4.0
    return float(ln_za.sum() + np.log(z_i).sum() - np.log(z_ai).sum())


def bp_run(fg: FactorGraph, params: MpParams = MpParams()) -> BpResult:
    u = np.zeros(fg.n_edges)
    G = np.zeros(fg.n_vars)
    converged = False
    sweeps = 0
    orders = _sweep_orders(fg, params)
    for sweeps, perm in zip(range(1, params.max_sweeps + 1), orders):
        change = _bp_sweep(
            perm, fg.clause_ptr, fg.edge_var, fg.edge_sign, u, G, params.damping
        )
        if change < params.epsilon:
            converged = True
            break
    marginals = (1.0 + np.tanh(G)) / 2.0
    return BpResult(
        converged=converged,
        sweeps=sweeps,
        u=u,
        fields=G.copy(),
        marginals=marginals,
        entropy=bethe_entropy(fg, u, G),
    )


# ---------------------------------------------------------------------------
# Warning propagation
# ---------------------------------------------------------------------------


@numba.njit(cache=True)
def _wp_sweep(perm, clause_ptr, edge_var, edge_sign, u_hat, G_hat):
    n_changes = 0
    for idx in range(len(perm)):
        a = perm[idx]
        lo, hi = clause_ptr[a], clause_ptr[a + 1]
        for e in range(lo, hi):
            w = 1
            for e2 in range(lo, hi):
                if e2 == e:
                    continue
                h2 = edge_sign[e2] * G_hat[edge_var[e2]] - u_hat[e2]
                if h2 >= 0:
                    w = 0
                    break
            if w != u_hat[e]:
                G_hat[edge_var[e]] += edge_sign[e] * (w - u_hat[e])
                u_hat[e] = w
                n_changes += 1
    return n_changes


@dataclass(frozen=True)
class WpResult:
    converged: bool
    sweeps: int
    u_hat: np.ndarray  # warnings in {0,1}, per edge
    fields: np.ndarray  # integer local fields h_hat_i (toward +1)
    contradiction: bool


def wp_run(
    fg: FactorGraph, params: MpParams = MpParams(), init: str = "zero"
) -> WpResult:
    """Integer warning updates; converged when a full sweep changes nothing.

    `init`: "zero" (all warnings off — note this is itself a fixed point when
    the formula has no unit clause) or "ones" (every clause starts warning,
    used to seed the dense planted regime).
    """
    if init == "zero":
        u_hat = np.zeros(fg.n_edges, dtype=np.int64)
    elif init == "ones":
        u_hat = np.ones(fg.n_edges, dtype=np.int64)
    else:
        raise ValueError(f"unknown init {init!r}")
    G_hat = np.zeros(fg.n_vars, dtype=np.int64)
    np.add.at(G_hat, fg.edge_var, fg.edge_sign * u_hat)
    converged = False
    sweeps = 0
    orders = _sweep_orders(fg, params)
    for sweeps, perm in zip(range(1, params.max_sweeps + 1), orders):
        if _wp_sweep(perm, fg.clause_ptr, fg.edge_var, fg.edge_sign, u_hat, G_hat) == 0:
            converged = True
            break
    warn = u_hat == 1
    plus = np.zeros(fg.n_vars, dtype=bool)
    minus = np.zeros(fg.n_vars, dtype=bool)
    np.logical_or.at(plus, fg.edge_var[warn & (fg.edge_sign == 1)], True)
    np.logical_or.at(minus, fg.edge_var[warn & (fg.edge_sign == -1)], True)
    return WpResult(
        converged=converged,
        sweeps=sweeps,
        u_hat=u_hat,
        fields=G_hat,
        contradiction=bool(np.any(plus & minus)),
    )


# ---------------------------------------------------------------------------
# Survey propagation
# ---------------------------------------------------------------------------


@numba.njit(cache=True)
def _sp_gamma(e, v, s, delta, var_edges, var_ptr, edge_sign):
    """Probability that variable v is forced to unsatisfy the clause of edge e."""
    pi_agree = 1.0
    pi_dis = 1.0
    for idx in range(var_ptr[v], var_ptr[v + 1]):
        e2 = var_edges[idx]
        if e2 == e:
            continue
        f = 1.0 - delta[e2]
        if edge_sign[e2] == s:
            pi_agree *= f
        else:
            pi_dis *= f
    norm = pi_agree + pi_dis - pi_agree * pi_dis
    if norm <= 0.0:
        return -1.0  # contradiction: warnings force both values
    return (1.0 - pi_dis) * pi_agree / norm


@numba.njit(cache=True)
def _sp_sweep(
    perm, clause_ptr, edge_var, edge_sign, var_edges, var_ptr, delta, damping
):
    max_change = 0.0
    contradiction = False
    gamma = np.empty(64)
    for idx in range(len(perm)):
        a = perm[idx]
        lo, hi = clause_ptr[a], clause_ptr[a + 1]
        for e in range(lo, hi):
            g = _sp_gamma(
                e, edge_var[e], edge_sign[e], delta, var_edges, var_ptr, edge_sign
            )
            if g < 0.0:
                contradiction = True
                g = 0.0
            gamma[e - lo] = g
        for e in range(lo, hi):
            d_new = 1.0
            for e2 in range(lo, hi):
                if e2 != e:
                    d_new *= gamma[e2 - lo]
            d_new = (1.0 - damping) * d_new + damping * delta[e]
            change = abs(d_new - delta[e])
            if change > max_change:
                max_change = change
            delta[e] = d_new
    return max_change, contradiction


@dataclass(frozen=True)
class BiasTriplets:
    """Per-variable cluster biases (gamma_plus + gamma_minus + gamma_zero = 1)."""

    gamma_plus: np.ndarray
    gamma_minus: np.ndarray
    gamma_zero: np.ndarray
    contradiction: np.ndarray  # variables whose warning events are inconsistent

    @property
    def gap(self) -> np.ndarray:
        return np.abs(self.gamma_plus - self.gamma_minus)


def bias_triplets(fg: FactorGraph, delta: np.ndarray) -> BiasTriplets:
    log1m = np.log(np.clip(1.0 - delta, 1e-300, None))
    pi_plus = np.zeros(fg.n_vars)
    pi_minus = np.zeros(fg.n_vars)
    np.add.at(pi_plus, fg.edge_var[fg.edge_sign == 1], log1m[fg.edge_sign == 1])
    np.add.at(pi_minus, fg.edge_var[fg.edge_sign == -1], log1m[fg.edge_sign == -1])
    pi_plus = np.exp(pi_plus)
    pi_minus = np.exp(pi_minus)
    norm = pi_plus + pi_minus - pi_plus * pi_minus
    bad = norm <= 0.0
    norm_safe = np.where(bad, 1.0, norm)
    gp = np.where(bad, 0.0, (1.0 - pi_plus) * pi_minus / norm_safe)
    gm = np.where(bad, 0.0, (1.0 - pi_minus) * pi_plus / norm_safe)
    return BiasTriplets(gp, gm, 1.0 - gp - gm, bad)


@dataclass(frozen=True)
class SpResult:
    converged: bool
    sweeps: int
    delta: np.ndarray  # survey per edge, in [0, 1]
    biases: BiasTriplets
    contradiction: bool

    @property
    def nontrivial_fraction(self) -> float:
        """Fraction of edges carrying a nontrivial survey."""
        if len(self.delta) == 0:
            return 0.0
        return float(np.mean(self.delta > 1e-6))


def sp_run(
    fg: FactorGraph, params: MpParams = MpParams(), init: str | np.ndarray = "random"
) -> SpResult:
    """Damped asynchronous survey updates from a symmetry-broken start.

    `init` may be an array of per-edge surveys to warm-start from (used by
    decimation, where messages change little between rounds).
    """
    rng = as_seed(params.seed).rng()
    if isinstance(init, np.ndarray):
        if len(init) != fg.n_edges:
            raise ValueError("warm-start array length != number of edges")
        delta = np.array(init, dtype=np.float64)
    elif init == "random":
        delta = rng.random(fg.n_edges)
    elif init == "zero":
        delta = np.zeros(fg.n_edges)
    else:
        raise ValueError(f"unknown init {init!r}")
    converged = False
    contradiction = False
    sweeps = 0
    orders = _sweep_orders(fg, replace(params, seed=as_seed(params.seed).spawn(1)))
    for sweeps, perm in zip(range(1, params.max_sweeps + 1), orders):
        change, contra = _sp_sweep(
            perm, fg.clause_ptr, fg.edge_var, fg.edge_sign,
            fg.var_edges, fg.var_ptr, delta, params.damping,
        )
        contradiction = contradiction or contra
        if change < params.epsilon:
            converged = True
            break
    return SpResult(
        converged=converged,
        sweeps=sweeps,
        delta=delta,
        biases=bias_triplets(fg, delta),
        contradiction=contradiction,
    )


# ---------------------------------------------------------------------------
# Decimation
# ---------------------------------------------------------------------------

SP_TRIVIAL_THRESHOLD = 1e-2


@dataclass(frozen=True)
class WalkFallback:
    heuristic: str = "greedy_zero_break"
    noise: float = 0.3
    steps_per_clause: int = 1000


@dataclass(frozen=True)
class DecimationStep:
    variable: int
    value: int
    gap: float
    n_free: int
    n_clauses: int


@dataclass(frozen=True)
class DecimationResult:
    status: str  # "SAT" | "fail"
    reason: str | None  # "non-convergence" | "contradiction" | "fallback-failed"
    assignment: np.ndarray | None
    steps: tuple[DecimationStep, ...]
    fallback_used: bool


def _simplify_tracked(
    formula: CnfFormula, sigma: np.ndarray, origins: np.ndarray
) -> tuple[CnfFormula | None, np.ndarray | None]:
    """Residual formula under the assigned entries of sigma (0 = unassigned),
    plus the surviving clauses' original indices; (None, None) on an empty
    clause."""
    clauses = []
    kept = []
    for ci, cl in enumerate(formula.clauses):
        keep = []
        satisfied = False
        for lit in cl:
            v = sigma[lit.var]
            if v == 0:
                keep.append(lit)
            elif v == lit.sign:
                satisfied = True
                break
        if satisfied:
            continue
        if not keep:
            return None, None
        clauses.append(tuple(keep))
        kept.append(origins[ci])
    return (
        CnfFormula(formula.n_vars, tuple(clauses)),
        np.asarray(kept, dtype=np.int64),
    )


def _propagate_units_tracked(
    formula: CnfFormula, sigma: np.ndarray, origins: np.ndarray
) -> tuple[CnfFormula | None, np.ndarray | None]:
    """Repeated unit assignment + simplification with clause-origin tracking;
    (None, None) on contradiction."""
    current, origins = _simplify_tracked(formula, sigma, origins)
    while current is not None:
        units = [cl[0] for cl in current.clauses if len(cl) == 1]
        if not units:
            return current, origins
        for lit in units:
            if sigma[lit.var] == -lit.sign:
                return None, None
            sigma[lit.var] = lit.sign
        current, origins = _simplify_tracked(current, sigma, origins)
    return None, None


def _simplify(formula: CnfFormula, sigma: np.ndarray) -> CnfFormula | None:
    """Residual formula under the assigned entries of sigma (0 = unassigned).

    Returns None when an empty clause appears.
    """
    residual, _ = _simplify_tracked(
        formula, sigma, np.arange(formula.n_clauses, dtype=np.int64)
    )
    return residual


def _propagate_units(formula: CnfFormula, sigma: np.ndarray) -> CnfFormula | None:
    """Repeated unit assignment + simplification; None on contradiction."""
    residual, _ = _propagate_units_tracked(
        formula, sigma, np.arange(formula.n_clauses, dtype=np.int64)
    )
    return residual


def _formula_arrays(formula: CnfFormula):
    """Flat clause-major CSR arrays (ptr, var, sign) for a CNF formula."""
    m = formula.n_clauses
    total = sum(len(cl) for cl in formula.clauses)
    ptr = np.zeros(m + 1, dtype=np.int64)
    evar = np.empty(total, dtype=np.int64)
    esgn = np.empty(total, dtype=np.int8)
    pos = 0
    for a, cl in enumerate(formula.clauses):
        for lit in cl:
            evar[pos] = lit.var
            esgn[pos] = lit.sign
            pos += 1
        ptr[a + 1] = pos
    return ptr, evar, esgn


def _arrays_to_formula(n_vars, ptr, evar, esgn) -> CnfFormula:
    from .formulas import Literal

    clauses = []
    for a in range(len(ptr) - 1):
        clauses.append(
            tuple(
                Literal(int(evar[e]), int(esgn[e]))
                for e in range(ptr[a], ptr[a + 1])
            )
        )
    return CnfFormula(n_vars, tuple(clauses))


@numba.njit(cache=True)
def _simplify_pass(ptr, evar, esgn, origins, sigma):
    """One simplification pass over CSR clause arrays, assigning unit clauses
    as they appear; returns (ptr, evar, esgn, origins, ok, n_units)."""
    m = len(ptr) - 1
    new_ptr = np.empty(m + 1, dtype=np.int64)
    new_evar = np.empty(len(evar), dtype=np.int64)
    new_esgn = np.empty(len(evar), dtype=np.int8)
    new_orig = np.empty(max(m, 1), dtype=np.int64)
    new_ptr[0] = 0
    n_cl = 0
    n_lit = 0
    n_units = 0
    for a in range(m):
        sat = False
        cnt = 0
        for e in range(ptr[a], ptr[a + 1]):
            v = evar[e]
            s = sigma[v]
            if s == 0:
                new_evar[n_lit + cnt] = v
                new_esgn[n_lit + cnt] = esgn[e]
                cnt += 1
            elif s == esgn[e]:
                sat = True
                break
        if sat:
            continue
        if cnt == 0:
            return new_ptr[:1], new_evar[:0], new_esgn[:0], new_orig[:0], False, 0
        if cnt == 1:
            # unit clause: assign now; the clause becomes satisfied
            sigma[new_evar[n_lit]] = new_esgn[n_lit]
            n_units += 1
            continue
        n_lit += cnt
        n_cl += 1
        new_ptr[n_cl] = n_lit
        new_orig[n_cl - 1] = origins[a]
    return (
        new_ptr[: n_cl + 1],
        new_evar[:n_lit],
        new_esgn[:n_lit],
        new_orig[:n_cl],
        True,
        n_units,
    )


def _up_arrays(ptr, evar, esgn, origins, sigma):
    """Simplify + unit-propagate to a fixed point; ok=False on contradiction."""
    while True:
        ptr, evar, esgn, origins, ok, n_units = _simplify_pass(
            ptr, evar, esgn, origins, sigma
        )
        if not ok:
            return ptr, evar, esgn, origins, False
        if n_units == 0:
            return ptr, evar, esgn, origins, True


def mp_decimate(
    formula: CnfFormula,
    guide: str = "sp",
    params: MpParams = MpParams(),
    fallback: WalkFallback | None = WalkFallback(),
    block_fraction: float = 0.0,
    seed: RngSeed | int = 0,
) -> DecimationResult:
    """Fix extremal-bias variables one (or a block) at a time, guided by
    message passing; SP hands the paramagnetic residual to the walk fallback.
    """
    from .walk import focused_walk

    if guide not in ("bp", "wp", "sp"):
        raise ValueError(f"unknown guide {guide!r}")
    base = as_seed(seed)
    rng = base.rng()
    n_vars = formula.n_vars
    sigma = np.zeros(n_vars, dtype=np.int8)
    steps: list[DecimationStep] = []
    fallback_used = False
    round_idx = 0
    ptr, evar, esgn = _formula_arrays(formula)
    origins = np.arange(formula.n_clauses, dtype=np.int64)
    # Warm-start store for SP surveys, keyed by (original clause, variable):
    # fixing a small block barely moves the messages, so reusing the previous
    # round's surveys cuts convergence from hundreds of sweeps to a handful.
    delta_store = None
    okeys_sorted = None
    osort = None
    if guide == "sp":
        okeys = evar + np.int64(n_vars) * np.repeat(origins, np.diff(ptr))
        osort = np.argsort(okeys)
        okeys_sorted = okeys[osort]
        delta_store = rng.random(len(evar))
    ptr, evar, esgn, origins, ok = _up_arrays(ptr, evar, esgn, origins, sigma)
    while True:
        if not ok:
            return DecimationResult("fail", "contradiction", None, tuple(steps), False)
        free = np.nonzero(sigma == 0)[0]
        n_clauses = len(ptr) - 1
        if n_clauses == 0:
            sigma[sigma == 0] = 1  # unconstrained leftovers
            assert energy(formula, sigma) == 0
            return DecimationResult("SAT", None, sigma, tuple(steps), fallback_used)
        fg = from_arrays(n_vars, ptr, evar, esgn)
        mp_params = replace(params, seed=base.spawn(round_idx))
        if guide == "bp":
            res = bp_run(fg, mp_params)
            if not res.converged:
                return DecimationResult(
                    "fail", "non-convergence", None, tuple(steps), False
                )
            score = np.abs(res.fields)
            value_of = np.where(res.fields >= 0, 1, -1)
        elif guide == "wp":
            res = wp_run(fg, mp_params)
            if not res.converged:
                return DecimationResult(
                    "fail", "non-convergence", None, tuple(steps), False
                )
            if res.contradiction:
                return DecimationResult(
                    "fail", "contradiction", None, tuple(steps), False
                )
            score = np.abs(res.fields).astype(float)
            value_of = np.where(res.fields >= 0, 1, -1)
        else:
            ekeys = evar + np.int64(n_vars) * np.repeat(origins, np.diff(ptr))
            slots = osort[np.searchsorted(okeys_sorted, ekeys)]
            res = sp_run(fg, mp_params, init=delta_store[slots])
            if not res.converged:
                # one retry from a fresh random start before giving up
                res = sp_run(fg, replace(mp_params, seed=base.spawn(round_idx, 2)))
            delta_store[slots] = res.delta
            if not res.converged:
                return DecimationResult(
                    "fail", "non-convergence", None, tuple(steps), False
                )
            if res.contradiction:
                return DecimationResult(
                    "fail", "contradiction", None, tuple(steps), False
                )
            score = res.biases.gap
            value_of = np.where(res.biases.gamma_plus >= res.biases.gamma_minus, 1, -1)
        deg = np.diff(fg.var_ptr)
        usable = (sigma == 0) & (deg > 0)
        if guide == "sp" and (not np.any(usable) or score[usable].max() < SP_TRIVIAL_THRESHOLD):
            # paramagnetic residual: hand off to local search
            if fallback is None:
                return DecimationResult(
                    "fail", "fallback-failed", None, tuple(steps), False
                )
            fallback_used = True
            residual = _arrays_to_formula(n_vars, ptr, evar, esgn)
            out = focused_walk(
                residual,
                fallback.heuristic,
                fallback.noise,
                t_max=fallback.steps_per_clause * max(1, n_clauses),
                seed=base.spawn(round_idx, 1),
            )
            if out.status != "solution":
                return DecimationResult(
                    "fail", "fallback-failed", None, tuple(steps), True
                )
            sigma[sigma == 0] = out.assignment[sigma == 0]
            assert energy(formula, sigma) == 0
            return DecimationResult("SAT", None, sigma, tuple(steps), True)
        if not np.any(usable):
            # every remaining variable is isolated yet clauses remain: bug guard
            return DecimationResult("fail", "contradiction", None, tuple(steps), False)
        n_fix = 1
        if block_fraction > 0.0:
            n_fix = max(1, int(block_fraction * len(free)))
        cand = np.nonzero(usable)[0]
        order = np.argsort(score[cand])[::-1]
        picked = cand[order[:n_fix]]
        if n_fix == 1:
            # break exact ties uniformly
            top = cand[score[cand] == score[picked[0]]]
            picked = np.array([top[int(rng.integers(len(top)))]])
        for v in picked:
            sigma[v] = value_of[v]
            steps.append(
                DecimationStep(
                    int(v), int(value_of[v]), float(score[v]),
                    int((sigma == 0).sum()), n_clauses,
                )
            )
        ptr, evar, esgn, origins, ok = _up_arrays(ptr, evar, esgn, origins, sigma)
        round_idx += 1


# ---------------------------------------------------------------------------
# Dense planted formulas and WP
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PlantedWpResult:
    converged: bool
    sweeps: int
    frozen_fraction: float  # variables with a nonzero field
    wrong_sign_fraction: float  # nonzero fields disagreeing with the planting
    residual_solved: bool
    assignment_valid: bool


def planted_wp_experiment(
    n: int,
    alpha: float,
    k: int = 3,
    seed: RngSeed | int = 0,
    params: MpParams = MpParams(),
) -> PlantedWpResult:
    """Warning propagation on a dense planted instance, seeded with every
    clause warning; nonzero converged fields should reproduce the planting."""
    from .dpll import dpll_complete
    from .generators import EnsembleSpec, gen_formula

    base = as_seed(seed)
    formula, planted = gen_formula(
        EnsembleSpec("planted_ksat", n=n, k=k, alpha=alpha, seed=base.spawn(0))
    )
    fg = to_factor_graph(formula)
    res = wp_run(fg, replace(params, seed=base.spawn(1)), init="ones")
    nonzero = res.fields != 0
    frozen_fraction = float(nonzero.mean())
    wrong = nonzero & (np.sign(res.fields) != planted)
    wrong_sign_fraction = float(wrong.sum() / max(1, nonzero.sum()))
    sigma = np.zeros(n, dtype=np.int8)
    sigma[nonzero] = np.sign(res.fields[nonzero]).astype(np.int8)
    residual = _propagate_units(formula, sigma)
    residual_solved = False
    if residual is not None:
        if residual.n_clauses == 0:
            residual_solved = True
        else:
            sub = dpll_complete(residual, "uc", seed=base.spawn(2), node_budget=100_000)
            if sub.outcome == "SAT":
                residual_solved = True
                free = sigma == 0
                sigma[free] = sub.assignment[free]
        if residual_solved:
            sigma[sigma == 0] = 1
    valid = residual_solved and energy(formula, sigma) == 0
    return PlantedWpResult(
        converged=res.converged,
        sweeps=res.sweeps,
        frozen_fraction=frozen_fraction,
        wrong_sign_fraction=wrong_sign_fraction,
        residual_solved=residual_solved,
        assignment_valid=bool(valid),
    )
