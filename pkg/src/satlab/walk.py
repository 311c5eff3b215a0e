"""Random-walk solvers with trajectory recording and plateau estimation.

The step loop is a numba kernel over flat CSR clause/occurrence arrays; it
consumes uniforms from a buffer refilled by the Philox generator, so results
stay deterministic per seed while large instances (n ~ 1e4, 1e7+ flips) run
in seconds.  Energy is maintained incrementally via per-clause true-literal
counts plus an unsatisfied-clause list with a position map for O(1) sampling.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numba
import numpy as np

from .formulas import CnfFormula, energy
from .rng import RngSeed, as_seed

MODE_UNIFORM = 0
MODE_GREEDY_ZERO_BREAK = 1
MODE_RECORD_TOLERANCE = 2

HEURISTICS = {
    "uniform": MODE_UNIFORM,
    "greedy_zero_break": MODE_GREEDY_ZERO_BREAK,
    "record_tolerance": MODE_RECORD_TOLERANCE,
}

_BUF_CHUNK = 1 << 20  # uniforms per refill


@dataclass(frozen=True)
class WalkTrajectory:
    """Energy samples along a walk; T in steps, E in unsatisfied clauses."""

    T: np.ndarray
    E: np.ndarray
    n_clauses: int

    def __post_init__(self):
        assert np.all(np.diff(self.T) > 0), "step counts must strictly increase"
        assert self.E.min(initial=0) >= 0 and self.E.max(initial=0) <= self.n_clauses

    @property
    def t(self) -> np.ndarray:
        """Reduced time T / M."""
        return self.T / max(1, self.n_clauses)

    @property
    def phi(self) -> np.ndarray:
        """Unsatisfied fraction E / M."""
        return self.E / max(1, self.n_clauses)


@dataclass(frozen=True)
class WalkOutcome:
    status: str  # "solution" | "undetermined"
    assignment: np.ndarray | None
    steps: int
    restarts: int
    trajectory: WalkTrajectory


@dataclass
class _WalkState:
    clause_ptr: np.ndarray
    clause_var: np.ndarray
    clause_sign: np.ndarray
    occ_ptr: np.ndarray
    occ_clause: np.ndarray
    occ_sign: np.ndarray
    sigma: np.ndarray = field(init=False)
    n_true: np.ndarray = field(init=False)
    unsat_list: np.ndarray = field(init=False)
    unsat_pos: np.ndarray = field(init=False)
    n_unsat: int = field(init=False)

    @property
    def n_clauses(self) -> int:
        return len(self.clause_ptr) - 1

    def reset(self, sigma: np.ndarray) -> None:
        self.sigma = sigma.copy()
        m = self.n_clauses
        self.n_true = np.zeros(m, dtype=np.int32)
        self.unsat_list = np.zeros(m, dtype=np.int32)
        self.unsat_pos = np.full(m, -1, dtype=np.int32)
        self.n_unsat = int(
            _init_counts(
                self.clause_ptr, self.clause_var, self.clause_sign,
                self.sigma, self.n_true, self.unsat_list, self.unsat_pos,
            )
        )

    def recount_energy(self) -> int:
        """Energy from scratch, for cross-checking the incremental count."""
        true_per_clause = np.zeros(self.n_clauses, dtype=np.int64)
        np.add.at(
            true_per_clause,
            np.repeat(np.arange(self.n_clauses), np.diff(self.clause_ptr)),
            (self.sigma[self.clause_var] == self.clause_sign).astype(np.int64),
        )
        return int((true_per_clause == 0).sum())


def _flatten(formula: CnfFormula) -> _WalkState:
    m = formula.n_clauses
    clause_ptr = np.zeros(m + 1, dtype=np.int64)
    cv, cs = [], []
    for a, cl in enumerate(formula.clauses):
        for lit in cl:
            cv.append(lit.var)
            cs.append(lit.sign)
        clause_ptr[a + 1] = len(cv)
    clause_var = np.asarray(cv, dtype=np.int32)
    clause_sign = np.asarray(cs, dtype=np.int8)
    order = np.argsort(clause_var, kind="stable")
    occ_clause = np.repeat(np.arange(m, dtype=np.int32), np.diff(clause_ptr))[order]
    occ_sign = clause_sign[order]
    occ_ptr = np.zeros(formula.n_vars + 1, dtype=np.int64)
    np.add.at(occ_ptr, clause_var + 1, 1)
    occ_ptr = np.cumsum(occ_ptr)
    return _WalkState(clause_ptr, clause_var, clause_sign, occ_ptr, occ_clause, occ_sign)


@numba.njit(cache=True)
def _init_counts(clause_ptr, clause_var, clause_sign, sigma, n_true, unsat_list, unsat_pos):
    n_unsat = 0
    for a in range(len(clause_ptr) - 1):
        t = 0
        for e in range(clause_ptr[a], clause_ptr[a + 1]):
            if sigma[clause_var[e]] == clause_sign[e]:
                t += 1
        n_true[a] = t
        if t == 0:
            unsat_list[n_unsat] = a
            unsat_pos[a] = n_unsat
            n_unsat += 1
    return n_unsat


@numba.njit(cache=True, inline="always")
def _flip(v, sigma, occ_ptr, occ_clause, occ_sign, n_true, unsat_list, unsat_pos, n_unsat):
    for e in range(occ_ptr[v], occ_ptr[v + 1]):
        c = occ_clause[e]
        if sigma[v] == occ_sign[e]:  # literal turns false
            n_true[c] -= 1
            if n_true[c] == 0:
                unsat_list[n_unsat] = c
                unsat_pos[c] = n_unsat
                n_unsat += 1
        else:  # literal turns true
            if n_true[c] == 0:
                last = unsat_list[n_unsat - 1]
                p = unsat_pos[c]
                unsat_list[p] = last
                unsat_pos[last] = p
                unsat_pos[c] = -1
                n_unsat -= 1
            n_true[c] += 1
    sigma[v] = -sigma[v]
    return n_unsat


@numba.njit(cache=True, inline="always")
def _break_count(v, sigma, occ_ptr, occ_clause, occ_sign, n_true):
    b = 0
    for e in range(occ_ptr[v], occ_ptr[v + 1]):
        if n_true[occ_clause[e]] == 1 and sigma[v] == occ_sign[e]:
            b += 1
    return b


@numba.njit(cache=True)
def _walk_chunk(
    clause_ptr, clause_var, clause_sign,
    occ_ptr, occ_clause, occ_sign,
    sigma, n_true, unsat_list, unsat_pos, n_unsat,
    T, t_cap, u, mode, noise, tolerance, best_e,
    stride, next_rec, rec_T, rec_E, n_rec,
):
    """Run until solved, t_cap steps, or the uniform buffer runs low."""
    i = 0
    n_u = len(u)
    while T < t_cap and n_unsat > 0 and i + 3 <= n_u:
        c = unsat_list[min(int(u[i] * n_unsat), n_unsat - 1)]
        i += 1
        lo, hi = clause_ptr[c], clause_ptr[c + 1]
        kk = hi - lo
        if mode == MODE_GREEDY_ZERO_BREAK and u[i] >= noise:
            i += 1
            # greedy move: uniform among the least-breaking variables of the
            # clause (zero-break "freebies" when they exist)
            best = -1
            n_best = 0
            for e in range(lo, hi):
                w = clause_var[e]
                b = _break_count(w, sigma, occ_ptr, occ_clause, occ_sign, n_true)
                if best < 0 or b < best:
                    best = b
                    n_best = 1
                elif b == best:
                    n_best += 1
            pick = min(int(u[i] * n_best), n_best - 1)
            i += 1
            v = -1
            for e in range(lo, hi):
                w = clause_var[e]
                if _break_count(w, sigma, occ_ptr, occ_clause, occ_sign, n_true) == best:
                    if pick == 0:
                        v = w
                        break
                    pick -= 1
        else:
            if mode == MODE_GREEDY_ZERO_BREAK:
                i += 1  # the noise draw
            v = clause_var[lo + min(int(u[i] * kk), kk - 1)]
            i += 1
        if mode == MODE_RECORD_TOLERANCE:
            brk = _break_count(v, sigma, occ_ptr, occ_clause, occ_sign, n_true)
            mk = 0
            for e in range(occ_ptr[v], occ_ptr[v + 1]):
                if n_true[occ_clause[e]] == 0:
                    mk += 1
            if n_unsat + brk - mk > best_e + tolerance:
                T += 1  # rejected move still advances time
                if T >= next_rec and n_rec < len(rec_T):
                    rec_T[n_rec] = T
                    rec_E[n_rec] = n_unsat
                    n_rec += 1
                    next_rec += stride
                continue
        n_unsat = _flip(
            v, sigma, occ_ptr, occ_clause, occ_sign,
            n_true, unsat_list, unsat_pos, n_unsat,
        )
        if n_unsat < best_e:
            best_e = n_unsat
        T += 1
        if T >= next_rec and n_rec < len(rec_T):
            rec_T[n_rec] = T
            rec_E[n_rec] = n_unsat
            n_rec += 1
            next_rec += stride
    return T, n_unsat, best_e, next_rec, n_rec, i


def _run_walk(
    state: _WalkState,
    sigma0: np.ndarray,
    t_max: int,
    rng: np.random.Generator,
    mode: int,
    noise: float,
    tolerance: float,
    stride: int,
    paranoid: bool = False,
) -> tuple[int, int, list[int], list[int]]:
    """Drive the kernel with buffered uniforms; returns (T, E, rec_T, rec_E)."""
    state.reset(sigma0)
    T = 0
    best_e = state.n_unsat
    next_rec = stride
    rec_T_all: list[int] = [0]
    rec_E_all: list[int] = [state.n_unsat]
    while T < t_max and state.n_unsat > 0:
        u = rng.random(min(_BUF_CHUNK, 4 * (t_max - T) + 8))
        # each step consumes >= 2 uniforms, bounding the chunk's sample count
        cap = min(len(u) // 2, t_max - T) // stride + 2
        rec_T = np.zeros(cap, dtype=np.int64)
        rec_E = np.zeros(cap, dtype=np.int64)
        t_cap = min(t_max, T + 1000) if paranoid else t_max
        n_rec = 0
        T, n_unsat, best_e, next_rec, n_rec, _ = _walk_chunk(
            state.clause_ptr, state.clause_var, state.clause_sign,
            state.occ_ptr, state.occ_clause, state.occ_sign,
            state.sigma, state.n_true, state.unsat_list, state.unsat_pos,
            state.n_unsat,
            T, t_cap, u, mode, noise, tolerance, best_e,
            stride, next_rec, rec_T, rec_E, n_rec,
        )
        state.n_unsat = int(n_unsat)
        rec_T_all.extend(rec_T[:n_rec].tolist())
        rec_E_all.extend(rec_E[:n_rec].tolist())
        if paranoid:
            assert state.n_unsat == state.recount_energy(), "incremental energy drifted"
    return T, state.n_unsat, rec_T_all, rec_E_all


def _outcome(
    formula: CnfFormula, state: _WalkState, T: int, E: int,
    rec_T: list[int], rec_E: list[int], restarts: int,
) -> WalkOutcome:
    if rec_T[-1] != T:
        rec_T.append(T)
        rec_E.append(E)
    traj = WalkTrajectory(
        np.asarray(rec_T, dtype=np.int64),
        np.asarray(rec_E, dtype=np.int64),
        formula.n_clauses,
    )
    if E == 0:
        assignment = state.sigma.copy()
        assert energy(formula, assignment) == 0, "solution certificate failed"
        return WalkOutcome("solution", assignment, T, restarts, traj)
    return WalkOutcome("undetermined", None, T, restarts, traj)


def _stride(formula: CnfFormula) -> int:
    return max(1, formula.n_clauses // 1000)


def prwsat(
    formula: CnfFormula,
    t_max: int,
    seed: RngSeed | int = 0,
    paranoid: bool = False,
) -> WalkOutcome:
    """Pure random walk: flip a uniform variable of a uniform UNSAT clause."""
    if t_max < 0:
        raise ValueError("t_max must be >= 0")
    rng = as_seed(seed).rng()
    state = _flatten(formula)
    sigma0 = (rng.integers(0, 2, size=formula.n_vars) * 2 - 1).astype(np.int8)
    T, E, rT, rE = _run_walk(
        state, sigma0, t_max, rng, MODE_UNIFORM, 0.0, 0.0, _stride(formula), paranoid
    )
    return _outcome(formula, state, T, E, rT, rE, restarts=0)


def schoening(
    formula: CnfFormula,
    max_restarts: int,
    seed: RngSeed | int = 0,
) -> WalkOutcome:
    """Random walk with restarts: 3n steps per try from a fresh assignment."""
    k = max((len(c) for c in formula.clauses), default=3)
    if k != 3:
        warnings.warn(f"restart schedule 3n is tuned for k=3, got k={k}", stacklevel=2)
    rng = as_seed(seed).rng()
    state = _flatten(formula)
    t_max = 3 * formula.n_vars
    stride = _stride(formula)
    last = None
    for r in range(max_restarts + 1):
        sigma0 = (rng.integers(0, 2, size=formula.n_vars) * 2 - 1).astype(np.int8)
        T, E, rT, rE = _run_walk(
            state, sigma0, t_max, rng, MODE_UNIFORM, 0.0, 0.0, stride
        )
        last = (T, E, rT, rE)
        if E == 0:
            return _outcome(formula, state, T, E, rT, rE, restarts=r)
    T, E, rT, rE = last
    return _outcome(formula, state, T, E, rT, rE, restarts=max_restarts)


def focused_walk(
    formula: CnfFormula,
    heuristic: str,
    noise: float,
    t_max: int,
    seed: RngSeed | int = 0,
    tolerance: float = 0.0,
    paranoid: bool = False,
) -> WalkOutcome:
    """Focused variants: the flipped variable always sits in an UNSAT clause.

    `uniform` is the plain random walk; `greedy_zero_break` prefers (with
    probability 1 - noise) a variable whose flip breaks no satisfied clause,
    falling back to the least-breaking variable of the clause when no such
    freebie exists; `record_tolerance` rejects flips that would push the
    energy above the best level seen so far plus `tolerance`.
    """
    if heuristic not in HEURISTICS:
        raise ValueError(f"unknown heuristic {heuristic!r}")
    if not 0.0 <= noise <= 1.0:
        raise ValueError("noise must be in [0, 1]")
    if t_max < 0:
        raise ValueError("t_max must be >= 0")
    rng = as_seed(seed).rng()
    state = _flatten(formula)
    sigma0 = (rng.integers(0, 2, size=formula.n_vars) * 2 - 1).astype(np.int8)
    mode = HEURISTICS[heuristic]
    if mode == MODE_GREEDY_ZERO_BREAK and noise == 1.0:
        mode = MODE_UNIFORM  # exact reduction, including the uniform stream
    T, E, rT, rE = _run_walk(
        state, sigma0, t_max, rng, mode, noise, tolerance,
        _stride(formula), paranoid,
    )
    return _outcome(formula, state, T, E, rT, rE, restarts=0)


@dataclass(frozen=True)
class PlateauEstimate:
    phi_as: float
    stderr: float
    n_runs: int
    n_solved: int  # runs that found a solution inside the window (excluded)
    reference_alpha: float  # (2^k - 1)/k, the asymptotic-plateau onset scale


def plateau_estimate(
    formulas: list[CnfFormula],
    t_burn: float,
    t_measure: float,
    seed: RngSeed | int = 0,
) -> PlateauEstimate:
    """Long-time unsatisfied fraction of the plain walk, averaged over runs."""
    if t_measure <= t_burn:
        raise ValueError("t_measure must exceed t_burn")
    base = as_seed(seed)
    means = []
    n_solved = 0
    k = max((len(c) for f in formulas for c in f.clauses), default=3)
    for idx, f in enumerate(formulas):
        m = f.n_clauses
        out = prwsat(f, t_max=int(math.ceil(t_measure * m)), seed=base.spawn(idx))
        if out.status == "solution":
            n_solved += 1
            continue
        t = out.trajectory.t
        phi = out.trajectory.phi
        window = (t >= t_burn) & (t <= t_measure)
        means.append(float(phi[window].mean()))
    arr = np.asarray(means)
    if len(arr) == 0:
        return PlateauEstimate(0.0, 0.0, len(formulas), n_solved, (2.0**k - 1.0) / k)
    stderr = float(arr.std(ddof=1) / math.sqrt(len(arr))) if len(arr) > 1 else 0.0
    return PlateauEstimate(
        float(arr.mean()), stderr, len(formulas), n_solved, (2.0**k - 1.0) / k
    )
