"""Backtrack-free heuristic search and complete DPLL with tree statistics.

The search state keeps, per clause, the number of satisfying and unassigned
literals, plus exact per-length bucket lists (position maps, swap-remove) so
unit clauses and shortest clauses are sampled in O(1).  Assignments are fully
reversible, which is what the chronological backtracking of the complete
procedure relies on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .formulas import CnfFormula, Literal, energy
from .rng import RngSeed, as_seed


class Contradiction(Exception):
    """An empty clause (or a pair of opposite units) was derived."""


class BudgetExceeded(Exception):
    pass


# ---------------------------------------------------------------------------
# Reversible search state
# ---------------------------------------------------------------------------


class SearchState:
    """Residual formula under a partial assignment, with O(1) clause sampling.

    A clause is *alive* while no literal in it is satisfied; its bucket key is
    its number of unassigned literals.  Length-0 alive clauses are
    contradictions (counted in `n_empty`).
    """

    def __init__(self, formula: CnfFormula):
        self.formula = formula
        self.n = formula.n_vars
        self.m = formula.n_clauses
        self.k_max = max((len(c) for c in formula.clauses), default=0)
        self.clause_lits: list[list[Literal]] = [list(c) for c in formula.clauses]
        self.occ: list[list[tuple[int, int]]] = [[] for _ in range(self.n)]
        for c, cl in enumerate(formula.clauses):
            for lit in cl:
                self.occ[lit.var].append((c, lit.sign))
        self.sigma = [0] * self.n
        self.n_true = [0] * self.m
        self.n_unassigned = [len(c) for c in formula.clauses]
        self.n_sat = 0
        self.n_empty = 0
        self.trail: list[int] = []
        # per-length buckets of alive clauses; always provide the unit bucket
        # so propagation can poll it even on clause-free formulas
        self.buckets: list[list[int]] = [[] for _ in range(max(self.k_max, 1) + 1)]
        self.bucket_pos = [-1] * self.m
        self.bucket_len = [-1] * self.m
        for c in range(self.m):
            self._bucket_insert(c, self.n_unassigned[c])
        # unassigned-variable list with position map
        self.free_vars = list(range(self.n))
        self.free_pos = list(range(self.n))

    # -- bucket plumbing ----------------------------------------------------

    def _bucket_insert(self, c: int, length: int) -> None:
        b = self.buckets[length]
        self.bucket_pos[c] = len(b)
        self.bucket_len[c] = length
        b.append(c)

    def _bucket_remove(self, c: int) -> None:
        length = self.bucket_len[c]
        b = self.buckets[length]
        p = self.bucket_pos[c]
        last = b[-1]
        b[p] = last
        self.bucket_pos[last] = p
        b.pop()
        self.bucket_pos[c] = -1
        self.bucket_len[c] = -1

    def _free_remove(self, v: int) -> None:
        p = self.free_pos[v]
        last = self.free_vars[-1]
        self.free_vars[p] = last
        self.free_pos[last] = p
        self.free_vars.pop()
        self.free_pos[v] = -1

    def _free_insert(self, v: int) -> None:
        self.free_pos[v] = len(self.free_vars)
        self.free_vars.append(v)

    # -- observables ---------------------------------------------------------

    @property
    def n_assigned(self) -> int:
        return len(self.trail)

    def length_counts(self) -> list[int]:
        """Number of alive residual clauses per length (index = length)."""
        return [len(b) for b in self.buckets]

    def residual_pairs(self) -> list[tuple[int, int]]:
        """Variable pairs of the alive length-2 clauses (for uniformity checks)."""
        pairs = []
        for c in self.buckets[2] if self.k_max >= 2 else []:
            vs = sorted(l.var for l in self.clause_lits[c] if self.sigma[l.var] == 0)
            pairs.append((vs[0], vs[1]))
        return pairs

    # -- assignment ----------------------------------------------------------

    def assign(self, var: int, val: int) -> None:
        assert self.sigma[var] == 0
        self.sigma[var] = val
        self.trail.append(var)
        self._free_remove(var)
        for c, s in self.occ[var]:
            if s == val:
                self.n_true[c] += 1
                if self.n_true[c] == 1:
                    self.n_sat += 1
                    self._bucket_remove(c)
                self.n_unassigned[c] -= 1
            else:
                self.n_unassigned[c] -= 1
                if self.n_true[c] == 0:
                    self._bucket_remove(c)
                    self._bucket_insert(c, self.n_unassigned[c])
                    if self.n_unassigned[c] == 0:
                        self.n_empty += 1

    def unassign(self) -> int:
        var = self.trail.pop()
        val = self.sigma[var]
        for c, s in reversed(self.occ[var]):
            if s == val:
                self.n_unassigned[c] += 1
                self.n_true[c] -= 1
                if self.n_true[c] == 0:
                    self.n_sat -= 1
                    self._bucket_insert(c, self.n_unassigned[c])
            else:
                if self.n_true[c] == 0:
                    if self.n_unassigned[c] == 0:
                        self.n_empty -= 1
                    self._bucket_remove(c)
                    self._bucket_insert(c, self.n_unassigned[c] + 1)
                self.n_unassigned[c] += 1
        self.sigma[var] = 0
        self._free_insert(var)
        return var

    def rewind_to(self, mark: int) -> None:
        while len(self.trail) > mark:
            self.unassign()

    def propagate(self) -> list[Literal]:
        """Assign variables of unit clauses until none remain or an empty
        clause appears; returns the forced literals in order."""
        forced: list[Literal] = []
        while self.n_empty == 0 and self.buckets[1]:
            c = self.buckets[1][-1]
            lit = next(
                l for l in self.clause_lits[c] if self.sigma[l.var] == 0
            )
            self.assign(lit.var, lit.sign)
            forced.append(Literal(lit.var, lit.sign))
        return forced

    def solved(self) -> bool:
        return self.n_empty == 0 and self.n_sat == self.m

    def assignment(self) -> np.ndarray:
        """Current assignment, unassigned variables defaulted to +1."""
        return np.array([s if s != 0 else 1 for s in self.sigma], dtype=np.int8)


def unit_propagation(state: SearchState) -> list[Literal]:
    """Run propagation to completion; raises Contradiction on an empty clause."""
    forced = state.propagate()
    if state.n_empty > 0:
        raise Contradiction(f"{state.n_empty} empty clause(s) after propagation")
    return forced


# ---------------------------------------------------------------------------
# Heuristic free choices
# ---------------------------------------------------------------------------


def _choose_uc(state: SearchState, rng: np.random.Generator) -> tuple[int, int]:
    v = state.free_vars[int(rng.integers(len(state.free_vars)))]
    return v, int(rng.integers(0, 2)) * 2 - 1


def _choose_guc(state: SearchState, rng: np.random.Generator) -> tuple[int, int]:
    for length in range(2, state.k_max + 1):
        b = state.buckets[length]
        if b:
            c = b[int(rng.integers(len(b)))]
            cand = [l for l in state.clause_lits[c] if state.sigma[l.var] == 0]
            lit = cand[int(rng.integers(len(cand)))]
            return lit.var, lit.sign
    return _choose_uc(state, rng)  # no clause left: any free variable works


HEURISTICS = {"uc": _choose_uc, "guc": _choose_guc}


# ---------------------------------------------------------------------------
# Trajectories in the (p, alpha) plane
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PlaneTrajectory:
    """Residual-formula coordinates sampled along a search.

    `counts[j, L]` is the number of alive length-L clauses at sample j; the
    reduced views t, p, alpha specialise to 3-SAT inputs.
    """

    n_vars: int
    T: np.ndarray  # assigned-variable counts at the samples
    counts: np.ndarray  # (n_samples, k_max + 1)

    @property
    def t(self) -> np.ndarray:
        return self.T / self.n_vars

    @property
    def total(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def p(self) -> np.ndarray:
        """Fraction of residual clauses of length 3."""
        tot = self.total
        out = np.ones_like(tot, dtype=float)
        nz = tot > 0
        out[nz] = self.counts[nz, 3] / tot[nz] if self.counts.shape[1] > 3 else 0.0
        return out

    @property
    def alpha(self) -> np.ndarray:
        """Residual clauses per unassigned variable."""
        free = np.maximum(self.n_vars - self.T, 1)
        return self.total / free


class _TrajectoryRecorder:
    def __init__(self, state: SearchState):
        self.stride = max(1, state.n // 500)
        self.state = state
        self.T: list[int] = []
        self.counts: list[list[int]] = []
        self.next_rec = 0

    def maybe_record(self) -> None:
        T = self.state.n_assigned
        if T >= self.next_rec:
            self.T.append(T)
            row = self.state.length_counts()
            row += [0] * (4 - len(row))
            self.counts.append(row)
            self.next_rec = T + self.stride

    def done(self) -> PlaneTrajectory:
        return PlaneTrajectory(
            self.state.n,
            np.asarray(self.T, dtype=np.int64),
            np.asarray(self.counts, dtype=np.int64),
        )


# ---------------------------------------------------------------------------
# Backtrack-free search
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NoBacktrackOutcome:
    success: bool
    assignment: np.ndarray | None
    trajectory: PlaneTrajectory
    n_assigned_at_stop: int


def run_no_backtrack(
    formula: CnfFormula,
    heuristic: str = "uc",
    seed: RngSeed | int = 0,
) -> NoBacktrackOutcome:
    """Alternate unit propagation and one heuristic free choice; never undo."""
    choose = HEURISTICS[heuristic]
    rng = as_seed(seed).rng()
    state = SearchState(formula)
    rec = _TrajectoryRecorder(state)
    rec.maybe_record()
    while True:
        state.propagate()
        rec.maybe_record()
        if state.n_empty > 0:
            return NoBacktrackOutcome(False, None, rec.done(), state.n_assigned)
        if state.solved():
            sigma = state.assignment()
            assert energy(formula, sigma) == 0
            return NoBacktrackOutcome(True, sigma, rec.done(), state.n_assigned)
        if not state.free_vars:
            return NoBacktrackOutcome(False, None, rec.done(), state.n_assigned)
        var, val = choose(state, rng)
        state.assign(var, val)
        rec.maybe_record()


# ---------------------------------------------------------------------------
# Complete DPLL
# ---------------------------------------------------------------------------


@dataclass
class TreeStats:
    splits: int = 0
    up_steps: int = 0
    contradictions: int = 0
    highest_backtrack: int | None = None  # shallowest split depth re-branched
    outcome: str = "budget"  # "SAT" | "UNSAT" | "budget"


@dataclass(frozen=True)
class DpllResult:
    outcome: str
    assignment: np.ndarray | None
    stats: TreeStats


def _decide_width_two(formula: CnfFormula) -> np.ndarray | None:
    """Implication-graph decision for formulas of width <= 2.

    Literal 2v encodes sigma_v = +1, literal 2v + 1 encodes sigma_v = -1; a
    clause (a or b) contributes edges not-a -> b and not-b -> a, a unit clause
    the single edge not-a -> a.  The formula is satisfiable iff no variable
    shares a strongly connected component with its negation; a model reads off
    the topological order of the condensation (set a literal true when its
    component comes after the complement's).
    """
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import connected_components

    def pos(lit: Literal) -> int:
        return 2 * lit.var + (0 if lit.sign == 1 else 1)

    def neg(lit: Literal) -> int:
        return 2 * lit.var + (1 if lit.sign == 1 else 0)

    rows: list[int] = []
    cols: list[int] = []
    for cl in formula.clauses:
        if len(cl) == 1:
            rows.append(neg(cl[0]))
            cols.append(pos(cl[0]))
        else:
            a, b = cl
            rows += [neg(a), neg(b)]
            cols += [pos(b), pos(a)]
    n2 = 2 * formula.n_vars
    graph = csr_matrix(
        (np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(n2, n2)
    )
    n_comp, comp = connected_components(graph, directed=True, connection="strong")
    lit_pos = comp[0::2]
    lit_neg = comp[1::2]
    if np.any(lit_pos == lit_neg):
        return None
    # Kahn topological order of the condensation
    cr, cc = comp[rows], comp[cols]
    keep = cr != cc
    cr, cc = cr[keep], cc[keep]
    indeg = np.bincount(cc, minlength=n_comp)
    order = np.empty(n_comp, dtype=np.int64)
    pos_of = np.empty(n_comp, dtype=np.int64)
    frontier = list(np.flatnonzero(indeg == 0))
    succ: dict[int, list[int]] = {}
    for a, b in zip(cr.tolist(), cc.tolist()):
        succ.setdefault(a, []).append(b)
    k = 0
    while frontier:
        c = frontier.pop()
        order[k] = c
        k += 1
        for b in succ.get(c, ()):
            indeg[b] -= 1
            if indeg[b] == 0:
                frontier.append(b)
    pos_of[order] = np.arange(n_comp)
    sigma = np.where(pos_of[lit_pos] > pos_of[lit_neg], 1, -1).astype(np.int8)
    assert energy(formula, sigma) == 0
    return sigma


def dpll_complete(
    formula: CnfFormula,
    heuristic: str = "uc",
    seed: RngSeed | int = 0,
    node_budget: int = 10_000_000,
) -> DpllResult:
    """Complete search: chronological backtracking over heuristic choices only.

    Propagated assignments are consequences of the last free choice and are
    undone together with it.  `highest_backtrack` records the shallowest split
    depth whose second branch was ever taken, as a fraction of n.

    Width <= 2 inputs are decided by the linear-time implication-graph
    procedure instead of tree search: rare unsatisfiable instances below the
    2-SAT threshold otherwise force exponentially large chronological
    refutations.
    """
    if node_budget < 1:
        raise ValueError("node_budget must be >= 1")
    if all(len(c) <= 2 for c in formula.clauses):
        sigma = _decide_width_two(formula)
        stats = TreeStats(outcome="SAT" if sigma is not None else "UNSAT")
        return DpllResult(stats.outcome, sigma, stats)
    choose = HEURISTICS[heuristic]
    rng = as_seed(seed).rng()
    state = SearchState(formula)
    stats = TreeStats()

    def search(depth: int) -> bool:
        forced = state.propagate()
        stats.up_steps += len(forced)
        if state.n_empty > 0:
            stats.contradictions += 1
            return False
        if state.solved():
            return True
        if not state.free_vars:
            # no empty clause but unsatisfied clauses remain: impossible
            raise AssertionError("inconsistent residual state")
        var, val = choose(state, rng)
        stats.splits += 1
        if stats.splits > node_budget:
            raise BudgetExceeded
        for branch, v in enumerate((val, -val)):
            if branch == 1 and (
                stats.highest_backtrack is None or depth < stats.highest_backtrack
            ):
                stats.highest_backtrack = depth
            mark = state.n_assigned
            state.assign(var, v)
            if search(depth + 1):
                return True
            state.rewind_to(mark)
        return False

    import sys

    old_limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old_limit, 3 * formula.n_vars + 1000))
    try:
        sat = search(0)
    except BudgetExceeded:
        stats.outcome = "budget"
        return DpllResult("budget", None, stats)
    finally:
        sys.setrecursionlimit(old_limit)
    if sat:
        sigma = state.assignment()
        assert energy(formula, sigma) == 0
        stats.outcome = "SAT"
        return DpllResult("SAT", sigma, stats)
    stats.outcome = "UNSAT"
    return DpllResult("UNSAT", None, stats)


# ---------------------------------------------------------------------------
# Tree-size growth rate
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TreeSizeFit:
    tau: float
    tau_stderr: float
    intercept: float
    sizes: tuple[int, ...]
    medians: tuple[float, ...]
    n_budget_hits: int
    t_G_median: float | None  # over satisfiable runs, fraction of n


def tree_size_exponent(
    k: int,
    alpha: float,
    sizes: list[int],
    samples: int,
    heuristic: str = "uc",
    seed: RngSeed | int = 0,
    node_budget: int = 2_000_000,
) -> TreeSizeFit:
    """Fit ln(median #splits) vs n by least squares; slope is the growth rate."""
    from .generators import EnsembleSpec, gen_formula

    base = as_seed(seed)
    medians = []
    budget_hits = 0
    t_gs = []
    for i, n in enumerate(sizes):
        vals = []
        for s in range(samples):
            f = gen_formula(
                EnsembleSpec("ksat", n=n, k=k, alpha=alpha, seed=base.spawn(i, s, 0))
            )
            res = dpll_complete(f, heuristic, seed=base.spawn(i, s, 1), node_budget=node_budget)
            if res.outcome == "budget":
                budget_hits += 1
                continue
            vals.append(max(1, res.stats.splits))
            if res.outcome == "SAT" and res.stats.highest_backtrack is not None:
                t_gs.append(res.stats.highest_backtrack / n)
        medians.append(float(np.median(vals)))
    x = np.asarray(sizes, dtype=float)
    y = np.log(np.asarray(medians))
    (tau, intercept), cov = np.polyfit(x, y, 1, cov=True)
    return TreeSizeFit(
        tau=float(tau),
        tau_stderr=float(math.sqrt(max(cov[0, 0], 0.0))),
        intercept=float(intercept),
        sizes=tuple(sizes),
        medians=tuple(medians),
        n_budget_hits=budget_hits,
        t_G_median=float(np.median(t_gs)) if t_gs else None,
    )
