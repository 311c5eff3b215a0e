"""Structural analysis of XOR formulas.

Leaf removal peels variables of occurrence 1 down to the 2-core; Gaussian
elimination over GF(2) (bit-packed rows) gives exact ranks, solution counts
and uniform solution sampling.  Entropy bookkeeping is exact integer
arithmetic in units of ln 2, so the decomposition s = Sigma + s_int is an
identity, not an approximation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .formulas import XorFormula
from .rng import RngSeed, as_seed


class Unsatisfiable(ValueError):
    pass


# ---------------------------------------------------------------------------
# Leaf removal / 2-core
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RemovalStep:
    equation_id: int
    leaf_var: int
    freed_vars: tuple[int, ...]  # variables whose occurrence drops to zero

    @property
    def d(self) -> int:
        return len(self.freed_vars)


@dataclass(frozen=True)
class CoreDecomposition:
    formula: XorFormula
    core_equation_ids: tuple[int, ...]
    removed: tuple[RemovalStep, ...]  # in removal order
    isolated_vars: tuple[int, ...]  # variables absent from the formula

    @property
    def core(self) -> XorFormula:
        return XorFormula(
            self.formula.n_vars,
            tuple(self.formula.equations[e] for e in self.core_equation_ids),
        )

    @property
    def t_star(self) -> int:
        return len(self.removed)

    @property
    def core_vars(self) -> set[int]:
        vs: set[int] = set()
        for e in self.core_equation_ids:
            vs.update(self.formula.equations[e][0])
        return vs


def leaf_removal(xf: XorFormula, order_seed: RngSeed | int | None = None) -> CoreDecomposition:
    """Peel occurrence-1 variables until the 2-core remains.

    The core is independent of the peeling order; `order_seed` only shuffles
    which leaf is picked first (used to test that invariance).
    """
    n = xf.n_vars
    occ: list[list[int]] = [[] for _ in range(n)]
    for e, (vs, _) in enumerate(xf.equations):
        for v in vs:
            occ[v].append(e)
    count = np.array([len(o) for o in occ])
    alive_eq = np.ones(xf.n_equations, dtype=bool)
    isolated = tuple(int(v) for v in np.nonzero(count == 0)[0])
    stack = [int(v) for v in np.nonzero(count == 1)[0]]
    if order_seed is not None:
        as_seed(order_seed).rng().shuffle(stack)
    removed: list[RemovalStep] = []
    while stack:
        leaf = stack.pop()
        if count[leaf] != 1:
            continue
        eq = next(e for e in occ[leaf] if alive_eq[e])
        alive_eq[eq] = False
        freed = []
        for v in xf.equations[eq][0]:
            count[v] -= 1
            if count[v] == 0:
                freed.append(v)
            elif count[v] == 1:
                stack.append(v)
        removed.append(RemovalStep(eq, leaf, tuple(freed)))
    return CoreDecomposition(
        formula=xf,
        core_equation_ids=tuple(int(e) for e in np.nonzero(alive_eq)[0]),
        removed=tuple(removed),
        isolated_vars=isolated,
    )


# ---------------------------------------------------------------------------
# GF(2) linear algebra, bit-packed
# ---------------------------------------------------------------------------


def _pack(n_bits: int) -> int:
    return (n_bits + 63) >> 6


def _get_bit(rows: np.ndarray, r: int, c: int) -> int:
    return int((rows[r, c >> 6] >> np.uint64(c & 63)) & np.uint64(1))


@dataclass
class Gf2Solution:
    satisfiable: bool
    rank: int
    n_vars: int
    solution: np.ndarray | None  # spin assignment, +-1, or None if UNSAT
    null_basis: np.ndarray  # (nullity, n_vars) 0/1 flip masks

    @property
    def nullity(self) -> int:
        return self.n_vars - self.rank

    @property
    def n_solutions(self) -> int:
        return (1 << self.nullity) if self.satisfiable else 0

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        """Uniform solution: particular + random nullspace combination."""
        if not self.satisfiable:
            raise Unsatisfiable("cannot sample from an UNSAT system")
        x = (self.solution == -1).astype(np.uint8)
        if len(self.null_basis):
            coeffs = rng.integers(0, 2, size=len(self.null_basis), dtype=np.uint8)
            x = x ^ (coeffs @ self.null_basis % 2).astype(np.uint8)
        return np.where(x == 1, -1, 1).astype(np.int8)


def gf2_solve(xf: XorFormula, variables: list[int] | None = None) -> Gf2Solution:
    """Gauss-Jordan elimination; spins map to bits via sigma = (-1)^x.

    `variables` restricts the system to a sublist (used for cores); bits for
    other variables stay 0 (sigma=+1) in returned vectors.
    """
    n = xf.n_vars
    if variables is None:
        cols = list(range(n))
    else:
        cols = list(variables)
    col_of = {v: j for j, v in enumerate(cols)}
    m = xf.n_equations
    words = _pack(max(1, len(cols)))
    rows = np.zeros((max(m, 1), words), dtype=np.uint64)
    rhs = np.zeros(max(m, 1), dtype=np.uint64)
    for e, (vs, j) in enumerate(xf.equations):
        for v in vs:
            c = col_of[v]
            rows[e, c >> 6] ^= np.uint64(1) << np.uint64(c & 63)
        if j == -1:
            rhs[e] = 1
    r = 0
    pivot_cols: list[int] = []
    for c in range(len(cols)):
        if r >= m:
            break
        w, b = c >> 6, np.uint64(c & 63)
        col_bits = (rows[r:m, w] >> b) & np.uint64(1)
        nz = np.nonzero(col_bits)[0]
        if len(nz) == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            rows[[r, p]] = rows[[p, r]]
            rhs[[r, p]] = rhs[[p, r]]
        hit = np.nonzero((rows[:m, w] >> b) & np.uint64(1))[0]
        hit = hit[hit != r]
        rows[hit] ^= rows[r]
        rhs[hit] ^= rhs[r]
        pivot_cols.append(c)
        r += 1
    rank = r
    satisfiable = not bool(rhs[rank:m].any())
    free_cols = [c for c in range(len(cols)) if c not in set(pivot_cols)]
    null_basis = np.zeros((len(free_cols), n), dtype=np.uint8)
    solution = None
    if satisfiable:
        x = np.zeros(n, dtype=np.uint8)
        for i, c in enumerate(pivot_cols):
            x[cols[c]] = int(rhs[i])
        solution = np.where(x == 1, -1, 1).astype(np.int8)
    for bidx, f in enumerate(free_cols):
        null_basis[bidx, cols[f]] = 1
        for i, c in enumerate(pivot_cols):
            null_basis[bidx, cols[c]] = _get_bit(rows, i, f)
    return Gf2Solution(
        satisfiable=satisfiable,
        rank=rank,
        n_vars=len(cols),
        solution=solution,
        null_basis=null_basis,
    )


# ---------------------------------------------------------------------------
# Entropy decomposition s = Sigma + s_int (exact, in units of ln 2)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EntropySplit:
    n_vars: int
    s_log2: int  # log2 of total solution count
    sigma_log2: int  # log2 of core solution count (cluster count)
    s_int_log2: int  # log2 of per-cluster extension count

    @property
    def s(self) -> float:
        return self.s_log2 * math.log(2.0) / self.n_vars

    @property
    def sigma(self) -> float:
        return self.sigma_log2 * math.log(2.0) / self.n_vars

    @property
    def s_int(self) -> float:
        return self.s_int_log2 * math.log(2.0) / self.n_vars


def entropy_decomposition(
    xf: XorFormula, decomposition: CoreDecomposition | None = None
) -> EntropySplit:
    """Exact split of ln(#solutions) into core and reconstruction freedom."""
    dec = decomposition if decomposition is not None else leaf_removal(xf)
    core_vars = sorted(dec.core_vars)
    core = dec.core
    core_sol = gf2_solve(core, variables=core_vars) if core_vars else gf2_solve(core, variables=[])
    if not core_sol.satisfiable:
        raise Unsatisfiable("core (hence formula) is UNSAT")
    sigma_log2 = len(core_vars) - core_sol.rank
    v0 = xf.n_vars - len(dec.isolated_vars)
    s_int_log2 = sum(step.d - 1 for step in dec.removed) + (xf.n_vars - v0)
    full = gf2_solve(xf)
    if not full.satisfiable:
        raise Unsatisfiable("formula is UNSAT")
    s_log2 = xf.n_vars - full.rank
    # rank additivity: each peeled equation is an independent pivot
    assert full.rank == core_sol.rank + dec.t_star
    assert s_log2 == sigma_log2 + s_int_log2
    return EntropySplit(xf.n_vars, s_log2, sigma_log2, s_int_log2)


def reconstruct_solution(
    core_solution: np.ndarray,
    decomposition: CoreDecomposition,
    seed: RngSeed | int = 0,
) -> tuple[np.ndarray, int]:
    """Extend a core solution to a uniform full solution.

    Returns (assignment, N_int) where N_int counts the compatible extensions
    (identical for every core solution).
    """
    xf = decomposition.formula
    core = decomposition.core
    sigma = np.asarray(core_solution, dtype=np.int8).copy()
    if sigma.shape != (xf.n_vars,):
        raise ValueError("core solution must be a full-length assignment")
    for vs, j in core.equations:
        prod = 1
        for v in vs:
            prod *= int(sigma[v])
        if prod != j:
            raise ValueError("core_solution does not satisfy the core")
    rng = as_seed(seed).rng()
    core_vars = decomposition.core_vars
    assigned = np.zeros(xf.n_vars, dtype=bool)
    for v in core_vars:
        assigned[v] = True
    n_int_log2 = 0
    for step in reversed(decomposition.removed):
        vs, j = xf.equations[step.equation_id]
        freed = step.freed_vars
        n_int_log2 += len(freed) - 1
        for v in freed[:-1]:
            sigma[v] = int(rng.integers(0, 2)) * 2 - 1
            assigned[v] = True
        prod = j
        for v in vs:
            if v != freed[-1]:
                prod *= int(sigma[v])
        sigma[freed[-1]] = prod  # forces the equation to hold
        assigned[freed[-1]] = True
    for v in decomposition.isolated_vars:
        sigma[v] = int(rng.integers(0, 2)) * 2 - 1
        assigned[v] = True
    n_int_log2 += len(decomposition.isolated_vars)
    return sigma, 1 << n_int_log2


# ---------------------------------------------------------------------------
# Cluster geometry
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OverlapStats:
    intra: np.ndarray  # overlaps of solution pairs sharing a core solution
    inter: np.ndarray  # overlaps of pairs with independent core solutions


def cluster_overlap_stats(
    xf: XorFormula, samples: int, seed: RngSeed | int = 0
) -> OverlapStats:
    dec = leaf_removal(xf)
    core_vars = sorted(dec.core_vars)
    core_sol = gf2_solve(dec.core, variables=core_vars)
    if not core_sol.satisfiable:
        raise Unsatisfiable("formula is UNSAT")
    base = as_seed(seed)
    rng = base.rng()
    intra, inter = [], []
    n = xf.n_vars

    def overlap(a: np.ndarray, b: np.ndarray) -> float:
        return float(np.dot(a.astype(np.int64), b.astype(np.int64))) / n

    for s in range(samples):
        c1 = core_sol.sample(rng)
        a1, _ = reconstruct_solution(c1, dec, base.spawn(s, 0))
        a2, _ = reconstruct_solution(c1, dec, base.spawn(s, 1))
        intra.append(overlap(a1, a2))
        c3 = core_sol.sample(rng)
        c4 = core_sol.sample(rng)
        b1, _ = reconstruct_solution(c3, dec, base.spawn(s, 2))
        b2, _ = reconstruct_solution(c4, dec, base.spawn(s, 3))
        inter.append(overlap(b1, b2))
    return OverlapStats(intra=np.array(intra), inter=np.array(inter))
