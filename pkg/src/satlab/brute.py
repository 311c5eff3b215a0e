"""Exhaustive-enumeration oracles.

Assignments are indexed by integers in [0, 2^n); bit v of the index is 1 when
sigma_v = +1.  The satisfying set is held as a packed bitset (one uint64 word
per 64 assignments), which keeps full enumeration cheap up to the n <= 30
guard.
"""

from __future__ import annotations

import numpy as np

from .formulas import CnfFormula, Formula, XorFormula

MAX_BRUTE_VARS = 30

# bit pattern of variable v < 6 across the 64 assignments of one word
_LOW_PATTERNS = np.array(
    [sum(1 << b for b in range(64) if (b >> v) & 1) for v in range(6)],
    dtype=np.uint64,
)
_ONES = np.uint64(0xFFFFFFFFFFFFFFFF)


def _var_pattern(v: int, word_idx: np.ndarray) -> np.ndarray:
    """Words whose bit b is set iff variable v is +1 in assignment (word, b)."""
    if v < 6:
        return np.broadcast_to(_LOW_PATTERNS[v], word_idx.shape)
    bit = (word_idx >> np.uint64(v - 6)) & np.uint64(1)
    return np.where(bit == 1, _ONES, np.uint64(0))


def satisfying_bitset(formula: Formula) -> np.ndarray:
    """Packed bitset of all satisfying assignments."""
    n = formula.n_vars
    if n > MAX_BRUTE_VARS:
        raise ValueError(f"refusing brute force with n={n} > {MAX_BRUTE_VARS}")
    n_words = max(1, 1 << max(0, n - 6))
    word_idx = np.arange(n_words, dtype=np.uint64)
    sat = np.full(n_words, _ONES)
    if isinstance(formula, CnfFormula):
        for cl in formula.clauses:
            viol = np.full(n_words, _ONES)
            for lit in cl:
                pat = _var_pattern(lit.var, word_idx)
                # literal false: sigma_v != sign
                viol = viol & (~pat if lit.sign == 1 else pat)
            sat &= ~viol
    else:
        for vs, j in formula.equations:
            # sigma product = (-1)^(k - #plus) ; satisfied iff product == j
            parity = np.zeros(n_words, dtype=np.uint64)
            for v in vs:
                parity ^= _var_pattern(v, word_idx)
            # parity bit = (#plus mod 2); product=+1 iff #minus even
            k = len(vs)
            want_plus_parity = k % 2 if j == 1 else (k + 1) % 2
            sat &= parity if want_plus_parity == 1 else ~parity
    if n < 6:
        sat[0] &= np.uint64((1 << (1 << n)) - 1)
    return sat


def _popcount(words: np.ndarray) -> int:
    return int(np.unpackbits(words.view(np.uint8)).sum())


def count_solutions(formula: Formula) -> int:
    return _popcount(satisfying_bitset(formula))


def solution_indices(formula: Formula) -> np.ndarray:
    """Assignment indices of all solutions (ascending)."""
    bits = np.unpackbits(satisfying_bitset(formula).view(np.uint8), bitorder="little")
    return np.nonzero(bits)[0]


def index_to_assignment(idx: int, n_vars: int) -> np.ndarray:
    bits = (int(idx) >> np.arange(n_vars)) & 1
    return (2 * bits - 1).astype(np.int8)


def brute_force_solutions(
    formula: Formula, return_solutions: bool = False
) -> tuple[int, np.ndarray | None]:
    """Exact solution count (and optional matrix of solutions, one per row)."""
    if return_solutions:
        idx = solution_indices(formula)
        sols = np.stack(
            [index_to_assignment(i, formula.n_vars) for i in idx], axis=0
        ) if len(idx) else np.empty((0, formula.n_vars), dtype=np.int8)
        return len(idx), sols
    return count_solutions(formula), None


def marginals_by_enumeration(formula: Formula) -> np.ndarray:
    """P(sigma_v = +1) over the uniform measure on solutions."""
    sat = satisfying_bitset(formula)
    total = _popcount(sat)
    if total == 0:
        raise ValueError("formula is unsatisfiable")
    word_idx = np.arange(len(sat), dtype=np.uint64)
    probs = np.empty(formula.n_vars)
    for v in range(formula.n_vars):
        probs[v] = _popcount(sat & _var_pattern(v, word_idx)) / total
    return probs
