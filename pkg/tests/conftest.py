"""Shared strategies and instance builders for the test suite."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import strategies as st

from satlab.formulas import CnfFormula, Literal
from satlab.rng import RngSeed


def random_tree_formula(
    rng: np.random.Generator,
    n_min: int = 2,
    n_max: int = 16,
    p_unit: float = 0.2,
) -> CnfFormula:
    """CNF whose factor graph is a tree (connected, no cycles).

    Each clause attaches to exactly one already-present variable and brings
    fresh variables, so variable-clause adjacency stays acyclic.  Unit clauses
    (degree-1 factors) are allowed so unit propagation has work to do.
    """
    n_target = int(rng.integers(n_min, n_max + 1))
    n = 1
    clauses = []
    while n < n_target:
        anchor = int(rng.integers(n))
        if rng.random() < p_unit:
            clauses.append((Literal(anchor, int(rng.integers(2)) * 2 - 1),))
            continue
        width = int(rng.integers(2, 4))  # 2- or 3-clauses
        fresh = list(range(n, min(n + width - 1, n_target)))
        if not fresh:
            break
        n += len(fresh)
        lits = [Literal(anchor, int(rng.integers(2)) * 2 - 1)]
        lits += [Literal(v, int(rng.integers(2)) * 2 - 1) for v in fresh]
        clauses.append(tuple(lits))
    return CnfFormula(n, tuple(clauses))


def small_cnf(
    rng: np.random.Generator, n_max: int = 10, m_max: int = 20, k_max: int = 3
) -> CnfFormula:
    n = int(rng.integers(1, n_max + 1))
    m = int(rng.integers(0, m_max + 1))
    clauses = []
    for _ in range(m):
        k = int(rng.integers(1, min(k_max, n) + 1))
        vs = rng.choice(n, size=k, replace=False)
        clauses.append(
            tuple(Literal(int(v), int(rng.integers(2)) * 2 - 1) for v in vs)
        )
    return CnfFormula(n, tuple(clauses))


@pytest.fixture
def rng():
    return RngSeed(12345).rng()


seeds = st.integers(min_value=0, max_value=2**32 - 1)
