"""Backtracking search verified against brute-force enumeration, plus the
no-backtracking heuristics and their search-trajectory bookkeeping."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from satlab.brute import count_solutions
from satlab.dpll import (
    SearchState,
    dpll_complete,
    run_no_backtrack,
    tree_size_exponent,
    unit_propagation,
)
from satlab.formulas import CnfFormula, Literal, clause, is_solution
from satlab.generators import EnsembleSpec, gen_formula
from satlab.rng import RngSeed

from conftest import small_cnf

seeds = st.integers(0, 2**32 - 1)


@given(seeds)
@settings(max_examples=60, deadline=None)
def test_complete_search_agrees_with_enumeration(s):
    rng = RngSeed(s).rng()
    f = small_cnf(rng, n_max=10, m_max=40)
    res = dpll_complete(f, "uc", seed=RngSeed(s, 1))
    sat = count_solutions(f) > 0
    assert res.outcome == ("SAT" if sat else "UNSAT")
    if sat:
        assert is_solution(f, res.assignment)
    else:
        assert res.assignment is None


@given(seeds)
@settings(max_examples=30, deadline=None)
def test_guc_heuristic_agrees_with_enumeration(s):
    rng = RngSeed(s).rng()
    f = small_cnf(rng, n_max=9, m_max=30)
    res = dpll_complete(f, "guc", seed=RngSeed(s, 1))
    assert res.outcome == ("SAT" if count_solutions(f) > 0 else "UNSAT")


def test_budget_exhaustion_reports_budget():
    f = gen_formula(EnsembleSpec("ksat", n=120, k=3, alpha=4.3, seed=RngSeed(2)))
    res = dpll_complete(f, "uc", seed=0, node_budget=3)
    assert res.outcome == "budget"


def test_stats_counters_consistent():
    f = gen_formula(EnsembleSpec("ksat", n=60, k=3, alpha=4.3, seed=RngSeed(5)))
    res = dpll_complete(f, "uc", seed=1)
    st_ = res.stats
    assert st_.outcome == res.outcome
    assert st_.splits >= 0 and st_.up_steps >= 0
    if st_.outcome == "UNSAT":
        assert st_.contradictions >= 1


@given(seeds)
@settings(max_examples=20, deadline=None)
def test_no_backtrack_success_gives_solution(s):
    f = gen_formula(EnsembleSpec("ksat", n=80, k=3, alpha=2.0, seed=RngSeed(s)))
    out = run_no_backtrack(f, "uc", seed=RngSeed(s, 1))
    if out.success:
        assert is_solution(f, out.assignment)
    else:
        assert out.assignment is None
    assert 0 <= out.n_assigned_at_stop <= f.n_vars


def test_no_backtrack_trajectory_plane_coordinates():
    f = gen_formula(EnsembleSpec("ksat", n=400, k=3, alpha=2.5, seed=RngSeed(9)))
    out = run_no_backtrack(f, "guc", seed=4)
    tr = out.trajectory
    assert np.all((0 <= tr.t) & (tr.t <= 1))
    assert np.all((0 <= tr.p) & (tr.p <= 1))
    assert np.all(tr.alpha >= 0)
    # trajectory starts at the full 3-SAT point
    assert tr.p[0] == pytest.approx(1.0)
    assert tr.alpha[0] == pytest.approx(f.n_clauses / f.n_vars)


def test_unit_propagation_forces_chain():
    # x0, x0 -> x1, x1 -> x2 propagates the whole chain
    f = CnfFormula(3, (clause(Literal(0, 1)),
                       clause(Literal(0, -1), Literal(1, 1)),
                       clause(Literal(1, -1), Literal(2, 1))))
    state = SearchState(f)
    forced = unit_propagation(state)
    assert {(l.var, l.sign) for l in forced} == {(0, 1), (1, 1), (2, 1)}
    assert state.solved()


def test_unit_propagation_raises_on_contradiction():
    from satlab.dpll import Contradiction

    f = CnfFormula(1, (clause(Literal(0, 1)), clause(Literal(0, -1))))
    state = SearchState(f)
    with pytest.raises(Contradiction):
        unit_propagation(state)
    assert state.n_empty > 0


@pytest.mark.slow
def test_tree_size_exponent_positive_in_unsat_regime():
    fit = tree_size_exponent(3, 6.0, sizes=[40, 60, 80], samples=30, seed=0)
    assert fit.tau > 0
    assert fit.n_budget_hits == 0
    assert all(m >= 1 for m in fit.medians)
