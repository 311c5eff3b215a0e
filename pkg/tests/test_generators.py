"""Ensemble generators: shapes, determinism, and planted satisfiability."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from satlab.formulas import CnfFormula, XorFormula, energy
from satlab.generators import KINDS, EnsembleSpec, gen_formula
from satlab.rng import RngSeed

seeds = st.integers(0, 2**32 - 1)


def test_kinds_exposed():
    assert set(KINDS) == {"ksat", "xorsat", "two_plus_p", "planted_ksat"}


def test_spec_validation():
    with pytest.raises(ValueError):
        EnsembleSpec("nope", n=10, k=3, alpha=1.0)
    with pytest.raises(ValueError):
        EnsembleSpec("ksat", n=2, k=3, alpha=1.0)
    with pytest.raises(ValueError):
        EnsembleSpec("ksat", n=10, k=3, alpha=-1.0)
    with pytest.raises(ValueError):
        EnsembleSpec("two_plus_p", n=10, k=3, alpha=1.0, p=1.5)


def test_clause_count_is_rounded_ratio():
    spec = EnsembleSpec("ksat", n=100, k=3, alpha=4.267)
    assert spec.m == 427
    f = gen_formula(spec)
    assert f.n_clauses == 427
    assert f.n_vars == 100


@given(seeds)
@settings(max_examples=25, deadline=None)
def test_ksat_clauses_have_distinct_vars_and_width_k(s):
    f = gen_formula(EnsembleSpec("ksat", n=30, k=3, alpha=2.0, seed=RngSeed(s)))
    assert isinstance(f, CnfFormula)
    for c in f.clauses:
        assert len(c) == 3
        assert len({l.var for l in c}) == 3


@given(seeds)
@settings(max_examples=25, deadline=None)
def test_generation_is_deterministic(s):
    spec = EnsembleSpec("ksat", n=25, k=3, alpha=3.0, seed=RngSeed(s))
    assert gen_formula(spec) == gen_formula(spec)


def test_different_seeds_differ():
    a = gen_formula(EnsembleSpec("ksat", n=50, k=3, alpha=4.0, seed=RngSeed(0)))
    b = gen_formula(EnsembleSpec("ksat", n=50, k=3, alpha=4.0, seed=RngSeed(1)))
    assert a != b


def test_xorsat_shape():
    f = gen_formula(EnsembleSpec("xorsat", n=40, k=3, alpha=0.5, seed=RngSeed(3)))
    assert isinstance(f, XorFormula)
    assert f.n_equations == 20
    for vs, J in f.equations:
        assert len(set(vs)) == 3
        assert J in (-1, 1)


def test_two_plus_p_clause_mix():
    f = gen_formula(
        EnsembleSpec("two_plus_p", n=100, k=3, alpha=2.0, p=0.25, seed=RngSeed(5))
    )
    lengths = sorted(len(c) for c in f.clauses)
    assert lengths.count(3) == 50  # alpha * n * p
    assert lengths.count(2) == 150


def test_two_plus_p_extremes():
    all3 = gen_formula(
        EnsembleSpec("two_plus_p", n=50, k=3, alpha=1.0, p=1.0, seed=RngSeed(7))
    )
    assert all(len(c) == 3 for c in all3.clauses)
    all2 = gen_formula(
        EnsembleSpec("two_plus_p", n=50, k=3, alpha=1.0, p=0.0, seed=RngSeed(7))
    )
    assert all(len(c) == 2 for c in all2.clauses)


@given(seeds)
@settings(max_examples=25, deadline=None)
def test_planted_assignment_satisfies_instance(s):
    f, planted = gen_formula(
        EnsembleSpec("planted_ksat", n=30, k=3, alpha=5.0, seed=RngSeed(s))
    )
    assert planted.shape == (30,)
    assert np.all(np.abs(planted) == 1)
    assert energy(f, planted) == 0
