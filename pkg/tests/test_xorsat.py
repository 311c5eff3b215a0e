"""Linear-algebra and peeling machinery checked against brute enumeration."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from satlab.brute import brute_force_solutions, count_solutions
from satlab.formulas import XorFormula, energy, is_solution
from satlab.generators import EnsembleSpec, gen_formula
from satlab.rng import RngSeed
from satlab.xorsat import (
    Unsatisfiable,
    cluster_overlap_stats,
    entropy_decomposition,
    gf2_solve,
    leaf_removal,
    reconstruct_solution,
)

seeds = st.integers(0, 2**32 - 1)


def random_xor(s, n_max=14, k=3, alpha_max=1.2):
    rng = RngSeed(s).rng()
    n = int(rng.integers(k + 1, n_max + 1))
    alpha = float(rng.uniform(0.1, alpha_max))
    return gen_formula(
        EnsembleSpec("xorsat", n=n, k=k, alpha=alpha, seed=RngSeed(s, 1))
    )


@given(seeds)
@settings(max_examples=50, deadline=None)
def test_gf2_count_matches_enumeration(s):
    xf = random_xor(s)
    sol = gf2_solve(xf)
    assert sol.n_solutions == count_solutions(xf)
    if sol.satisfiable:
        assert is_solution(xf, sol.solution)


@given(seeds)
@settings(max_examples=25, deadline=None)
def test_nullspace_spans_solution_set(s):
    xf = random_xor(s, n_max=10)
    sol = gf2_solve(xf)
    if not sol.satisfiable:
        return
    _, sols = brute_force_solutions(xf, return_solutions=True)
    all_sols = {tuple(r) for r in sols}
    rng = RngSeed(s, 7).rng()
    # samples are solutions; each basis mask maps solutions to solutions
    for _ in range(20):
        assert tuple(sol.sample(rng)) in all_sols
    for mask in sol.null_basis:
        flipped = np.where(mask == 1, -sol.solution, sol.solution)
        assert tuple(flipped) in all_sols
    # basis rows are independent, so they generate exactly 2^nullity solutions
    if sol.nullity <= 6:
        combos = {tuple(sol.sample(rng)) for _ in range(80 * sol.n_solutions)}
        assert combos == all_sols


@given(seeds)
@settings(max_examples=30, deadline=None)
def test_leaf_removal_core_min_degree_two(s):
    xf = random_xor(s)
    dec = leaf_removal(xf)
    core = dec.core
    deg = np.zeros(xf.n_vars, dtype=int)
    for vs, _ in core.equations:
        for v in vs:
            deg[v] += 1
    # every variable appearing in the core touches >= 2 core equations
    assert np.all((deg == 0) | (deg >= 2))
    assert dec.t_star == xf.n_equations - core.n_equations


def test_leaf_removal_tree_peels_completely():
    # a chain of equations sharing single variables has no core
    xf = XorFormula(5, (((0, 1, 2), 1), ((2, 3, 4), -1)))
    dec = leaf_removal(xf)
    assert dec.core.n_equations == 0
    assert len(dec.core_vars) == 0


@given(seeds)
@settings(max_examples=25, deadline=None)
def test_entropy_decomposition_exact(s):
    xf = random_xor(s, n_max=12)
    full = gf2_solve(xf)
    if not full.satisfiable:
        with pytest.raises(Unsatisfiable):
            entropy_decomposition(xf)
        return
    split = entropy_decomposition(xf)
    assert 2**split.s_log2 == count_solutions(xf)
    assert split.s_log2 == split.sigma_log2 + split.s_int_log2
    assert split.s == pytest.approx(
        math.log(max(count_solutions(xf), 1)) / xf.n_vars
    )


@given(seeds)
@settings(max_examples=25, deadline=None)
def test_reconstruction_yields_valid_solutions(s):
    xf = random_xor(s, n_max=12)
    dec = leaf_removal(xf)
    core_vars = sorted(dec.core_vars)
    core_sol = gf2_solve(dec.core, variables=core_vars)
    if not core_sol.satisfiable:
        return
    rng = RngSeed(s, 3).rng()
    c = core_sol.sample(rng)
    sigma, n_int = reconstruct_solution(c, dec, seed=RngSeed(s, 4))
    assert energy(xf, sigma) == 0
    split = entropy_decomposition(xf, dec)
    assert n_int == 2**split.s_int_log2


def test_reconstruction_rejects_non_core_solution():
    xf = XorFormula(3, (((0, 1), 1), ((1, 2), 1), ((0, 2), 1)))
    dec = leaf_removal(xf)
    assert dec.core.n_equations == 3  # a triangle has no leaves
    bad = np.array([1, -1, 1], dtype=np.int8)
    with pytest.raises(ValueError):
        reconstruct_solution(bad, dec)


def test_unsat_core_raises():
    # triangle with odd frustration: x0x1 = x1x2 = x0x2 = -1 is impossible
    xf = XorFormula(3, (((0, 1), -1), ((1, 2), -1), ((0, 2), -1)))
    assert gf2_solve(xf).satisfiable is False
    with pytest.raises(Unsatisfiable):
        entropy_decomposition(xf)


def test_overlap_stats_intra_tighter_than_inter():
    # in the clustered phase same-core pairs agree on frozen core variables,
    # independent-core pairs do not
    xf = gen_formula(
        EnsembleSpec("xorsat", n=300, k=3, alpha=0.87, seed=RngSeed(11))
    )
    dec = leaf_removal(xf)
    if dec.core.n_equations == 0:
        pytest.skip("instance peeled completely")
    stats = cluster_overlap_stats(xf, samples=60, seed=5)
    assert len(stats.intra) == len(stats.inter) == 60
    assert stats.intra.mean() > stats.inter.mean() + 0.05
    assert np.all(np.abs(stats.intra) <= 1.0)
