"""Population-dynamics estimates checked against exactly solvable limits."""

import math

import numpy as np
import pytest

from satlab.population import (
    OnsetEstimate,
    rs_population,
    sp_population,
    sp_population_onset,
    survey_population_is_trivial,
)
from satlab.rng import RngSeed


class TestRsPopulation:
    def test_zero_density_is_free_entropy(self):
        res = rs_population(3, 0.0, P=20_000, sweeps=20, seed=1)
        assert not res.diverged
        assert np.all(res.population.fields == 0.0)
        assert res.s_rs == pytest.approx(math.log(2), abs=1e-12)

    def test_low_density_sat_matches_unbiased_formula(self):
        # while fields stay essentially unbiased the entropy reduces to
        # ln 2 + alpha ln(1 - 2^-k)
        alpha = 1.0
        res = rs_population(3, alpha, P=50_000, sweeps=150, seed=2)
        expected = math.log(2) + alpha * math.log(1 - 0.125)
        assert not res.diverged
        assert res.s_rs == pytest.approx(expected, abs=0.01)

    def test_xor_entropy_is_exactly_linear_below_clustering(self):
        # random k-XOR systems of full rank: s/ln2 = 1 - alpha
        for alpha in (0.3, 0.7):
            res = rs_population(3, alpha, P=50_000, sweeps=150, seed=3,
                                model="xor")
            assert not res.diverged
            assert res.s_rs / math.log(2) == pytest.approx(1 - alpha, abs=0.01)

    def test_deterministic_under_seed(self):
        a = rs_population(3, 2.0, P=10_000, sweeps=50, seed=7)
        b = rs_population(3, 2.0, P=10_000, sweeps=50, seed=7)
        assert a.s_rs == b.s_rs
        assert np.array_equal(a.population.fields, b.population.fields)

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            rs_population(1, 1.0)
        with pytest.raises(ValueError):
            rs_population(3, 1.0, model="nope")


class TestSurveyPopulation:
    def test_collapses_below_clustering(self):
        pop = sp_population(3, 3.0, P=20_000, sweeps=150, seed=1)
        assert survey_population_is_trivial(pop)

    def test_survives_above_clustering(self):
        pop = sp_population(3, 4.3, P=20_000, sweeps=150, seed=1)
        assert not survey_population_is_trivial(pop)
        assert np.all((pop.fields >= 0) & (pop.fields <= 1))

    def test_onset_bracket_contains_known_location(self):
        est = sp_population_onset(
            3, [3.5, 3.8, 4.0, 4.2], P=20_000, sweeps=200, seed=0, n_seeds=3
        )
        assert isinstance(est, OnsetEstimate)
        lo, hi = est.bracket
        assert lo < 3.86 < hi + 0.25  # coarse grid: onset near 3.86
        assert lo < est.alpha_d < hi

    def test_onset_requires_bracketing_grid(self):
        with pytest.raises(ValueError):
            sp_population_onset(3, [4.3, 4.5], P=5_000, sweeps=80, seed=0,
                                n_seeds=1)
        with pytest.raises(ValueError):
            sp_population_onset(3, [4.0], P=1_000, sweeps=10)
