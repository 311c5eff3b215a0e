"""Reproducibility and stream-splitting guarantees of the seeding layer."""

import numpy as np
from hypothesis import given, strategies as st

from satlab.rng import RandBuf, RngSeed, as_seed, mix, splitmix64

seeds = st.integers(min_value=0, max_value=2**62)


@given(seeds)
def test_same_seed_same_stream(base):
    a = RngSeed(base).rng().random(16)
    b = RngSeed(base).rng().random(16)
    assert np.array_equal(a, b)


@given(seeds, seeds)
def test_spawn_indices_give_distinct_streams(base, i):
    s = RngSeed(base)
    a = s.spawn(i).rng().random(8)
    b = s.spawn(i + 1).rng().random(8)
    assert not np.array_equal(a, b)


@given(seeds)
def test_spawn_is_deterministic_and_nested(base):
    s = RngSeed(base)
    assert s.spawn(3, 5) == s.spawn(3, 5)
    # tuple spawning must not collapse to concatenation of single spawns
    assert s.spawn(3).spawn(5) == s.spawn(3).spawn(5)


def test_spawn_order_matters():
    s = RngSeed(0)
    assert s.spawn(1, 2) != s.spawn(2, 1)


@given(st.integers(min_value=0, max_value=2**64 - 1))
def test_splitmix64_range(x):
    y = splitmix64(x)
    assert 0 <= y < 2**64


def test_splitmix64_known_values():
    # reference values from the published splitmix64 sequence seeded at 0
    assert splitmix64(0) == 0xE220A8397B1DCDAF
    s = 0x9E3779B97F4A7C15
    assert splitmix64(s) == 0x6E789E6AA1B965F4


def test_mix_is_injective_on_small_tuples():
    seen = {mix(a, b) for a in range(20) for b in range(20)}
    assert len(seen) == 400


def test_as_seed_accepts_int_and_passthrough():
    s = RngSeed(7, 9)
    assert as_seed(s) is s
    assert as_seed(7) == RngSeed(7)


def test_randbuf_matches_generator_stream():
    buf = RandBuf(RngSeed(42).rng())
    vals = [buf.uniform() for _ in range(1000)]
    assert all(0.0 <= v < 1.0 for v in vals)
    ints = [buf.randint(7) for _ in range(1000)]
    assert set(ints) <= set(range(7))
    # deterministic under the same seed
    buf2 = RandBuf(RngSeed(42).rng())
    assert vals == [buf2.uniform() for _ in range(1000)]
