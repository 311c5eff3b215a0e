"""Counter-based, splittable random number generation.

All stochastic code in the package draws from Philox streams keyed by a
(base, stream) pair, so any experiment is bit-reproducible across platforms
and independent jobs can use disjoint streams.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """One step of the splitmix64 mixer (stable 64-bit hash)."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def mix(*values: int) -> int:
    """Hash an arbitrary tuple of integers into a 64-bit stream id."""
    acc = 0x243F6A8885A308D3
    for v in values:
        acc = splitmix64(acc ^ (v & _MASK64))
    return acc


@dataclass(frozen=True)
class RngSeed:
    """A (base, stream) pair identifying one Philox stream."""

    base: int
    stream: int = 0

    def rng(self) -> np.random.Generator:
        key = ((self.base & _MASK64) << 64) | (self.stream & _MASK64)
        return np.random.Generator(np.random.Philox(key=key))

    def spawn(self, *indices: int) -> "RngSeed":
        """Derive a child seed; distinct index tuples give disjoint streams."""
        return RngSeed(self.base, mix(self.stream, *indices))


def as_seed(seed: "RngSeed | int") -> RngSeed:
    if isinstance(seed, RngSeed):
        return seed
    return RngSeed(int(seed))


class RandBuf:
    """Buffered scalar randomness for tight solver loops.

    Draws uniforms in blocks from a Philox generator; `uniform()` and
    `randint(n)` stay deterministic for a given seed while avoiding one
    Generator call per solver step.
    """

    def __init__(self, rng: np.random.Generator, block: int = 1 << 14):
        self._rng = rng
        self._block = block
        self._buf = rng.random(block)
        self._pos = 0

    def uniform(self) -> float:
        if self._pos == self._block:
            self._buf = self._rng.random(self._block)
            self._pos = 0
        u = self._buf[self._pos]
        self._pos += 1
        return u

    def randint(self, n: int) -> int:
        """Uniform integer in [0, n)."""
        return int(self.uniform() * n)
