"""Random and planted ensemble generators."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .formulas import Clause, CnfFormula, Literal, XorFormula
from .rng import RngSeed, as_seed

KINDS = ("ksat", "xorsat", "two_plus_p", "planted_ksat")


@dataclass(frozen=True)
class EnsembleSpec:
    kind: str
    n: int
    k: int
    alpha: float
    p: float = 1.0  # fraction of 3-clauses, two_plus_p only
    seed: RngSeed = RngSeed(0)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown ensemble kind {self.kind!r}")
        if self.k < 2:
            raise ValueError("k must be >= 2")
        if self.n < self.k:
            raise ValueError(f"n={self.n} < k={self.k}")
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must be in [0, 1]")

    @property
    def m(self) -> int:
        return round(self.alpha * self.n)


def _distinct_vars(n: int, k: int, rng: np.random.Generator) -> tuple[int, ...]:
    # rejection until distinct; cheap for k << n
    while True:
        vs = tuple(int(v) for v in rng.integers(0, n, size=k))
        if len(set(vs)) == k:
            return vs


def _random_clause(n: int, k: int, rng: np.random.Generator) -> Clause:
    vs = _distinct_vars(n, k, rng)
    signs = rng.integers(0, 2, size=k) * 2 - 1
    return tuple(Literal(v, int(s)) for v, s in zip(vs, signs))


def gen_formula(spec: EnsembleSpec):
    """Generate an instance; planted_ksat returns (formula, planted assignment)."""
    rng = as_seed(spec.seed).rng()
    n, k = spec.n, spec.k
    if spec.kind == "ksat":
        return CnfFormula(n, tuple(_random_clause(n, k, rng) for _ in range(spec.m)))
    if spec.kind == "xorsat":
        eqs = []
        for _ in range(spec.m):
            vs = _distinct_vars(n, k, rng)
            eqs.append((vs, int(rng.integers(0, 2) * 2 - 1)))
        return XorFormula(n, tuple(eqs))
    if spec.kind == "two_plus_p":
        # deterministic split of the clause count between lengths 3 and 2
        m3 = round(spec.alpha * n * spec.p)
        m2 = round(spec.alpha * n * (1.0 - spec.p))
        clauses = [_random_clause(n, 3, rng) for _ in range(m3)]
        clauses += [_random_clause(n, 2, rng) for _ in range(m2)]
        return CnfFormula(n, tuple(clauses))
    # planted_ksat: uniform conditioned on satisfying the planted assignment;
    # only the sign pattern is redrawn when a clause violates it, which is
    # uniform over the 2^k - 1 satisfying sign patterns.
    planted = (rng.integers(0, 2, size=n) * 2 - 1).astype(np.int8)
    clauses = []
    for _ in range(spec.m):
        vs = _distinct_vars(n, k, rng)
        while True:
            signs = rng.integers(0, 2, size=k) * 2 - 1
            if any(planted[v] == s for v, s in zip(vs, signs)):
                break
        clauses.append(tuple(Literal(v, int(s)) for v, s in zip(vs, signs)))
    return CnfFormula(n, tuple(clauses)), planted
