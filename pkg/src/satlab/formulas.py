"""Instance data model: CNF and XOR formulas over Ising-spin variables.

Variables are 0-indexed; assignments are arrays over {+1, -1} (0 = unset in
partial assignments).  A literal (var, sign) is true under sigma when
sigma[var] == sign; the coupling J = -sign is the spin value that leaves the
clause unsatisfied.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence, TextIO

import numpy as np


class Literal(NamedTuple):
    var: int
    sign: int  # +1: true when the variable is true (DIMACS positive literal)


Clause = tuple[Literal, ...]


def clause(*lits: tuple[int, int]) -> Clause:
    return tuple(Literal(v, s) for v, s in lits)


@dataclass(frozen=True)
class CnfFormula:
    n_vars: int
    clauses: tuple[Clause, ...]

    def __post_init__(self):
        for cl in self.clauses:
            vs = [lit.var for lit in cl]
            if len(set(vs)) != len(vs):
                raise ValueError(f"repeated variable in clause {cl}")
            if any(v < 0 or v >= self.n_vars for v in vs):
                raise ValueError(f"variable out of range in clause {cl}")
            if any(lit.sign not in (-1, 1) for lit in cl):
                raise ValueError(f"bad literal sign in clause {cl}")

    @property
    def n_clauses(self) -> int:
        return len(self.clauses)

    def clause_lengths(self) -> list[int]:
        return [len(cl) for cl in self.clauses]


@dataclass(frozen=True)
class XorFormula:
    """Linear system over GF(2) in spin form: prod_i sigma_i = J per equation."""

    n_vars: int
    equations: tuple[tuple[tuple[int, ...], int], ...]  # (variables, parity J)

    def __post_init__(self):
        for vs, j in self.equations:
            if len(set(vs)) != len(vs):
                raise ValueError(f"repeated variable in equation {vs}")
            if any(v < 0 or v >= self.n_vars for v in vs):
                raise ValueError(f"variable out of range in equation {vs}")
            if j not in (-1, 1):
                raise ValueError(f"parity must be +-1, got {j}")

    @property
    def n_equations(self) -> int:
        return len(self.equations)


Formula = CnfFormula | XorFormula


def full_assignment(values: Iterable[int]) -> np.ndarray:
    sigma = np.asarray(list(values), dtype=np.int8)
    if not np.all(np.abs(sigma) == 1):
        raise ValueError("full assignment must be +-1 valued")
    return sigma


def empty_partial(n_vars: int) -> np.ndarray:
    return np.zeros(n_vars, dtype=np.int8)


def energy(formula: Formula, sigma: np.ndarray) -> int:
    """Number of constraints violated by the full assignment sigma."""
    sigma = np.asarray(sigma)
    if sigma.shape != (formula.n_vars,) or not np.all(np.abs(sigma) == 1):
        raise ValueError("energy requires a full +-1 assignment")
    e = 0
    if isinstance(formula, CnfFormula):
        for cl in formula.clauses:
            if all(sigma[lit.var] != lit.sign for lit in cl):
                e += 1
    else:
        for vs, j in formula.equations:
            prod = 1
            for v in vs:
                prod *= int(sigma[v])
            if prod != j:
                e += 1
    return e


def is_solution(formula: Formula, sigma: np.ndarray) -> bool:
    return energy(formula, sigma) == 0


@dataclass(frozen=True)
class ResidualFormula:
    """Outcome of simplifying a CNF under a partial assignment.

    `formula` keeps the original variable indexing but contains no assigned
    variable; empty clauses are not stored, only flagged via `contradiction`.
    """

    formula: CnfFormula
    partial: np.ndarray
    contradiction: bool
    n_satisfied: int

    def extend(self, residual_sigma: np.ndarray) -> np.ndarray:
        """Merge a residual solution with the partial assignment."""
        sigma = np.where(self.partial != 0, self.partial, residual_sigma)
        return sigma.astype(np.int8)


def simplify(formula: CnfFormula, partial: np.ndarray) -> ResidualFormula:
    """Remove satisfied clauses and falsified literals under `partial`."""
    partial = np.asarray(partial, dtype=np.int8)
    if partial.shape != (formula.n_vars,):
        raise ValueError("partial assignment length mismatch")
    kept: list[Clause] = []
    contradiction = False
    n_sat = 0
    for cl in formula.clauses:
        reduced = []
        satisfied = False
        for lit in cl:
            val = partial[lit.var]
            if val == 0:
                reduced.append(lit)
            elif val == lit.sign:
                satisfied = True
                break
        if satisfied:
            n_sat += 1
            continue
        if not reduced:
            contradiction = True
            continue
        kept.append(tuple(reduced))
    return ResidualFormula(
        formula=CnfFormula(formula.n_vars, tuple(kept)),
        partial=partial.copy(),
        contradiction=contradiction,
        n_satisfied=n_sat,
    )


def to_perceptron_system(cnf: CnfFormula) -> tuple[np.ndarray, int]:
    """Map a k-uniform CNF to rows T^a in {-1,0,1}^N with threshold -(k-1).

    sigma satisfies the CNF iff sigma . T^a > -(k-1) for every row a.
    """
    lengths = set(cnf.clause_lengths())
    if len(lengths) > 1:
        raise ValueError(f"CNF is not k-uniform: clause lengths {sorted(lengths)}")
    k = lengths.pop() if lengths else 0
    rows = np.zeros((cnf.n_clauses, cnf.n_vars), dtype=np.int8)
    for a, cl in enumerate(cnf.clauses):
        for lit in cl:
            rows[a, lit.var] = lit.sign  # -J = sign
    return rows, -(k - 1)


# ---------------------------------------------------------------------------
# DIMACS I/O.  CNF: standard `p cnf n m` format.  XOR: extended DIMACS with
# lines prefixed `x`; a leading `-` on the first listed literal encodes
# parity J=-1.  A planted assignment travels as a `c planted ...` comment.
# ---------------------------------------------------------------------------


def write_dimacs(formula: Formula, fh: TextIO, planted: np.ndarray | None = None) -> None:
    if planted is not None:
        fh.write("c planted " + " ".join(f"{int(v):+d}" for v in planted) + "\n")
    if isinstance(formula, CnfFormula):
        fh.write(f"p cnf {formula.n_vars} {formula.n_clauses}\n")
        for cl in formula.clauses:
            fh.write(" ".join(str(lit.sign * (lit.var + 1)) for lit in cl) + " 0\n")
    else:
        fh.write(f"p cnf {formula.n_vars} {formula.n_equations}\n")
        for vs, j in formula.equations:
            lits = [v + 1 for v in vs]
            if j == -1:
                lits[0] = -lits[0]
            fh.write("x " + " ".join(str(x) for x in lits) + " 0\n")


def read_dimacs(fh: TextIO) -> tuple[Formula, np.ndarray | None]:
    n_vars = None
    cnf_clauses: list[Clause] = []
    xor_equations: list[tuple[tuple[int, ...], int]] = []
    planted = None
    for line in fh:
        line = line.strip()
        if not line:
            continue
        if line.startswith("c"):
            tokens = line.split()
            if len(tokens) >= 2 and tokens[1] == "planted":
                planted = full_assignment(int(t) for t in tokens[2:])
            continue
        if line.startswith("p"):
            _, _, n, _ = line.split()
            n_vars = int(n)
            continue
        if n_vars is None:
            raise ValueError("clause line before DIMACS header")
        if line.startswith("x"):
            lits = [int(t) for t in line.split()[1:]]
            if lits[-1] != 0:
                raise ValueError("xor line not terminated by 0")
            lits = lits[:-1]
            j = -1 if lits[0] < 0 else 1
            vs = tuple(abs(x) - 1 for x in lits)
            xor_equations.append((vs, j))
        else:
            lits = [int(t) for t in line.split()]
            if lits[-1] != 0:
                raise ValueError("clause line not terminated by 0")
            cnf_clauses.append(
                tuple(Literal(abs(x) - 1, 1 if x > 0 else -1) for x in lits[:-1])
            )
    if n_vars is None:
        raise ValueError("missing DIMACS header")
    if xor_equations and cnf_clauses:
        raise ValueError("mixed CNF/XOR files are not supported")
    formula: Formula
    if xor_equations:
        formula = XorFormula(n_vars, tuple(xor_equations))
    else:
        formula = CnfFormula(n_vars, tuple(cnf_clauses))
    return formula, planted
