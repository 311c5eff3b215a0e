"""Bipartite variable/clause factor graph with signed edges.

Edges are stored flat in CSR form from both sides, so message-passing code
can index per-edge arrays either clause-major or variable-major in O(degree).
The edge sign is the literal sign: +1 when the clause is satisfied by
sigma = +1 on that variable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .formulas import CnfFormula, Literal


@dataclass(frozen=True)
class FactorGraph:
    n_vars: int
    n_clauses: int
    edge_clause: np.ndarray  # clause index per edge, clause-major order
    edge_var: np.ndarray
    edge_sign: np.ndarray
    clause_ptr: np.ndarray  # CSR offsets into edges, clause-major
    var_edges: np.ndarray  # edge ids grouped by variable
    var_ptr: np.ndarray

    @property
    def n_edges(self) -> int:
        return len(self.edge_var)

    def clause_edge_ids(self, a: int) -> np.ndarray:
        return np.arange(self.clause_ptr[a], self.clause_ptr[a + 1])

    def vars_of(self, a: int) -> np.ndarray:
        return self.edge_var[self.clause_ptr[a] : self.clause_ptr[a + 1]]

    def var_edge_ids(self, i: int) -> np.ndarray:
        return self.var_edges[self.var_ptr[i] : self.var_ptr[i + 1]]

    def clauses_of(self, i: int) -> np.ndarray:
        return self.edge_clause[self.var_edge_ids(i)]

    def clauses_of_sign(self, i: int, sign: int) -> np.ndarray:
        """Clauses in which variable i appears with the given literal sign."""
        eids = self.var_edge_ids(i)
        return self.edge_clause[eids[self.edge_sign[eids] == sign]]

    def var_degree(self, i: int) -> int:
        return int(self.var_ptr[i + 1] - self.var_ptr[i])

    def to_formula(self) -> CnfFormula:
        clauses = []
        for a in range(self.n_clauses):
            lo, hi = self.clause_ptr[a], self.clause_ptr[a + 1]
            clauses.append(
                tuple(
                    Literal(int(self.edge_var[e]), int(self.edge_sign[e]))
                    for e in range(lo, hi)
                )
            )
        return CnfFormula(self.n_vars, tuple(clauses))


def from_arrays(
    n_vars: int,
    clause_ptr: np.ndarray,
    edge_var: np.ndarray,
    edge_sign: np.ndarray,
) -> FactorGraph:
    """Factor graph from flat clause-major CSR arrays (no formula object)."""
    m = len(clause_ptr) - 1
    edge_clause = np.repeat(np.arange(m, dtype=np.int64), np.diff(clause_ptr))
    edge_var = np.ascontiguousarray(edge_var, dtype=np.int64)
    order = np.argsort(edge_var, kind="stable")
    var_ptr = np.zeros(n_vars + 1, dtype=np.int64)
    np.add.at(var_ptr, edge_var + 1, 1)
    var_ptr = np.cumsum(var_ptr)
    return FactorGraph(
        n_vars=n_vars,
        n_clauses=m,
        edge_clause=edge_clause,
        edge_var=edge_var,
        edge_sign=np.ascontiguousarray(edge_sign, dtype=np.int8),
        clause_ptr=np.ascontiguousarray(clause_ptr, dtype=np.int64),
        var_edges=order,
        var_ptr=var_ptr,
    )


def to_factor_graph(formula: CnfFormula) -> FactorGraph:
    m = formula.n_clauses
    edge_clause, edge_var, edge_sign = [], [], []
    clause_ptr = np.zeros(m + 1, dtype=np.int64)
    for a, cl in enumerate(formula.clauses):
        for lit in cl:
            edge_clause.append(a)
            edge_var.append(lit.var)
            edge_sign.append(lit.sign)
        clause_ptr[a + 1] = len(edge_var)
    edge_var_arr = np.asarray(edge_var, dtype=np.int64)
    order = np.argsort(edge_var_arr, kind="stable")
    var_ptr = np.zeros(formula.n_vars + 1, dtype=np.int64)
    np.add.at(var_ptr, edge_var_arr + 1, 1)
    var_ptr = np.cumsum(var_ptr)
    return FactorGraph(
        n_vars=formula.n_vars,
        n_clauses=m,
        edge_clause=np.asarray(edge_clause, dtype=np.int64),
        edge_var=edge_var_arr,
        edge_sign=np.asarray(edge_sign, dtype=np.int8),
        clause_ptr=clause_ptr,
        var_edges=order,
        var_ptr=var_ptr,
    )
