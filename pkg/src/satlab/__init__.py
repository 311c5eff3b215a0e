"""satlab: random k-SAT / k-XORSAT ensembles — solvers, structural analyses
and phase-transition experiments."""

__version__ = "0.1.0"

from .formulas import Clause, CnfFormula, Literal, XorFormula, energy, is_solution
from .generators import EnsembleSpec, gen_formula
from .rng import RngSeed, as_seed

__all__ = [
    "Clause",
    "CnfFormula",
    "EnsembleSpec",
    "Literal",
    "RngSeed",
    "XorFormula",
    "as_seed",
    "energy",
    "gen_formula",
    "is_solution",
    "__version__",
]
