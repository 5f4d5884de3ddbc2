"""MILP intermediate representation, simplex/branch-and-bound, MPS I/O."""

from .model import MilpModel, Solution, SolverConfig, add_glover_product, relative_gap
from .bnb import enumerate_oracle, solve_lp, solve_milp
from .mps import export_mps, read_mps

__all__ = [
    "MilpModel",
    "Solution",
    "SolverConfig",
    "add_glover_product",
    "relative_gap",
    "enumerate_oracle",
    "solve_lp",
    "solve_milp",
    "export_mps",
    "read_mps",
]
