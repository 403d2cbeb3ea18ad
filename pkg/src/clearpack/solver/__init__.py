"""Exact LP/MILP solving: bounded-variable rational simplex, branch and
bound with warm-started children, and the disjunct enumeration oracle."""

from .bnb import BnBResult, SolveOptions, layout_assignment, solve_milp
from .oracle import TooLargeError, disjunction_oracle
from .simplex import INFEASIBLE, OPTIMAL, UNBOUNDED, ExactTableau, LPSolution, solve_lp

__all__ = [
    "BnBResult",
    "SolveOptions",
    "layout_assignment",
    "solve_milp",
    "TooLargeError",
    "disjunction_oracle",
    "INFEASIBLE",
    "OPTIMAL",
    "UNBOUNDED",
    "ExactTableau",
    "LPSolution",
    "solve_lp",
]
