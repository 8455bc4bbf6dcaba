"""Linear-model IR, LP-file export, embedded simplex and a MIP branch-and-bound."""

from .bnb import mip_solve
from .lpfile import LpParseError, parse_lp_file, write_lp_file
from .model import Constraint, Lin, ModelIR, Sense, Variable, VarKind, lin_sum, same_model
from .simplex import LpSolution, LpStatus, SimplexError, lp_relax, simplex_solve, standardize

__all__ = [
    "Constraint",
    "Lin",
    "LpParseError",
    "LpSolution",
    "LpStatus",
    "ModelIR",
    "Sense",
    "SimplexError",
    "Variable",
    "VarKind",
    "lin_sum",
    "lp_relax",
    "mip_solve",
    "parse_lp_file",
    "same_model",
    "simplex_solve",
    "standardize",
    "write_lp_file",
]
