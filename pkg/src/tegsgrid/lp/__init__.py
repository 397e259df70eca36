from .mps import MpsError, export_standard_form, read_mps, write_mps
from .program import (
    EQ,
    GE,
    INF,
    INFEASIBLE,
    ITERATION_LIMIT,
    LE,
    OPTIMAL,
    UNBOUNDED,
    LinearProgram,
    LpConstructionError,
    LpSolution,
    from_dense,
)
from .solve import SolveOptions, solve

__all__ = [
    "EQ", "GE", "LE", "INF",
    "OPTIMAL", "INFEASIBLE", "UNBOUNDED", "ITERATION_LIMIT",
    "LinearProgram", "LpConstructionError", "LpSolution", "from_dense",
    "SolveOptions", "solve",
    "MpsError", "export_standard_form", "read_mps", "write_mps",
]
