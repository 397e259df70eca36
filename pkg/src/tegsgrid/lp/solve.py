from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from .program import (
    EQ,
    GE,
    INFEASIBLE,
    ITERATION_LIMIT,
    LE,
    OPTIMAL,
    UNBOUNDED,
    LinearProgram,
    LpSolution,
)
from .simplex import solve_simplex


@dataclass(frozen=True)
class SolveOptions:
    """Solver settings. ``backend`` is ``"highs"`` (default) or ``"simplex"``
    (the dense in-package simplex, for small programs only)."""

    feas_tol: float = 1e-7
    opt_tol: float = 1e-7
    iteration_limit: int | None = None
    backend: str = "highs"
    stall_threshold: int = 50
    time_limit: float | None = None


_HIGHS_STATUS = {0: OPTIMAL, 1: ITERATION_LIMIT, 2: INFEASIBLE, 3: UNBOUNDED}


def solve(lp: LinearProgram, options: SolveOptions | None = None) -> LpSolution:
    """Minimize ``lp``; duals are d(objective)/d(rhs) per row."""
    options = options or SolveOptions()
    if lp.num_vars == 0:
        if lp.num_rows:
            zero_ok = all(
                (s == LE and 0.0 <= r + options.feas_tol)
                or (s == GE and 0.0 >= r - options.feas_tol)
                or (s == EQ and abs(r) <= options.feas_tol)
                for s, r in zip(lp.row_sense, lp.row_rhs)
            )
            if not zero_ok:
                return LpSolution(INFEASIBLE, math.nan, np.zeros(0))
        return LpSolution(OPTIMAL, 0.0, np.zeros(0), duals=np.zeros(lp.num_rows))
    if options.backend == "simplex":
        return solve_simplex(
            lp,
            feas_tol=options.feas_tol,
            opt_tol=options.opt_tol,
            iteration_limit=options.iteration_limit or 10_000,
            stall_threshold=options.stall_threshold,
        )
    if options.backend != "highs":
        raise ValueError(f"unknown backend {options.backend!r}")
    return _solve_highs(lp, options)


def _solve_highs(lp: LinearProgram, options: SolveOptions) -> LpSolution:
    A = lp.matrix()
    sense = np.array(lp.row_sense)
    rhs = lp.rhs
    le = np.flatnonzero(sense == LE)
    ge = np.flatnonzero(sense == GE)
    eq = np.flatnonzero(sense == EQ)
    ub_rows = np.concatenate([le, ge])
    A_ub = sp.vstack([A[le], -A[ge]]).tocsr() if ub_rows.size else None
    b_ub = np.concatenate([rhs[le], -rhs[ge]]) if ub_rows.size else None
    A_eq = A[eq] if eq.size else None
    b_eq = rhs[eq] if eq.size else None
    bounds = np.column_stack([lp.lower, lp.upper])
    bounds = [(None if math.isinf(lo) else lo, None if math.isinf(up) else up) for lo, up in bounds]

    highs_opts = {
        "primal_feasibility_tolerance": options.feas_tol,
        "dual_feasibility_tolerance": options.opt_tol,
        "presolve": True,
    }
    if options.iteration_limit is not None:
        highs_opts["maxiter"] = options.iteration_limit
    if options.time_limit is not None:
        highs_opts["time_limit"] = options.time_limit
    res = linprog(
        lp.objective,
        A_ub=A_ub,
        b_ub=b_ub,
        A_eq=A_eq,
        b_eq=b_eq,
        bounds=bounds,
        method="highs",
        options=highs_opts,
    )
    status = _HIGHS_STATUS.get(res.status)
    if status is None:
        # numerical trouble or time limit: never report it as infeasible
        status = ITERATION_LIMIT
    if status != OPTIMAL:
        return LpSolution(status, math.nan, np.full(lp.num_vars, math.nan), iterations=int(res.nit or 0),
                          message=str(res.message))
    duals = np.zeros(lp.num_rows)
    if ub_rows.size:
        m_ub = np.asarray(res.ineqlin.marginals)
        duals[le] = m_ub[: le.size]
        duals[ge] = -m_ub[le.size:]
    if eq.size:
        duals[eq] = np.asarray(res.eqlin.marginals)
    return LpSolution(OPTIMAL, float(res.fun), np.asarray(res.x, float), duals=duals,
                      iterations=int(res.nit or 0), message=str(res.message))
