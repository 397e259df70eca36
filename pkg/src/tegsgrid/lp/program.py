"""Sparse bounded-variable linear program, built incrementally.

The program is always a minimization. Constraint coefficients are kept as
(row, col, value) triplets; duplicates are summed when the matrix is
materialized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp

INF = math.inf

LE, EQ, GE = "<=", "=", ">="
_SENSE_ALIASES = {
    "<=": LE, "<": LE, "L": LE, "le": LE, "≤": LE,
    "=": EQ, "==": EQ, "E": EQ, "eq": EQ,
    ">=": GE, ">": GE, "G": GE, "ge": GE, "≥": GE,
}


class LpConstructionError(ValueError):
    pass


def normalize_sense(sense: str) -> str:
    try:
        return _SENSE_ALIASES[sense]
    except KeyError:
        raise LpConstructionError(f"unknown row sense {sense!r}") from None


class LinearProgram:
    """Minimize ``objective @ x`` subject to row constraints and variable bounds."""

    def __init__(self):
        self._lb: list[float] = []
        self._ub: list[float] = []
        self._cost: list[float] = []
        self.var_names: list[str | None] = []
        self._rows: list[np.ndarray] = []
        self._cols: list[np.ndarray] = []
        self._vals: list[np.ndarray] = []
        self.row_sense: list[str] = []
        self.row_rhs: list[float] = []
        self.row_names: list[str | None] = []
        self._csr: sp.csr_matrix | None = None

    # -- construction -----------------------------------------------------

    @property
    def num_vars(self) -> int:
        return len(self._cost)

    @property
    def num_rows(self) -> int:
        return len(self.row_rhs)

    def add_var(self, lower: float = 0.0, upper: float = INF, cost: float = 0.0, name: str | None = None) -> int:
        lower, upper, cost = float(lower), float(upper), float(cost)
        if math.isnan(lower) or math.isnan(upper) or not math.isfinite(cost):
            raise LpConstructionError(f"invalid bound or cost for variable {name!r}")
        if lower > upper:
            raise LpConstructionError(f"lower bound {lower} exceeds upper bound {upper} for variable {name!r}")
        self._lb.append(lower)
        self._ub.append(upper)
        self._cost.append(cost)
        self.var_names.append(name)
        self._csr = None
        return self.num_vars - 1

    def add_vars(self, lower, upper, cost, names: Sequence[str] | None = None) -> np.ndarray:
        """Vectorized ``add_var``; scalar arguments broadcast (to ``len(names)``
        when names are given). Returns the new column indices."""
        lower, upper, cost = np.broadcast_arrays(
            np.asarray(lower, float), np.asarray(upper, float), np.asarray(cost, float)
        )
        if names is not None and lower.ndim == 0:
            lower, upper, cost = (np.full(len(names), a) for a in (lower, upper, cost))
        n = lower.size
        if names is not None and len(names) != n:
            raise LpConstructionError("names length does not match number of variables")
        if np.isnan(lower).any() or np.isnan(upper).any() or not np.isfinite(cost).all():
            raise LpConstructionError("invalid bound or cost")
        if (lower > upper).any():
            raise LpConstructionError("lower bound exceeds upper bound")
        start = self.num_vars
        self._lb.extend(lower.ravel().tolist())
        self._ub.extend(upper.ravel().tolist())
        self._cost.extend(cost.ravel().tolist())
        self.var_names.extend(names if names is not None else [None] * n)
        self._csr = None
        return np.arange(start, start + n)

    def add_constraint(
        self,
        sense: str,
        rhs: float,
        terms: Mapping[int, float] | Iterable[tuple[int, float]],
        name: str | None = None,
    ) -> int:
        sense = normalize_sense(sense)
        items = list(terms.items()) if isinstance(terms, Mapping) else list(terms)
        cols = np.array([c for c, _ in items], dtype=np.int64)
        vals = np.array([v for _, v in items], dtype=float)
        row = self.num_rows
        self._check_cols(cols)
        if not np.isfinite(vals).all() or not math.isfinite(rhs):
            raise LpConstructionError(f"non-finite coefficient or rhs in row {name!r}")
        self._rows.append(np.full(len(cols), row, dtype=np.int64))
        self._cols.append(cols)
        self._vals.append(vals)
        self.row_sense.append(sense)
        self.row_rhs.append(float(rhs))
        self.row_names.append(name)
        self._csr = None
        return row

    def add_constraints(self, sense, rhs, rows, cols, vals, names: Sequence[str] | None = None) -> np.ndarray:
        """Add ``len(rhs)`` rows at once. ``rows`` index into the new block (0-based)."""
        rhs = np.atleast_1d(np.asarray(rhs, float))
        m = rhs.size
        senses = [normalize_sense(sense)] * m if isinstance(sense, str) else [normalize_sense(s) for s in sense]
        if len(senses) != m:
            raise LpConstructionError("sense length does not match rhs")
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        vals = np.asarray(vals, dtype=float)
        if not (rows.shape == cols.shape == vals.shape):
            raise LpConstructionError("rows, cols and vals must have equal shapes")
        if rows.size and (rows.min() < 0 or rows.max() >= m):
            raise LpConstructionError("row index outside the new block")
        self._check_cols(cols)
        if not np.isfinite(vals).all() or not np.isfinite(rhs).all():
            raise LpConstructionError("non-finite coefficient or rhs")
        start = self.num_rows
        self._rows.append(rows + start)
        self._cols.append(cols)
        self._vals.append(vals)
        self.row_sense.extend(senses)
        self.row_rhs.extend(rhs.tolist())
        self.row_names.extend(names if names is not None else [None] * m)
        self._csr = None
        return np.arange(start, start + m)

    def _check_cols(self, cols: np.ndarray):
        if cols.size and (cols.min() < 0 or cols.max() >= self.num_vars):
            bad = cols[(cols < 0) | (cols >= self.num_vars)][0]
            raise LpConstructionError(f"column index {bad} out of range for {self.num_vars} variables")

    def set_cost(self, col: int, cost: float):
        self._cost[col] = float(cost)

    def set_bounds(self, col: int, lower: float, upper: float):
        if lower > upper:
            raise LpConstructionError(f"lower bound {lower} exceeds upper bound {upper}")
        self._lb[col] = float(lower)
        self._ub[col] = float(upper)

    # -- views --------------------------------------------------------------

    @property
    def objective(self) -> np.ndarray:
        return np.array(self._cost, dtype=float)

    @property
    def lower(self) -> np.ndarray:
        return np.array(self._lb, dtype=float)

    @property
    def upper(self) -> np.ndarray:
        return np.array(self._ub, dtype=float)

    @property
    def var_bounds(self) -> np.ndarray:
        return np.column_stack([self.lower, self.upper]) if self.num_vars else np.zeros((0, 2))

    @property
    def rhs(self) -> np.ndarray:
        return np.array(self.row_rhs, dtype=float)

    def matrix(self) -> sp.csr_matrix:
        """Canonical constraint matrix with duplicate entries summed."""
        if self._csr is None:
            if self._rows:
                r = np.concatenate(self._rows)
                c = np.concatenate(self._cols)
                v = np.concatenate(self._vals)
            else:
                r = c = np.zeros(0, np.int64)
                v = np.zeros(0)
            m = sp.coo_matrix((v, (r, c)), shape=(self.num_rows, self.num_vars)).tocsr()
            m.sum_duplicates()
            m.sort_indices()
            self._csr = m
        return self._csr

    def triplets(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        coo = self.matrix().tocoo()
        return coo.row.astype(np.int64), coo.col.astype(np.int64), coo.data.copy()

    def coefficient(self, row: int, col: int) -> float:
        return float(self.matrix()[row, col])

    def names_for_vars(self) -> list[str]:
        return [n if n is not None else f"x{i}" for i, n in enumerate(self.var_names)]

    def names_for_rows(self) -> list[str]:
        return [n if n is not None else f"r{i}" for i, n in enumerate(self.row_names)]

    def row_activity(self, x: np.ndarray) -> np.ndarray:
        return self.matrix() @ np.asarray(x, float)

    def max_violation(self, x: np.ndarray) -> float:
        """Largest absolute bound or row violation of point ``x``."""
        x = np.asarray(x, float)
        worst = 0.0
        if self.num_vars:
            worst = max(worst, float(np.max(np.maximum(self.lower - x, 0.0), initial=0.0)))
            worst = max(worst, float(np.max(np.maximum(x - self.upper, 0.0), initial=0.0)))
        if self.num_rows:
            act = self.row_activity(x)
            rhs = self.rhs
            sense = np.array(self.row_sense)
            viol = np.where(sense == LE, act - rhs, np.where(sense == GE, rhs - act, np.abs(act - rhs)))
            worst = max(worst, float(np.max(np.maximum(viol, 0.0))))
        return worst

    def evaluate(self, x: np.ndarray) -> float:
        return float(self.objective @ np.asarray(x, float)) if self.num_vars else 0.0

    def scaled_objective(self, factor: float) -> "LinearProgram":
        out = self.copy()
        out._cost = [c * factor for c in out._cost]
        return out

    def copy(self) -> "LinearProgram":
        out = LinearProgram()
        out._lb = list(self._lb)
        out._ub = list(self._ub)
        out._cost = list(self._cost)
        out.var_names = list(self.var_names)
        out._rows = list(self._rows)
        out._cols = list(self._cols)
        out._vals = list(self._vals)
        out.row_sense = list(self.row_sense)
        out.row_rhs = list(self.row_rhs)
        out.row_names = list(self.row_names)
        return out

    def __repr__(self):
        return f"LinearProgram(num_vars={self.num_vars}, num_rows={self.num_rows}, nnz={self.matrix().nnz})"


def from_dense(c, A=(), senses=(), b=(), lower=None, upper=None) -> LinearProgram:
    """Convenience constructor used by tests and small examples."""
    c = np.asarray(c, float)
    n = c.size
    lp = LinearProgram()
    lp.add_vars(
        np.zeros(n) if lower is None else lower,
        np.full(n, INF) if upper is None else upper,
        c,
    )
    A = np.asarray(A, float).reshape(-1, n) if len(A) else np.zeros((0, n))
    for i, row in enumerate(A):
        nz = np.flatnonzero(row)
        lp.add_constraint(senses[i], float(b[i]), [(int(j), float(row[j])) for j in nz])
    return lp


@dataclass
class LpSolution:
    status: str
    objective_value: float
    primal: np.ndarray
    duals: np.ndarray | None = None
    iterations: int = 0
    message: str = ""

    @property
    def is_optimal(self) -> bool:
        return self.status == OPTIMAL


OPTIMAL = "Optimal"
INFEASIBLE = "Infeasible"
UNBOUNDED = "Unbounded"
ITERATION_LIMIT = "IterationLimit"
