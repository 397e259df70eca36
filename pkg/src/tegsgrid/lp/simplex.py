"""Dense two-phase primal simplex with bounded variables.

Meant for small programs (tests, toy dispatch instances, cross-checks); the
dispatch models go through HiGHS. Pricing is Dantzig's rule until a run of
``stall_threshold`` degenerate pivots, after which Bland's smallest-index
rule takes over until the objective moves again.
"""

from __future__ import annotations

import math

import numpy as np

from .program import EQ, GE, INFEASIBLE, ITERATION_LIMIT, LE, OPTIMAL, UNBOUNDED, LinearProgram, LpSolution


class _Tableau:
    def __init__(self, A, b, c, upper, basis, pivot_tol, opt_tol, stall_threshold):
        self.T = np.array(A, dtype=float)          # B^-1 A
        self.xB = np.array(b, dtype=float)         # values of basic variables
        self.c = np.array(c, dtype=float)
        self.U = np.array(upper, dtype=float)
        self.basis = list(basis)
        self.at_upper = np.zeros(self.T.shape[1], dtype=bool)
        self.blocked = np.zeros(self.T.shape[1], dtype=bool)  # never allowed to enter
        self.pivot_tol = pivot_tol
        self.opt_tol = opt_tol
        self.stall_threshold = stall_threshold
        self.iterations = 0

    def reduced_costs(self):
        cB = self.c[self.basis]
        return self.c - cB @ self.T

    def _entering(self, d, bland):
        n = self.T.shape[1]
        is_basic = np.zeros(n, dtype=bool)
        is_basic[self.basis] = True
        up = (~self.at_upper) & (d < -self.opt_tol)
        down = self.at_upper & (d > self.opt_tol)
        eligible = (up | down) & ~is_basic & ~self.blocked
        # fixed-at-zero columns cannot move
        eligible &= self.U > 0
        idx = np.flatnonzero(eligible)
        if idx.size == 0:
            return None
        if bland:
            return int(idx[0])
        return int(idx[np.argmax(np.abs(d[idx]))])

    def run(self, max_iter):
        degenerate_run = 0
        while True:
            if self.iterations >= max_iter:
                return ITERATION_LIMIT
            d = self.reduced_costs()
            bland = degenerate_run >= self.stall_threshold
            j = self._entering(d, bland)
            if j is None:
                return OPTIMAL
            delta = -1.0 if self.at_upper[j] else 1.0
            alpha = self.T[:, j]
            theta = self.U[j]
            leave = None
            leave_to_upper = False
            for i, bi in enumerate(self.basis):
                a = delta * alpha[i]
                if a > self.pivot_tol:
                    lim = max(self.xB[i], 0.0) / a
                    to_upper = False
                elif a < -self.pivot_tol and math.isfinite(self.U[bi]):
                    lim = max(self.U[bi] - self.xB[i], 0.0) / -a
                    to_upper = True
                else:
                    continue
                if lim < theta - 1e-12 or (
                    leave is not None and abs(lim - theta) <= 1e-12 and bi < self.basis[leave]
                ):
                    theta, leave, leave_to_upper = lim, i, to_upper
            if math.isinf(theta):
                return UNBOUNDED
            self.iterations += 1
            degenerate_run = degenerate_run + 1 if theta <= 1e-12 else 0
            self.xB -= delta * theta * alpha
            if leave is None:
                # bound flip, basis unchanged
                self.at_upper[j] = not self.at_upper[j]
                continue
            entering_value = (self.U[j] - theta) if self.at_upper[j] else theta
            leaving = self.basis[leave]
            self.at_upper[leaving] = leave_to_upper
            self.at_upper[j] = False
            self._pivot(leave, j)
            self.xB[leave] = entering_value

    def _pivot(self, r, j):
        T = self.T
        piv = T[r, j]
        T[r] /= piv
        col = T[:, j].copy()
        col[r] = 0.0
        T -= np.outer(col, T[r])
        self.basis[r] = j

    def primal(self):
        n = self.T.shape[1]
        x = np.where(self.at_upper, self.U, 0.0)
        x[np.isinf(x)] = 0.0
        x[self.basis] = self.xB
        return x[:n]


def solve_simplex(
    lp: LinearProgram,
    feas_tol: float = 1e-7,
    opt_tol: float = 1e-7,
    iteration_limit: int = 10_000,
    stall_threshold: int = 50,
) -> LpSolution:
    n = lp.num_vars
    m = lp.num_rows
    lo, up, c = lp.lower, lp.upper, lp.objective
    A = lp.matrix().toarray() if m else np.zeros((0, n))
    b = lp.rhs.copy()

    # Substitute every variable by nonnegative ones:
    #   finite lower: x = lo + y, y in [0, up - lo]
    #   only upper:   x = up - y, y in [0, inf)
    #   free:         x = y1 - y2
    cols, costs, uppers, recover = [], [], [], []
    shift = np.zeros(n)
    for k in range(n):
        if math.isfinite(lo[k]):
            shift[k] = lo[k]
            cols.append(A[:, k]); costs.append(c[k]); uppers.append(up[k] - lo[k])
            recover.append((k, 1.0))
        elif math.isfinite(up[k]):
            shift[k] = up[k]
            cols.append(-A[:, k]); costs.append(-c[k]); uppers.append(math.inf)
            recover.append((k, -1.0))
        else:
            cols.append(A[:, k]); costs.append(c[k]); uppers.append(math.inf)
            recover.append((k, 1.0))
            cols.append(-A[:, k]); costs.append(-c[k]); uppers.append(math.inf)
            recover.append((k, -1.0))
    b = b - (A @ shift if n else 0.0)

    for i, s in enumerate(lp.row_sense):
        if s == EQ:
            continue
        e = np.zeros(m)
        e[i] = 1.0 if s == LE else -1.0
        cols.append(e); costs.append(0.0); uppers.append(math.inf); recover.append((None, 0.0))

    nstruct = len(cols)
    A2 = np.column_stack(cols) if cols else np.zeros((m, 0))
    flip = np.where(b < 0, -1.0, 1.0)
    A2 = A2 * flip[:, None]
    b2 = b * flip

    # phase 1: artificial basis
    A1 = np.hstack([A2, np.eye(m)])
    c1 = np.concatenate([np.zeros(nstruct), np.ones(m)])
    U1 = np.concatenate([np.array(uppers, float), np.full(m, math.inf)])
    tab = _Tableau(A1, b2, c1, U1, range(nstruct, nstruct + m), 1e-9, opt_tol, stall_threshold)
    status = tab.run(iteration_limit) if m else OPTIMAL
    if status == ITERATION_LIMIT:
        return LpSolution(ITERATION_LIMIT, math.nan, np.full(n, math.nan), iterations=tab.iterations)
    infeas = float(tab.xB[[i for i, bi in enumerate(tab.basis) if bi >= nstruct]].sum()) if m else 0.0
    scale = max(1.0, float(np.abs(b2).max(initial=0.0)))
    if infeas > feas_tol * scale:
        return LpSolution(INFEASIBLE, math.nan, np.full(n, math.nan), iterations=tab.iterations)

    # phase 2: artificials pinned at zero
    tab.c = np.concatenate([np.array(costs, float), np.zeros(m)])
    tab.U[nstruct:] = 0.0
    tab.blocked[nstruct:] = True
    status = tab.run(iteration_limit)
    if status != OPTIMAL:
        return LpSolution(status, math.nan if status != UNBOUNDED else -math.inf, np.full(n, math.nan),
                          iterations=tab.iterations)

    y = tab.primal()
    x = shift.copy()
    for idx, (k, sign) in enumerate(recover):
        if k is not None:
            x[k] += sign * y[idx]

    # row duals: solve B^T w = c_B in the flipped system, then undo the flip
    duals = None
    if m:
        B = A1[:, tab.basis]
        try:
            w = np.linalg.solve(B.T, tab.c[tab.basis])
            duals = w * flip
        except np.linalg.LinAlgError:
            duals = None
    obj = float(c @ x) if n else 0.0
    return LpSolution(OPTIMAL, obj, x, duals=duals, iterations=tab.iterations)
