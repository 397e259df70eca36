"""Independent reference computations used as test oracles.

None of these import the package's solver, dispatch or shaper code.
"""

from __future__ import annotations

import itertools
import math

import numpy as np


def random_bounded_lp(rng: np.random.Generator, max_vars: int = 6, max_rows: int = 6):
    """Dense LP with finite bounds on every variable: (c, A, senses, b, lo, up)."""
    n = int(rng.integers(1, max_vars + 1))
    m = int(rng.integers(0, max_rows + 1))
    c = rng.integers(-10, 11, n).astype(float)
    lo = rng.integers(-5, 3, n).astype(float)
    up = lo + rng.integers(0, 8, n).astype(float)
    A = rng.integers(-5, 6, (m, n)).astype(float)
    senses = [str(s) for s in rng.choice(["<=", ">=", "="], m, p=[0.45, 0.45, 0.1])]
    # right-hand sides around the activity of a random box point keep most instances feasible
    x0 = lo + rng.random(n) * (up - lo)
    b = np.round(A @ x0 + rng.normal(0.0, 2.0, m))
    return c, A, senses, b, lo, up


def enumerate_vertices(c, A, senses, b, lo, up, tol: float = 1e-7):
    """Minimize ``c @ x`` by checking every basic solution of the polytope.

    Returns ``(objective, x)`` or ``(None, None)`` when no vertex is feasible.
    Every variable must be bounded, so the optimum (if any) sits at a vertex.
    """
    c = np.asarray(c, float)
    n = c.size
    rows = []
    eq_rows = []
    for a, s, rhs in zip(np.asarray(A, float).reshape(-1, n), senses, b):
        (eq_rows if s == "=" else rows).append((a, s, float(rhs)))
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        rows.append((e, ">=", float(lo[j])))
        rows.append((e, "<=", float(up[j])))
    k = n - len(eq_rows)
    if k < 0:
        # more equalities than variables: pick any n of them, check the rest
        choices = [()]
        base = None
    else:
        choices = itertools.combinations(range(len(rows)), k)
        base = [(a, rhs) for a, _, rhs in eq_rows]
    all_rows = eq_rows + rows
    mats, rhss = [], []
    if base is None:
        for sub in itertools.combinations(range(len(eq_rows)), n):
            mats.append(np.array([eq_rows[i][0] for i in sub]))
            rhss.append(np.array([eq_rows[i][2] for i in sub]))
    else:
        for sub in choices:
            active = base + [(rows[i][0], rows[i][2]) for i in sub]
            mats.append(np.array([a for a, _ in active]).reshape(n, n))
            rhss.append(np.array([r for _, r in active]))
    if not mats:
        return None, None
    M = np.stack(mats)
    r = np.stack(rhss)
    dets = np.linalg.det(M)
    ok = np.abs(dets) > 1e-9
    if not ok.any():
        return None, None
    X = np.linalg.solve(M[ok], r[ok][..., None])[..., 0]
    feasible = np.ones(len(X), bool)
    for a, s, rhs in all_rows:
        act = X @ a
        scale = 1.0 + abs(rhs)
        if s == "<=":
            feasible &= act <= rhs + tol * scale
        elif s == ">=":
            feasible &= act >= rhs - tol * scale
        else:
            feasible &= np.abs(act - rhs) <= tol * scale
    if not feasible.any():
        return None, None
    X = X[feasible]
    objs = X @ c
    i = int(np.argmin(objs))
    return float(objs[i]), X[i]


def toy_lattice_optimum(
    demand=(10.0, 10.0, 10.0),
    pv_avail=(30.0, 0.0, 0.0),
    energy_cap=20.0,
    charge_cap=20.0,
    discharge_cap=10.0,
    eta_c=1.0,
    eta_d=0.5,
    thermal_cap=100.0,
    thermal_cost=100.0,
    voll=9000.0,
    tie_line=30.0,
    step=0.5,
):
    """Cheapest operation of a one-unit grid plus PV + storage, searched
    exhaustively over charge/discharge decisions on a ``step`` MW lattice.

    For fixed storage actions the remaining per-hour choice is a merit order:
    free PV first, then the thermal unit, then unserved load at ``voll``.
    Exhaustive search over the action lattice is done hour by hour on the
    reachable state-of-charge lattice, keeping the cheapest path per state.
    """
    charges = np.arange(0.0, charge_cap + 1e-9, step)
    discharges = np.arange(0.0, discharge_cap + 1e-9, step)
    states = {0.0: (0.0, [])}
    for t, (d_t, pv_t) in enumerate(zip(demand, pv_avail)):
        nxt: dict = {}
        for soc, (cost, path) in states.items():
            for ch in charges:
                for dis in discharges:
                    new = soc + eta_c * ch - dis / eta_d
                    if new < -1e-9 or new > energy_cap + 1e-9:
                        continue
                    # PV used: as much as the load, the charging and the tie line absorb
                    pv = min(pv_t, max(d_t + ch - dis, 0.0), tie_line + ch - dis)
                    if pv < -1e-9 or dis - ch < -tie_line - 1e-9:
                        continue
                    residual = d_t - pv - dis + ch
                    if residual < -1e-9:
                        continue
                    gen = min(residual, thermal_cap)
                    nse = residual - gen
                    hour_cost = thermal_cost * gen + voll * nse
                    key = round(new, 6)
                    total = cost + hour_cost
                    if key not in nxt or total < nxt[key][0]:
                        nxt[key] = (total, path + [(ch, dis, gen, nse)])
        states = nxt
    best = min(states.values(), key=lambda v: v[0])
    return best[0], best[1]


def shaper_step_by_step(pv, derated, energy_cap, charge_cap, discharge_cap, eta_c, eta_d, soc0=0.0):
    """Hand-written evaluation of the greedy baseload policy, one hour at a time."""
    rows = []
    soc = soc0
    for p in pv:
        if p > derated:
            room = (energy_cap - soc) / eta_c
            ch = max(0.0, min(p - derated, charge_cap, room))
            soc = min(soc + eta_c * ch, energy_cap)
            rows.append({"delivered": derated, "charge": ch, "discharge": 0.0, "soc": soc})
        else:
            dis = min(derated - p, discharge_cap, soc * eta_d)
            soc = max(soc - dis / eta_d, 0.0)
            rows.append({"delivered": p + dis, "charge": 0.0, "discharge": dis, "soc": soc})
    return rows


def count_unavailable(delivered, threshold, tol=1e-6) -> int:
    return sum(1 for x in delivered if x < threshold - tol)


def isclose(a, b, rel=1e-9, abs_=1e-12) -> bool:
    return math.isclose(a, b, rel_tol=rel, abs_tol=abs_)
