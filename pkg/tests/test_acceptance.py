"""Acceptance checks. Each check prints one PASS/FAIL line with its measured
values; under pytest the lines are repeated in the terminal summary.

Run standalone with ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import functools
import sys
import tempfile
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from oracles import enumerate_vertices, random_bounded_lp, toy_lattice_optimum  # noqa: E402

from tegsgrid.dispatch import residuals, run_dispatch  # noqa: E402
from tegsgrid.io import reference_dataset, reference_manifest  # noqa: E402
from tegsgrid.lp import INFEASIBLE, OPTIMAL, SolveOptions, from_dense, solve  # noqa: E402
from tegsgrid.metrics import capacity_factor, compute_pna  # noqa: E402
from tegsgrid.model import (  # noqa: E402
    PAPER_DISCHARGE_MW,
    PAPER_STORAGE_SIZES_MWH,
    ScenarioConfig,
    paper_scenario_grid,
    sampled_week_hours,
)
from tegsgrid.report import write_summary  # noqa: E402
from tegsgrid.runner import RunnerOptions, run_sweep  # noqa: E402
from tegsgrid.shaper import shape_baseload  # noqa: E402

RESULTS: list[str] = []


def record(label: str, ok: bool, detail: str) -> bool:
    line = f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}"
    RESULTS.append(line)
    print(line)
    return ok


@functools.lru_cache(maxsize=None)
def reduced_system():
    return reference_dataset().take_hours(sampled_week_hours())


@functools.lru_cache(maxsize=None)
def reduced_sweep(workers: int = 1):
    start = time.perf_counter()
    out = run_sweep(reduced_system(), paper_scenario_grid(), RunnerOptions(workers=workers))
    return out, time.perf_counter() - start


def _index(outcomes):
    return {
        (o.scenario.storage_energy_mwh, o.scenario.discharge_capacity_mw, o.scenario.co2_reduction_fraction): o
        for o in outcomes
    }


# --------------------------------------------------------------------------


def check_1_metric_identities() -> bool:
    rng = np.random.default_rng(1)
    start = time.perf_counter()
    bad = 0
    for _ in range(1000):
        n = int(rng.integers(1, 500))
        pv = rng.uniform(0, 100, n) * (rng.random(n) < 0.6)
        dis = rng.uniform(0, 40, n) * (rng.random(n) < 0.5)
        soc = rng.uniform(0, 600, n) * (rng.random(n) < 0.5)
        rep = compute_pna(pv, dis, soc, float(rng.uniform(0, 120)))
        if rep.paf + rep.pna != 1.0 or sum(rep.cause_breakdown.values()) != rep.unavailable_hours:
            bad += 1
    dt = time.perf_counter() - start
    return record("1 metric identities", bad == 0 and dt < 1.0,
                  f"{bad} violations over 1000 traces, {dt:.2f} s (budget 1 s)")


def check_2_lp_oracle() -> bool:
    start = time.perf_counter()
    worst = {"simplex": 0.0, "highs": 0.0}
    mismatched = 0
    rng = np.random.default_rng(2)
    for _ in range(200):
        c, A, senses, b, lo, up = random_bounded_lp(rng)
        best, _ = enumerate_vertices(c, A, senses, b, lo, up)
        lp = from_dense(c, A, senses, b, lo, up)
        for backend in worst:
            sol = solve(lp, SolveOptions(backend=backend))
            if best is None:
                mismatched += sol.status != INFEASIBLE
            elif sol.status != OPTIMAL:
                mismatched += 1
            else:
                worst[backend] = max(worst[backend], abs(sol.objective_value - best))
    dt = time.perf_counter() - start
    ok = mismatched == 0 and max(worst.values()) <= 1e-6 and dt < 30
    return record("2 LP vs vertex enumeration", ok,
                  f"200 LPs, status mismatches {mismatched}, max |gap| simplex {worst['simplex']:.1e} "
                  f"/ highs {worst['highs']:.1e} (tol 1e-6), {dt:.1f} s (budget 30 s)")


def check_3_toy_brute_force() -> bool:
    from conftest import make_toy_system

    start = time.perf_counter()
    lattice, _ = toy_lattice_optimum(step=0.5)
    res = run_dispatch(make_toy_system(), ScenarioConfig(20.0, 10.0, 0.0))
    dt = time.perf_counter() - start
    gap_bound = 0.5 * 100.0  # one lattice step of backstop energy
    ok = res.status == OPTIMAL and -1e-6 <= lattice - res.total_cost <= gap_bound and dt < 10
    return record("3 toy dispatch vs lattice", ok,
                  f"LP {res.total_cost:.6f} $, lattice {lattice:.6f} $, gap bound {gap_bound:g} $, {dt:.2f} s")


def check_4_conservation() -> bool:
    outcomes, _ = reduced_sweep()
    worst = {"balance": 0.0, "soc_recursion": 0.0, "soc_bounds": 0.0, "charge_bounds": 0.0,
             "discharge_bounds": 0.0, "simultaneous": 0.0}
    n = 0
    for o in outcomes:
        if o.status == OPTIMAL:
            n += 1
            for k in worst:
                worst[k] = max(worst[k], o.residuals[k])
    ok = (worst["balance"] < 1e-5 and worst["soc_recursion"] < 1e-6 and worst["soc_bounds"] <= 1e-7
          and worst["charge_bounds"] <= 1e-7 and worst["discharge_bounds"] <= 1e-7 and worst["simultaneous"] <= 1e-4)
    return record("4 conservation", ok,
                  f"{n} optimal dispatches; balance {worst['balance']:.1e} MW, SOC {worst['soc_recursion']:.1e} MWh, "
                  f"bounds {max(worst['soc_bounds'], worst['charge_bounds'], worst['discharge_bounds']):.1e}, "
                  f"charge*discharge {worst['simultaneous']:.1e}")


def check_5_shaper_monotonicity() -> bool:
    from dataclasses import replace

    start = time.perf_counter()
    system = reference_dataset()
    pv = system.hybrid.pv.available()
    base = replace(system.hybrid.storage, discharge_capacity_mw=100.0, cyclic=False)
    derated = np.arange(5.0, 100.0 + 1e-9, 5.0)
    paf = {
        e: [shape_baseload(pv, replace(base, energy_capacity_mwh=e), p).availability(p).paf for p in derated]
        for e in PAPER_STORAGE_SIZES_MWH
    }
    in_power = all(all(b <= a + 1e-9 for a, b in zip(v, v[1:])) for v in paf.values())
    sizes = list(PAPER_STORAGE_SIZES_MWH)
    in_size = all(paf[b][i] >= paf[a][i] - 1e-9 for a, b in zip(sizes, sizes[1:]) for i in range(derated.size))
    dt = time.perf_counter() - start
    return record("5 shaper monotonicity", in_power and in_size and dt < 5,
                  f"non-increasing in derated power: {in_power}; non-decreasing in size: {in_size}; "
                  f"PAF 600 MWh at 5/100 MW = {paf[600.0][0]:.3f}/{paf[600.0][-1]:.3f}; {dt:.2f} s")


def check_6a_cap_raises_paf() -> bool:
    idx = _index(reduced_sweep()[0])
    bad = []
    for e in PAPER_STORAGE_SIZES_MWH:
        for d in PAPER_DISCHARGE_MW:
            lo, hi = idx[(e, d, 0.0)], idx[(e, d, 0.5)]
            if lo.status != OPTIMAL or hi.status != OPTIMAL or hi.paf < lo.paf - 1e-9:
                bad.append((e, d, lo.paf, hi.paf))
    return record("6a PAF(r=0.5) >= PAF(r=0)", not bad,
                  f"{33 - len(bad)}/33 matched pairs hold" + (f"; violations {bad}" if bad else ""))


def check_6b_full_availability() -> bool:
    idx = _index(reduced_sweep()[0])
    cells = {(e, d): idx[(e, d, 0.5)].paf for e in (600.0, 800.0) for d in (5.0, 10.0, 20.0)}
    bad = {k: v for k, v in cells.items() if v != 1.0}
    detail = ", ".join(f"{e:g}/{d:g}: {v:.4f}" for (e, d), v in cells.items())
    return record("6b PAF == 1 at r=0.5, 600/800 MWh, <= 20 MW", not bad, detail)


def check_6c_baseline_brackets() -> bool:
    idx = _index(reduced_sweep()[0])
    at5 = {e: idx[(e, 5.0, 0.0)].paf for e in PAPER_STORAGE_SIZES_MWH}
    at100 = {e: idx[(e, 100.0, 0.0)].paf for e in PAPER_STORAGE_SIZES_MWH}
    ok5 = all(0.90 <= v < 1.0 for v in at5.values())
    ok100 = all(0.45 <= v <= 0.75 for v in at100.values())
    detail = (f"5 MW in [0.90, 1.00): {ok5} ({', '.join(f'{e:g}: {v:.3f}' for e, v in at5.items())}); "
              f"100 MW in [0.45, 0.75]: {ok100} ({', '.join(f'{e:g}: {v:.3f}' for e, v in at100.items())})")
    return record("6c baseline PAF brackets", ok5 and ok100, detail)


def check_6d_cost_monotone() -> bool:
    outcomes, seconds = reduced_sweep()
    idx = _index(outcomes)
    bad = [(e, d) for e in PAPER_STORAGE_SIZES_MWH for d in PAPER_DISCHARGE_MW
           if not idx[(e, d, 0.5)].total_cost >= idx[(e, d, 0.0)].total_cost * (1 - 1e-6)]
    ok = not bad and seconds < 600
    return record("6d cost(r=0.5) >= cost(r=0)", ok,
                  f"{33 - len(bad)}/33 pairs hold; 66-scenario reduced sweep {seconds:.1f} s on 1 worker (budget 600 s)")


def check_7_frontier() -> bool:
    start = time.perf_counter()
    system = reduced_system()
    r_star = float(reference_manifest()["r_star"])
    above = sorted({round(r_star + 0.005, 4), 0.6, 0.75, 0.9})
    probes = [ScenarioConfig(e, d) for e in PAPER_STORAGE_SIZES_MWH for d in PAPER_DISCHARGE_MW]
    beyond = run_sweep(system, probes, RunnerOptions(co2_sweep=tuple(above)))
    feasible_beyond = [(o.scenario.storage_energy_mwh, o.scenario.discharge_capacity_mw, o.scenario.co2_reduction_fraction)
                       for o in beyond if o.status != INFEASIBLE]
    fractions = (0.0, 0.1, 0.2, 0.3, 0.4, 0.5)
    sweep = run_sweep(system, [ScenarioConfig(600.0, 20.0)], RunnerOptions(co2_sweep=fractions))
    pafs = [o.paf for o in sweep]
    monotone = all(o.status == OPTIMAL for o in sweep) and all(b >= a - 1e-9 for a, b in zip(pafs, pafs[1:]))
    peak = fractions[int(np.argmax(pafs))] if monotone else None
    dt = time.perf_counter() - start
    ok = not feasible_beyond and monotone and dt < 180
    return record(
        "7 infeasibility frontier", ok,
        f"r* = {r_star:g} (manifest); {len(beyond) - len(feasible_beyond)}/{len(beyond)} scenarios with r in "
        f"{above} infeasible; PAF(600 MWh, 20 MW) over r=0..0.5: {', '.join(f'{p:.4f}' for p in pafs)} "
        f"(monotone {monotone}, peak at r={peak}); {dt:.1f} s (budget 180 s)",
    )


def check_8_capacity_factor() -> bool:
    start = time.perf_counter()
    pv = reference_dataset().hybrid.pv
    cf = capacity_factor(pv.available(), pv.capacity_mw)
    dt = time.perf_counter() - start
    return record("8 PV capacity factor", abs(cf - 0.24) <= 0.002 and dt < 1.0, f"{cf:.5f} (target 0.24 +- 0.002)")


def check_9_determinism() -> bool:
    one, _ = reduced_sweep(1)
    four, seconds = reduced_sweep(4)
    with tempfile.TemporaryDirectory() as tmp:
        a, _ = write_summary(one, Path(tmp) / "w1.csv")
        b, _ = write_summary(four, Path(tmp) / "w4.csv")
        same = a.read_bytes() == b.read_bytes()
    return record("9 determinism", same, f"workers 1 vs 4 summary CSVs bitwise identical: {same} (4-worker sweep {seconds:.1f} s)")


def check_10_full_year() -> bool:
    system = reference_dataset()
    sc = ScenarioConfig(600.0, 20.0, 0.0)
    start = time.perf_counter()
    res = run_dispatch(system, sc)
    dt = time.perf_counter() - start
    ok = res.status == OPTIMAL and dt < 900
    if res.status == OPTIMAL:
        r = residuals(res, sc.apply(system))
        ok = ok and r["balance"] < 1e-5 and r["soc_recursion"] < 1e-6 and max(
            r["soc_bounds"], r["charge_bounds"], r["discharge_bounds"]) <= 1e-7 and r["simultaneous"] <= 1e-4
        detail = (f"{res.hours} h {res.status} in {dt:.1f} s (budget 900 s); balance {r['balance']:.1e} MW, "
                  f"SOC {r['soc_recursion']:.1e} MWh, charge*discharge {r['simultaneous']:.1e}")
    else:
        detail = f"status {res.status} after {dt:.1f} s"
    return record("10 full-year smoke", ok, detail)


CHECKS = [
    check_1_metric_identities,
    check_2_lp_oracle,
    check_3_toy_brute_force,
    check_4_conservation,
    check_5_shaper_monotonicity,
    check_6a_cap_raises_paf,
    check_6b_full_availability,
    check_6c_baseline_brackets,
    check_6d_cost_monotone,
    check_7_frontier,
    check_8_capacity_factor,
    check_9_determinism,
    check_10_full_year,
]


@pytest.mark.parametrize("check", CHECKS, ids=lambda f: f.__name__.removeprefix("check_"))
def test_criterion(check):
    assert check()


if __name__ == "__main__":
    passed = sum(bool(c()) for c in CHECKS)
    print(f"{passed}/{len(CHECKS)} checks passed")
    sys.exit(0 if passed == len(CHECKS) else 1)
