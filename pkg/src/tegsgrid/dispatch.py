"""Hourly cost-minimizing dispatch of the zone plus the PV + storage plant.

Decision variables per hour: thermal output per unit, VRE output per
resource, hybrid PV output, storage charge/discharge (grid side), state of
charge at the end of the hour and non-served energy. Rows: demand balance,
state-of-charge recursion, tie-line limits and (with a CO2 reduction target)
one emissions cap over the whole horizon.
"""

from __future__ import annotations

import math
import threading
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .lp import (
    INFEASIBLE,
    ITERATION_LIMIT,
    OPTIMAL,
    LinearProgram,
    SolveOptions,
    solve,
)
from .model import HOURS_PER_YEAR, PowerSystem, ScenarioConfig, fingerprint

INCONCLUSIVE = "Inconclusive"


class FormulationError(ValueError):
    pass


class BaselineUnavailable(RuntimeError):
    def __init__(self, status: str):
        super().__init__(f"uncapped baseline run ended with status {status}")
        self.status = status


@dataclass(frozen=True)
class DispatchOptions:
    """``firm_delivery`` adds ``pv + discharge >= derated power`` in every hour.
    ``rolling_window`` (hours) solves consecutive windows with ``rolling_overlap``
    hours of look-ahead instead of one perfect-foresight program."""

    solve: SolveOptions = field(default_factory=SolveOptions)
    firm_delivery: bool = False
    rolling_window: int | None = None
    rolling_overlap: int = 0


def _safe(name: str) -> str:
    return "_".join(name.split())


@dataclass
class DispatchModel:
    lp: LinearProgram
    hours: int
    thermal: np.ndarray          # (n_thermal, T) column indices
    vre: np.ndarray              # (n_vre, T)
    pv: np.ndarray
    charge: np.ndarray
    discharge: np.ndarray
    soc: np.ndarray
    nse: np.ndarray
    new_build: dict[str, int]
    balance_rows: np.ndarray
    soc_rows: np.ndarray
    emissions_row: int | None
    emissions_cap: float | None


def build_model(
    system: PowerSystem,
    scenario: ScenarioConfig,
    baseline_emissions: float | None = None,
    options: DispatchOptions | None = None,
    emissions_cap: float | None = None,
) -> DispatchModel:
    options = options or DispatchOptions()
    r = scenario.co2_reduction_fraction
    if emissions_cap is None and r > 0:
        if baseline_emissions is None:
            raise FormulationError("a CO2 reduction target needs baseline_emissions")
        emissions_cap = (1.0 - r) * float(baseline_emissions)
    sysx = scenario.apply(system)
    T = sysx.horizon_hours
    hours = np.arange(T)
    demand = sysx.demand.values
    st = sysx.hybrid.storage
    hy = sysx.hybrid
    expand = scenario.expansion_enabled
    year_share = T / HOURS_PER_YEAR

    lp = LinearProgram()

    def names(prefix):
        return [f"{prefix}_{t}" for t in hours]

    new_build: dict[str, int] = {}
    thermal = []
    for g in sysx.thermal_fleet:
        floor = g.must_run_fraction * g.capacity_mw
        grows = expand and g.new_build_allowed
        upper = math.inf if grows else g.capacity_mw
        thermal.append(lp.add_vars(floor, upper, g.variable_cost, names(f"gen_{_safe(g.name)}")))
        if grows:
            new_build[g.name] = lp.add_var(0.0, math.inf, g.annualized_capex * year_share, f"build_{_safe(g.name)}")
    vre = []
    for v in sysx.vre_fleet:
        grows = expand and v.new_build_allowed
        upper = np.full(T, math.inf) if grows else v.available()
        vre.append(lp.add_vars(0.0, upper, v.variable_cost, names(f"vre_{_safe(v.name)}")))
        if grows:
            new_build[v.name] = lp.add_var(0.0, math.inf, v.annualized_capex * year_share, f"build_{_safe(v.name)}")
    pv = lp.add_vars(0.0, hy.pv.available(), hy.pv.variable_cost, names("pv"))
    charge = lp.add_vars(0.0, st.charge_capacity_mw, st.charge_cost, names("charge"))
    discharge = lp.add_vars(0.0, st.discharge_capacity_mw, st.discharge_cost, names("discharge"))
    soc = lp.add_vars(0.0, st.energy_capacity_mwh, 0.0, names("soc"))
    nse = lp.add_vars(0.0, demand, sysx.voll, names("nse"))

    thermal = np.array(thermal, dtype=np.int64).reshape(len(sysx.thermal_fleet), T)
    vre = np.array(vre, dtype=np.int64).reshape(len(sysx.vre_fleet), T)

    # capacity links for expandable resources
    for i, g in enumerate(sysx.thermal_fleet):
        if g.name in new_build:
            b = new_build[g.name]
            lp.add_constraints(
                "<=", np.full(T, g.capacity_mw),
                np.concatenate([hours, hours]), np.concatenate([thermal[i], np.full(T, b)]),
                np.concatenate([np.ones(T), np.full(T, -1.0)]),
                names(f"cap_{_safe(g.name)}"),
            )
    for i, v in enumerate(sysx.vre_fleet):
        if v.name in new_build:
            b = new_build[v.name]
            cf = v.cf_profile.values
            lp.add_constraints(
                "<=", v.capacity_mw * cf,
                np.concatenate([hours, hours]), np.concatenate([vre[i], np.full(T, b)]),
                np.concatenate([np.ones(T), -cf]),
                names(f"cap_{_safe(v.name)}"),
            )

    # demand balance
    blocks = [thermal.ravel(), vre.ravel(), pv, discharge, charge, nse]
    coefs = [np.ones(thermal.size), np.ones(vre.size), np.ones(T), np.ones(T), -np.ones(T), np.ones(T)]
    rows = [np.tile(hours, len(sysx.thermal_fleet)), np.tile(hours, len(sysx.vre_fleet))] + [hours] * 4
    balance_rows = lp.add_constraints(
        "=", demand, np.concatenate(rows), np.concatenate(blocks), np.concatenate(coefs), names("balance")
    )

    # state of charge: soc[t] - soc[t-1] - eta_c * charge[t] + discharge[t] / eta_d = 0
    r_idx = [hours, hours, hours]
    c_idx = [soc, charge, discharge]
    vals = [np.ones(T), np.full(T, -st.charge_efficiency), np.full(T, 1.0 / st.discharge_efficiency)]
    soc_rhs = np.zeros(T)
    if st.cyclic:
        r_idx.append(hours)
        c_idx.append(np.roll(soc, 1))
        vals.append(-np.ones(T))
    else:
        if T > 1:
            r_idx.append(hours[1:])
            c_idx.append(soc[:-1])
            vals.append(-np.ones(T - 1))
        soc_rhs[0] = st.initial_soc_mwh
    soc_rows = lp.add_constraints(
        "=", soc_rhs, np.concatenate(r_idx), np.concatenate(c_idx), np.concatenate(vals), names("soc_balance")
    )

    # tie line, both directions: |pv + discharge - charge| <= limit
    tie = hy.tie_line_limit_mw
    lp.add_constraints(
        "<=", np.full(T, tie),
        np.concatenate([hours] * 3), np.concatenate([pv, discharge, charge]),
        np.concatenate([np.ones(T), np.ones(T), -np.ones(T)]), names("tie_export"),
    )
    lp.add_constraints(
        ">=", np.full(T, -tie),
        np.concatenate([hours] * 3), np.concatenate([pv, discharge, charge]),
        np.concatenate([np.ones(T), np.ones(T), -np.ones(T)]), names("tie_import"),
    )
    if not hy.grid_charging_allowed:
        lp.add_constraints(
            "<=", np.zeros(T), np.concatenate([hours, hours]), np.concatenate([charge, pv]),
            np.concatenate([np.ones(T), -np.ones(T)]), names("pv_only_charge"),
        )
    if options.firm_delivery and scenario.derated_power_mw > 0:
        lp.add_constraints(
            ">=", np.full(T, scenario.derated_power_mw), np.concatenate([hours, hours]),
            np.concatenate([pv, discharge]), np.ones(2 * T), names("firm_delivery"),
        )

    emissions_row = None
    if emissions_cap is not None:
        rates = np.array([g.emission_rate for g in sysx.thermal_fleet])
        terms = [(int(c), float(rt)) for i, rt in enumerate(rates) if rt != 0 for c in thermal[i]]
        emissions_row = lp.add_constraint("<=", float(emissions_cap), terms, name="co2_cap")

    return DispatchModel(
        lp=lp, hours=T, thermal=thermal, vre=vre, pv=pv, charge=charge, discharge=discharge,
        soc=soc, nse=nse, new_build=new_build, balance_rows=balance_rows, soc_rows=soc_rows,
        emissions_row=emissions_row, emissions_cap=emissions_cap,
    )


def formulate(
    system: PowerSystem,
    scenario: ScenarioConfig,
    baseline_emissions: float | None = None,
    options: DispatchOptions | None = None,
) -> LinearProgram:
    """The dispatch linear program for ``system`` under ``scenario``."""
    return build_model(system, scenario, baseline_emissions, options).lp


@dataclass
class DispatchResult:
    status: str
    hours: int
    demand: np.ndarray
    thermal_gen: dict[str, np.ndarray] = field(default_factory=dict)
    vre_output: dict[str, np.ndarray] = field(default_factory=dict)
    vre_curtailment: dict[str, np.ndarray] = field(default_factory=dict)
    pv_gen: np.ndarray | None = None
    pv_curtailment: np.ndarray | None = None
    charge: np.ndarray | None = None
    discharge: np.ndarray | None = None
    soc: np.ndarray | None = None
    non_served: np.ndarray | None = None
    total_cost: float = math.nan
    total_emissions: float = math.nan
    new_build: dict[str, float] | None = None
    prices: np.ndarray | None = None
    co2_price: float | None = None
    emissions_cap: float | None = None
    solve_seconds: float = 0.0
    message: str = ""

    @property
    def is_optimal(self) -> bool:
        return self.status == OPTIMAL

    def delivered(self) -> np.ndarray:
        """PV output plus storage discharge, the quantity tested against the derated power."""
        return self.pv_gen + self.discharge


def _extract(model: DispatchModel, system: PowerSystem, sol, seconds: float) -> DispatchResult:
    x = sol.primal
    T = model.hours
    res = DispatchResult(status=OPTIMAL, hours=T, demand=system.demand.values.copy(), solve_seconds=seconds)
    emissions = 0.0
    for i, g in enumerate(system.thermal_fleet):
        gen = x[model.thermal[i]]
        res.thermal_gen[g.name] = gen
        emissions += g.emission_rate * float(gen.sum())
    for i, v in enumerate(system.vre_fleet):
        out = x[model.vre[i]]
        res.vre_output[v.name] = out
        avail = v.available()
        if v.name in model.new_build:
            avail = avail + v.cf_profile.values * x[model.new_build[v.name]]
        res.vre_curtailment[v.name] = np.maximum(avail - out, 0.0)
    res.pv_gen = x[model.pv]
    res.pv_curtailment = np.maximum(system.hybrid.pv.available() - res.pv_gen, 0.0)
    res.charge = x[model.charge]
    res.discharge = x[model.discharge]
    res.soc = x[model.soc]
    res.non_served = x[model.nse]
    res.total_cost = float(sol.objective_value)
    res.total_emissions = emissions
    res.new_build = {k: float(x[c]) for k, c in model.new_build.items()} or None
    if sol.duals is not None:
        res.prices = sol.duals[model.balance_rows].copy()
        if model.emissions_row is not None:
            res.co2_price = float(-sol.duals[model.emissions_row])
    res.emissions_cap = model.emissions_cap
    return res


def run_dispatch(
    system: PowerSystem,
    scenario: ScenarioConfig,
    baseline_emissions: float | None = None,
    options: DispatchOptions | None = None,
) -> DispatchResult:
    """Solve the dispatch program. Infeasible and inconclusive solves come back
    as results with that status and no series, never as exceptions."""
    options = options or DispatchOptions()
    if options.rolling_window:
        return _run_rolling(system, scenario, baseline_emissions, options)
    model = build_model(system, scenario, baseline_emissions, options)
    start = time.perf_counter()
    sol = solve(model.lp, options.solve)
    seconds = time.perf_counter() - start
    sysx = scenario.apply(system)
    if sol.status == OPTIMAL:
        return _extract(model, sysx, sol, seconds)
    status = INFEASIBLE if sol.status == INFEASIBLE else INCONCLUSIVE
    return DispatchResult(
        status=status, hours=sysx.horizon_hours, demand=sysx.demand.values.copy(),
        emissions_cap=model.emissions_cap, solve_seconds=seconds, message=f"solver status {sol.status}: {sol.message}",
    )


def _run_rolling(system, scenario, baseline_emissions, options) -> DispatchResult:
    if scenario.expansion_enabled:
        raise FormulationError("rolling-horizon mode does not support capacity expansion")
    window, overlap = options.rolling_window, options.rolling_overlap
    sysx = scenario.apply(system)
    T = sysx.horizon_hours
    demand = sysx.demand.values
    cap = None
    if scenario.co2_reduction_fraction > 0:
        if baseline_emissions is None:
            raise FormulationError("a CO2 reduction target needs baseline_emissions")
        cap = (1.0 - scenario.co2_reduction_fraction) * baseline_emissions
    total_demand = float(demand.sum()) or 1.0
    inner = replace(options, rolling_window=None)
    pieces: list[DispatchResult] = []
    soc0 = sysx.hybrid.storage.initial_soc_mwh
    seconds = 0.0
    for start in range(0, T, window):
        stop = min(start + window + overlap, T)
        keep = min(window, T - start)
        sub = sysx.take_hours(range(start, stop)).with_storage(initial_soc_mwh=soc0, cyclic=False)
        # the cap is shared pro rata to demand; only the kept hours count
        sub_cap = None if cap is None else cap * float(demand[start:stop].sum()) / total_demand
        model = build_model(sub, replace(scenario, co2_reduction_fraction=0.0), None, inner, emissions_cap=sub_cap)
        t0 = time.perf_counter()
        sol = solve(model.lp, inner.solve)
        seconds += time.perf_counter() - t0
        if sol.status != OPTIMAL:
            status = INFEASIBLE if sol.status == INFEASIBLE else INCONCLUSIVE
            return DispatchResult(status=status, hours=T, demand=demand.copy(), emissions_cap=cap,
                                  solve_seconds=seconds, message=f"window at hour {start}: {sol.status}")
        part = _extract(model, sub, sol, 0.0)
        pieces.append(_truncate(part, keep, sub))
        soc0 = float(part.soc[keep - 1])
    return _concat(pieces, sysx, cap, seconds)


def _truncate(res: DispatchResult, keep: int, system: PowerSystem) -> DispatchResult:
    cut = lambda a: a[:keep].copy()  # noqa: E731
    out = replace(
        res, hours=keep, demand=cut(res.demand),
        thermal_gen={k: cut(v) for k, v in res.thermal_gen.items()},
        vre_output={k: cut(v) for k, v in res.vre_output.items()},
        vre_curtailment={k: cut(v) for k, v in res.vre_curtailment.items()},
        pv_gen=cut(res.pv_gen), pv_curtailment=cut(res.pv_curtailment), charge=cut(res.charge),
        discharge=cut(res.discharge), soc=cut(res.soc), non_served=cut(res.non_served),
        prices=None if res.prices is None else cut(res.prices),
    )
    out.total_emissions = sum(g.emission_rate * float(out.thermal_gen[g.name].sum()) for g in system.thermal_fleet)
    out.total_cost = _operating_cost(out, system)
    return out


def _operating_cost(res: DispatchResult, system: PowerSystem) -> float:
    st = system.hybrid.storage
    cost = sum(g.variable_cost * float(res.thermal_gen[g.name].sum()) for g in system.thermal_fleet)
    cost += sum(v.variable_cost * float(res.vre_output[v.name].sum()) for v in system.vre_fleet)
    cost += system.hybrid.pv.variable_cost * float(res.pv_gen.sum())
    cost += st.charge_cost * float(res.charge.sum()) + st.discharge_cost * float(res.discharge.sum())
    cost += system.voll * float(res.non_served.sum())
    return cost


def _concat(pieces, system, cap, seconds) -> DispatchResult:
    cat = lambda attr: np.concatenate([getattr(p, attr) for p in pieces])  # noqa: E731
    catd = lambda attr: {k: np.concatenate([getattr(p, attr)[k] for p in pieces]) for k in getattr(pieces[0], attr)}  # noqa: E731
    return DispatchResult(
        status=OPTIMAL, hours=system.horizon_hours, demand=system.demand.values.copy(),
        thermal_gen=catd("thermal_gen"), vre_output=catd("vre_output"), vre_curtailment=catd("vre_curtailment"),
        pv_gen=cat("pv_gen"), pv_curtailment=cat("pv_curtailment"), charge=cat("charge"),
        discharge=cat("discharge"), soc=cat("soc"), non_served=cat("non_served"),
        total_cost=sum(p.total_cost for p in pieces), total_emissions=sum(p.total_emissions for p in pieces),
        prices=None, emissions_cap=cap, solve_seconds=seconds,
    )


# --------------------------------------------------------------------------
# baseline emissions


_BASELINE_MEMO: dict[str, float] = {}
_BASELINE_LOCK = threading.Lock()


def compute_baseline_emissions(
    system: PowerSystem,
    scenario: ScenarioConfig | None = None,
    options: DispatchOptions | None = None,
) -> float:
    """Total emissions of the uncapped (r = 0) dispatch, memoized by content hash.

    Without ``scenario`` the system's own storage configuration is used.
    """
    options = options or DispatchOptions()
    if scenario is None:
        st = system.hybrid.storage
        scenario = ScenarioConfig(st.energy_capacity_mwh, st.discharge_capacity_mw, 0.0)
    base = replace(scenario, co2_reduction_fraction=0.0, derated_power_mw=0.0)
    key = fingerprint(system, base.storage_key, options.rolling_window, options.rolling_overlap, options.solve)
    with _BASELINE_LOCK:
        if key in _BASELINE_MEMO:
            return _BASELINE_MEMO[key]
    res = run_dispatch(system, base, None, options)
    if not res.is_optimal:
        raise BaselineUnavailable(res.status)
    with _BASELINE_LOCK:
        _BASELINE_MEMO[key] = res.total_emissions
    return res.total_emissions


def remember_baseline(system: PowerSystem, scenario: ScenarioConfig, options: DispatchOptions, emissions: float):
    base = replace(scenario, co2_reduction_fraction=0.0, derated_power_mw=0.0)
    key = fingerprint(system, base.storage_key, options.rolling_window, options.rolling_overlap, options.solve)
    with _BASELINE_LOCK:
        _BASELINE_MEMO[key] = emissions


def clear_baseline_memo():
    with _BASELINE_LOCK:
        _BASELINE_MEMO.clear()


# --------------------------------------------------------------------------
# invariant checks


def residuals(result: DispatchResult, system: PowerSystem) -> dict[str, float]:
    """Worst-case violations of the balance, state-of-charge and bound invariants.

    ``system`` must already carry the scenario's storage configuration.
    """
    st = system.hybrid.storage
    supply = sum(result.thermal_gen.values(), np.zeros(result.hours))
    supply = supply + sum(result.vre_output.values(), np.zeros(result.hours))
    supply = supply + result.pv_gen + result.discharge - result.charge + result.non_served
    balance = float(np.max(np.abs(supply - result.demand), initial=0.0))
    soc = result.soc
    if st.cyclic:
        prev = np.roll(soc, 1)
    else:
        prev = np.concatenate([[st.initial_soc_mwh], soc[:-1]])
    expected = prev + st.charge_efficiency * result.charge - result.discharge / st.discharge_efficiency
    soc_res = float(np.max(np.abs(soc - expected), initial=0.0))
    soc_bound = float(max(np.max(-soc, initial=0.0), np.max(soc - st.energy_capacity_mwh, initial=0.0)))
    ch_bound = float(max(np.max(result.charge - st.charge_capacity_mw, initial=0.0), np.max(-result.charge, initial=0.0)))
    dis_bound = float(
        max(np.max(result.discharge - st.discharge_capacity_mw, initial=0.0), np.max(-result.discharge, initial=0.0))
    )
    simultaneous = float(np.max(result.charge * result.discharge, initial=0.0))
    return {
        "balance": balance,
        "soc_recursion": soc_res,
        "soc_bounds": soc_bound,
        "charge_bounds": ch_bound,
        "discharge_bounds": dis_bound,
        "simultaneous": simultaneous,
    }


__all__ = [
    "DispatchOptions",
    "DispatchModel",
    "DispatchResult",
    "FormulationError",
    "BaselineUnavailable",
    "INCONCLUSIVE",
    "ITERATION_LIMIT",
    "build_model",
    "formulate",
    "run_dispatch",
    "compute_baseline_emissions",
    "remember_baseline",
    "clear_baseline_memo",
    "residuals",
]
