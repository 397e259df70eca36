"""Scenario sweeps: baselines first, then capped runs, in a process pool.

Scenarios that share a storage configuration and CO2 target share one
dispatch; the derated power only changes how the result is scored. Results
come back in input order whatever the completion order.
"""

from __future__ import annotations

import math
import os
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

from .dispatch import INCONCLUSIVE, DispatchOptions, remember_baseline, residuals, run_dispatch
from .lp import INFEASIBLE, OPTIMAL
from .metrics import AvailabilityReport, availability_of
from .model import PowerSystem, ScenarioConfig


@dataclass(frozen=True)
class RunnerOptions:
    """``co2_sweep`` replaces each scenario's reduction target by every listed
    value. ``global_baseline`` caps every scenario against the uncapped run of
    the system's own storage configuration instead of its own uncapped twin."""

    workers: int = 1
    persist_traces: Path | None = None
    co2_sweep: tuple[float, ...] | None = None
    global_baseline: bool = False
    dispatch: DispatchOptions = field(default_factory=DispatchOptions)


@dataclass(frozen=True)
class ScenarioOutcome:
    scenario: ScenarioConfig
    status: str
    availability: AvailabilityReport | None = None
    total_cost: float = math.nan
    total_emissions: float = math.nan
    solve_wall_time: float = 0.0
    traces_path: Path | None = None
    baseline_emissions: float | None = None
    message: str = ""
    # worst-case balance / state-of-charge / bound violations of the dispatch
    residuals: dict | None = None

    @property
    def paf(self) -> float | None:
        return None if self.availability is None else self.availability.paf


def trace_filename(scenario: ScenarioConfig) -> str:
    return (
        f"trace_{scenario.storage_energy_mwh:g}mwh_{scenario.discharge_capacity_mw:g}mw"
        f"_d{scenario.derated_power_mw:g}_r{scenario.co2_reduction_fraction:g}.csv"
    )


# one dispatch per (storage, target) group; worker state is the immutable system
_WORKER_SYSTEM: PowerSystem | None = None


def _init_worker(system: PowerSystem):
    global _WORKER_SYSTEM
    _WORKER_SYSTEM = system


@dataclass(frozen=True)
class _Job:
    scenario: ScenarioConfig        # representative: derated power irrelevant to the dispatch
    baseline: float | None
    dispatch: DispatchOptions
    score: tuple[ScenarioConfig, ...]
    trace_dir: str | None


@dataclass(frozen=True)
class _JobResult:
    status: str
    total_cost: float
    total_emissions: float
    seconds: float
    reports: tuple
    traces: tuple
    message: str
    residuals: dict | None = None


def _execute(job: _Job, system: PowerSystem | None = None) -> _JobResult:
    system = system if system is not None else _WORKER_SYSTEM
    try:
        res = run_dispatch(system, job.scenario, job.baseline, job.dispatch)
    except Exception as exc:  # contained: reported as inconclusive
        return _JobResult(INCONCLUSIVE, math.nan, math.nan, 0.0, (), (),
                          f"{type(exc).__name__}: {exc}\n{traceback.format_exc(limit=3)}")
    if not res.is_optimal:
        return _JobResult(res.status, math.nan, math.nan, res.solve_seconds, (), (), res.message)
    reports, traces = [], []
    for sc in job.score:
        rep = availability_of(res, sc.derated_power_mw)
        reports.append(rep)
        path = None
        if job.trace_dir is not None:
            from .report import trace_from_result, write_trace

            path = Path(job.trace_dir) / trace_filename(sc)
            write_trace(trace_from_result(res, sc.derated_power_mw), path)
        traces.append(path)
    return _JobResult(OPTIMAL, res.total_cost, res.total_emissions, res.solve_seconds,
                      tuple(reports), tuple(traces), res.message, residuals(res, job.scenario.apply(system)))


def _run_jobs(system: PowerSystem, jobs: list[_Job], workers: int) -> list[_JobResult]:
    if not jobs:
        return []
    if workers <= 1 or len(jobs) == 1:
        return [_execute(j, system) for j in jobs]
    try:
        with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker, initargs=(system,)) as pool:
            futures = [pool.submit(_execute, j) for j in jobs]
            out = []
            for fut in futures:
                try:
                    out.append(fut.result())
                except Exception as exc:  # a dead worker process
                    out.append(_JobResult(INCONCLUSIVE, math.nan, math.nan, 0.0, (), (), f"worker failure: {exc!r}"))
            return out
    except (OSError, RuntimeError) as exc:
        raise RuntimeError(f"could not start worker pool: {exc}") from exc


def expand_co2_sweep(scenarios, fractions) -> list[ScenarioConfig]:
    if fractions is None:
        return list(scenarios)
    return [replace(sc, co2_reduction_fraction=float(r)) for sc in scenarios for r in fractions]


def _group_key(sc: ScenarioConfig):
    return (sc.storage_key, sc.co2_reduction_fraction)


def run_sweep(system: PowerSystem, scenarios, options: RunnerOptions | None = None) -> list[ScenarioOutcome]:
    options = options or RunnerOptions()
    scenarios = expand_co2_sweep(scenarios, options.co2_sweep)
    if not scenarios:
        return []
    trace_dir = None
    if options.persist_traces is not None:
        Path(options.persist_traces).mkdir(parents=True, exist_ok=True)
        trace_dir = str(options.persist_traces)

    # group scenarios that need the very same dispatch, preserving first-seen order
    groups: dict = {}
    for sc in scenarios:
        groups.setdefault(_group_key(sc), []).append(sc)
    scored: dict = {}

    def job_for(key, baseline):
        members = groups.get(key)
        if members is None:
            # baseline needed but not requested: solve it without scoring anything
            (e, d, x), _ = key
            rep = ScenarioConfig(e, d, 0.0, 0.0, x)
            return _Job(rep, None, options.dispatch, (), None)
        uniq = tuple(dict.fromkeys(members))
        return _Job(uniq[0], baseline, options.dispatch, uniq, trace_dir)

    # phase 1: uncapped runs (every baseline a capped group depends on)
    if options.global_baseline:
        st = system.hybrid.storage
        global_key = ((st.energy_capacity_mwh, st.discharge_capacity_mw, False), 0.0)
        base_keys = [k for k in groups if k[1] == 0.0]
        if global_key not in groups:
            base_keys.append(global_key)
    else:
        base_keys = list(dict.fromkeys((k[0], 0.0) for k in groups))
    base_results = dict(zip(base_keys, _run_jobs(system, [job_for(k, None) for k in base_keys], options.workers)))
    for k, r in base_results.items():
        scored[k] = (r, None)

    def baseline_for(storage_key):
        key = global_key if options.global_baseline else (storage_key, 0.0)
        res = base_results[key]
        return (res.total_emissions if res.status == OPTIMAL else None), res.status

    for k, r in base_results.items():
        if r.status == OPTIMAL:
            (e, d, x), _ = k
            remember_baseline(system, ScenarioConfig(e, d, 0.0, 0.0, x), options.dispatch, r.total_emissions)

    # phase 2: capped runs
    capped_keys = [k for k in groups if k[1] > 0.0]
    runnable, blocked = [], {}
    for k in capped_keys:
        base, status = baseline_for(k[0])
        if base is None:
            blocked[k] = status
        else:
            runnable.append((k, base))
    results = _run_jobs(system, [job_for(k, b) for k, b in runnable], options.workers)
    for (k, b), r in zip(runnable, results):
        scored[k] = (r, b)
    for k, status in blocked.items():
        scored[k] = (_JobResult(INCONCLUSIVE, math.nan, math.nan, 0.0, (), (),
                                f"uncapped baseline ended with status {status}"), None)

    outcomes = []
    for sc in scenarios:
        key = _group_key(sc)
        res, base = scored[key]
        if key[1] == 0.0:
            base = baseline_for(key[0])[0]
        if res.status == OPTIMAL:
            i = tuple(dict.fromkeys(groups[key])).index(sc)
            outcomes.append(ScenarioOutcome(
                scenario=sc, status=OPTIMAL, availability=res.reports[i], total_cost=res.total_cost,
                total_emissions=res.total_emissions, solve_wall_time=res.seconds, traces_path=res.traces[i],
                baseline_emissions=base, message=res.message, residuals=res.residuals,
            ))
        else:
            status = INFEASIBLE if res.status == INFEASIBLE else INCONCLUSIVE
            outcomes.append(ScenarioOutcome(
                scenario=sc, status=status, solve_wall_time=res.seconds, baseline_emissions=base, message=res.message,
            ))
    return outcomes


def default_workers() -> int:
    return max(1, min(4, os.cpu_count() or 1))


__all__ = ["RunnerOptions", "ScenarioOutcome", "run_sweep", "expand_co2_sweep", "trace_filename", "default_workers"]
