"""Domain types for a single-zone grid coupled to a PV + thermal storage plant.

Units: power in MW, energy in MWh, costs in $, emissions in tCO2. One time
step is one hour, so MW and MWh per step are numerically interchangeable.
"""

from __future__ import annotations

import hashlib
import itertools
import math
from dataclasses import dataclass, fields, is_dataclass, replace
from typing import Iterable, Sequence

import numpy as np

HOURS_PER_YEAR = 8760
HOURS_PER_WEEK = 168


def _frozen_array(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != 1:
        raise ValueError("hourly series must be one-dimensional")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class HourlySeries:
    """One value per hour. ``horizon_hours`` defaults to the length of ``values``."""

    values: np.ndarray
    horizon_hours: int = -1
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen_array(self.values))
        if self.horizon_hours == -1:
            object.__setattr__(self, "horizon_hours", len(self.values))

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, idx):
        return self.values[idx]

    def __eq__(self, other) -> bool:
        if not isinstance(other, HourlySeries):
            return NotImplemented
        return (
            self.horizon_hours == other.horizon_hours
            and self.label == other.label
            and np.array_equal(self.values, other.values)
        )

    def __hash__(self):
        return hash((self.horizon_hours, self.label, self.values.tobytes()))

    def scaled(self, factor: float) -> "HourlySeries":
        return HourlySeries(self.values * factor, label=self.label)

    def take(self, hours: Sequence[int]) -> "HourlySeries":
        idx = np.asarray(hours, dtype=int)
        return HourlySeries(self.values[idx], label=self.label)


@dataclass(frozen=True)
class ThermalGenerator:
    """Dispatchable unit. ``must_run_fraction`` is a continuous output floor
    (share of existing capacity that cannot be turned down)."""

    name: str
    capacity_mw: float
    variable_cost: float
    emission_rate: float = 0.0
    new_build_allowed: bool = False
    annualized_capex: float = 0.0
    must_run_fraction: float = 0.0


@dataclass(frozen=True)
class VreResource:
    name: str
    capacity_mw: float
    cf_profile: HourlySeries
    variable_cost: float = 0.0
    new_build_allowed: bool = False
    annualized_capex: float = 0.0

    def available(self) -> np.ndarray:
        return self.capacity_mw * self.cf_profile.values


@dataclass(frozen=True)
class StorageSpec:
    """Energy store with decoupled charge and discharge power ratings.

    ``charge`` and ``discharge`` are measured on the grid side; the stored
    energy moves by ``charge_efficiency * charge - discharge / discharge_efficiency``.
    With ``cyclic`` set, the state of charge before the first hour equals the
    state at the end of the horizon instead of ``initial_soc_mwh``.
    """

    energy_capacity_mwh: float
    charge_capacity_mw: float
    discharge_capacity_mw: float
    charge_efficiency: float = 1.0
    discharge_efficiency: float = 0.5
    initial_soc_mwh: float = 0.0
    charge_cost: float = 0.0
    discharge_cost: float = 0.0
    cyclic: bool = False

    @property
    def round_trip_efficiency(self) -> float:
        return self.charge_efficiency * self.discharge_efficiency


@dataclass(frozen=True)
class HybridPlant:
    pv: VreResource
    storage: StorageSpec
    tie_line_limit_mw: float | None = None
    grid_charging_allowed: bool = True

    def __post_init__(self):
        if self.tie_line_limit_mw is None:
            object.__setattr__(self, "tie_line_limit_mw", float(self.pv.capacity_mw))


@dataclass(frozen=True)
class PowerSystem:
    thermal_fleet: tuple[ThermalGenerator, ...]
    vre_fleet: tuple[VreResource, ...]
    demand: HourlySeries
    hybrid: HybridPlant
    voll: float = 9000.0
    name: str = "system"

    def __post_init__(self):
        object.__setattr__(self, "thermal_fleet", tuple(self.thermal_fleet))
        object.__setattr__(self, "vre_fleet", tuple(self.vre_fleet))

    @property
    def horizon_hours(self) -> int:
        return self.demand.horizon_hours

    def installed_capacity(self) -> dict[str, float]:
        """Installed MW per resource name, hybrid PV included."""
        caps = {g.name: g.capacity_mw for g in self.thermal_fleet}
        caps.update({v.name: v.capacity_mw for v in self.vre_fleet})
        caps[self.hybrid.pv.name] = self.hybrid.pv.capacity_mw
        return caps

    def with_storage(self, **changes) -> "PowerSystem":
        storage = replace(self.hybrid.storage, **changes)
        if storage.initial_soc_mwh > storage.energy_capacity_mwh:
            storage = replace(storage, initial_soc_mwh=storage.energy_capacity_mwh)
        return replace(self, hybrid=replace(self.hybrid, storage=storage))

    def take_hours(self, hours: Sequence[int]) -> "PowerSystem":
        """Restrict every series to the given hour indices, in order."""
        vre = tuple(replace(v, cf_profile=v.cf_profile.take(hours)) for v in self.vre_fleet)
        pv = replace(self.hybrid.pv, cf_profile=self.hybrid.pv.cf_profile.take(hours))
        return replace(
            self,
            vre_fleet=vre,
            demand=self.demand.take(hours),
            hybrid=replace(self.hybrid, pv=pv),
        )


def sampled_week_hours(n_weeks: int = 13, stride: int = 4, horizon: int = HOURS_PER_YEAR) -> np.ndarray:
    """Hour indices of every ``stride``-th week, ``n_weeks`` weeks in total."""
    starts = [w * stride * HOURS_PER_WEEK for w in range(n_weeks)]
    if starts and starts[-1] + HOURS_PER_WEEK > horizon:
        raise ValueError(f"{n_weeks} weeks at stride {stride} do not fit in {horizon} hours")
    return np.concatenate([np.arange(s, s + HOURS_PER_WEEK) for s in starts]) if starts else np.array([], int)


@dataclass(frozen=True)
class ScenarioConfig:
    storage_energy_mwh: float
    discharge_capacity_mw: float
    co2_reduction_fraction: float = 0.0
    derated_power_mw: float | None = None
    expansion_enabled: bool = False

    def __post_init__(self):
        if self.derated_power_mw is None:
            object.__setattr__(self, "derated_power_mw", float(self.discharge_capacity_mw))
        if not 0.0 <= self.co2_reduction_fraction < 1.0:
            raise ValueError(f"co2_reduction_fraction must lie in [0, 1), got {self.co2_reduction_fraction}")
        if self.storage_energy_mwh < 0 or self.discharge_capacity_mw < 0 or self.derated_power_mw < 0:
            raise ValueError("storage size, discharge capacity and derated power must be non-negative")

    @property
    def storage_key(self) -> tuple[float, float, bool]:
        """Identifies the uncapped twin whose emissions serve as baseline."""
        return (self.storage_energy_mwh, self.discharge_capacity_mw, self.expansion_enabled)

    def apply(self, system: PowerSystem) -> PowerSystem:
        return system.with_storage(
            energy_capacity_mwh=self.storage_energy_mwh,
            discharge_capacity_mw=self.discharge_capacity_mw,
        )


PAPER_STORAGE_SIZES_MWH = (400.0, 600.0, 800.0)
PAPER_DISCHARGE_MW = (5.0, 10.0, 20.0, 30.0, 40.0, 50.0, 60.0, 70.0, 80.0, 90.0, 100.0)
PAPER_CO2_REDUCTIONS = (0.0, 0.5)


def paper_scenario_grid(
    sizes_mwh: Iterable[float] = PAPER_STORAGE_SIZES_MWH,
    discharge_mw: Iterable[float] = PAPER_DISCHARGE_MW,
    co2_reductions: Iterable[float] = PAPER_CO2_REDUCTIONS,
) -> list[ScenarioConfig]:
    """3 storage sizes x 11 discharge ratings x 2 CO2 cases = 66 scenarios."""
    return [
        ScenarioConfig(float(e), float(d), float(r))
        for e, d, r in itertools.product(sizes_mwh, discharge_mw, co2_reductions)
    ]


# --------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Finding:
    code: str
    path: str
    message: str = ""

    def __str__(self):
        return f"{self.code} at {self.path}: {self.message}" if self.message else f"{self.code} at {self.path}"


def _check_nonneg(findings: list, path: str, value: float):
    if not math.isfinite(value):
        findings.append(Finding("NONFINITE_VALUE", path, f"{value!r}"))
    elif value < 0:
        findings.append(Finding("NEGATIVE_VALUE", path, f"{value!r} < 0"))


def _check_series(findings: list, path: str, series: HourlySeries, horizon: int, kind: str):
    if len(series.values) != series.horizon_hours:
        findings.append(
            Finding("SERIES_LENGTH_MISMATCH", path, f"{len(series.values)} values for horizon {series.horizon_hours}")
        )
    if series.horizon_hours != horizon:
        findings.append(Finding("HORIZON_MISMATCH", path, f"horizon {series.horizon_hours} != system horizon {horizon}"))
    vals = series.values
    for i in np.flatnonzero(~np.isfinite(vals)):
        findings.append(Finding("NONFINITE_VALUE", f"{path}[{i}]", f"{vals[i]!r}"))
    finite = np.isfinite(vals)
    if kind == "cf":
        for i in np.flatnonzero(finite & ((vals < 0) | (vals > 1))):
            findings.append(Finding("CF_OUT_OF_RANGE", f"{path}[{i}]", f"{vals[i]!r} outside [0, 1]"))
    else:
        for i in np.flatnonzero(finite & (vals < 0)):
            findings.append(Finding("NEGATIVE_DEMAND", f"{path}[{i}]", f"{vals[i]!r} < 0"))


def _check_vre(findings: list, path: str, v: VreResource, horizon: int):
    _check_nonneg(findings, f"{path}.capacity_mw", v.capacity_mw)
    _check_nonneg(findings, f"{path}.variable_cost", v.variable_cost)
    _check_nonneg(findings, f"{path}.annualized_capex", v.annualized_capex)
    _check_series(findings, f"{path}.cf_profile", v.cf_profile, horizon, "cf")


def validate_system(system: PowerSystem) -> list[Finding]:
    """Return one finding per violated invariant; empty when the system is consistent."""
    findings: list[Finding] = []
    horizon = system.demand.horizon_hours
    if horizon <= 0:
        findings.append(Finding("NONPOSITIVE_HORIZON", "demand.horizon_hours", str(horizon)))
    _check_series(findings, "demand", system.demand, horizon, "power")

    names: dict[str, str] = {}

    def _name(path, name):
        if name in names:
            findings.append(Finding("DUPLICATE_NAME", path, f"{name!r} already used at {names[name]}"))
        else:
            names[name] = path

    for i, g in enumerate(system.thermal_fleet):
        path = f"thermal_fleet[{i}]"
        _name(f"{path}.name", g.name)
        for attr in ("capacity_mw", "variable_cost", "emission_rate", "annualized_capex"):
            _check_nonneg(findings, f"{path}.{attr}", getattr(g, attr))
        if not 0.0 <= g.must_run_fraction <= 1.0:
            findings.append(Finding("FRACTION_OUT_OF_RANGE", f"{path}.must_run_fraction", f"{g.must_run_fraction!r}"))
    for i, v in enumerate(system.vre_fleet):
        _name(f"vre_fleet[{i}].name", v.name)
        _check_vre(findings, f"vre_fleet[{i}]", v, horizon)

    hy = system.hybrid
    _name("hybrid.pv.name", hy.pv.name)
    _check_vre(findings, "hybrid.pv", hy.pv, horizon)
    st = hy.storage
    for attr in ("energy_capacity_mwh", "charge_capacity_mw", "discharge_capacity_mw", "charge_cost", "discharge_cost"):
        _check_nonneg(findings, f"hybrid.storage.{attr}", getattr(st, attr))
    for attr in ("charge_efficiency", "discharge_efficiency"):
        eff = getattr(st, attr)
        if not 0.0 < eff <= 1.0:
            findings.append(Finding("EFFICIENCY_OUT_OF_RANGE", f"hybrid.storage.{attr}", f"{eff!r} outside (0, 1]"))
    if not 0.0 <= st.initial_soc_mwh <= st.energy_capacity_mwh:
        findings.append(
            Finding("INITIAL_SOC_OUT_OF_RANGE", "hybrid.storage.initial_soc_mwh", f"{st.initial_soc_mwh!r}")
        )
    if not hy.tie_line_limit_mw > 0:
        findings.append(Finding("NONPOSITIVE_TIE_LINE", "hybrid.tie_line_limit_mw", f"{hy.tie_line_limit_mw!r}"))
    elif hy.pv.capacity_mw > hy.tie_line_limit_mw:
        findings.append(
            Finding(
                "PV_EXCEEDS_TIE_LINE",
                "hybrid.pv.capacity_mw",
                f"{hy.pv.capacity_mw!r} > tie line {hy.tie_line_limit_mw!r}",
            )
        )
    if not system.voll >= 0:
        findings.append(Finding("NEGATIVE_VALUE", "voll", f"{system.voll!r}"))
    # output floors that exceed load in some hour leave the balance row without a solution
    floor = sum(g.must_run_fraction * g.capacity_mw for g in system.thermal_fleet
                if 0.0 <= g.must_run_fraction <= 1.0 and math.isfinite(g.capacity_mw))
    demand = system.demand.values
    if floor > 0 and demand.size and np.isfinite(demand).all() and floor > demand.min():
        hour = int(np.argmin(demand))
        findings.append(
            Finding("MUST_RUN_EXCEEDS_DEMAND", f"demand[{hour}]", f"must-run output {floor!r} MW > demand {demand[hour]!r} MW")
        )
    return findings


# --------------------------------------------------------------------------
# content fingerprint for memoization


def _feed(h, obj):
    if is_dataclass(obj):
        h.update(type(obj).__name__.encode())
        for f in fields(obj):
            h.update(f.name.encode())
            _feed(h, getattr(obj, f.name))
    elif isinstance(obj, np.ndarray):
        h.update(np.ascontiguousarray(obj, dtype=float).tobytes())
    elif isinstance(obj, (tuple, list)):
        h.update(b"[")
        for item in obj:
            _feed(h, item)
        h.update(b"]")
    else:
        h.update(repr(obj).encode())
        h.update(b";")


def fingerprint(*objs) -> str:
    """Stable content hash of dataclass trees (numpy arrays hashed by bytes)."""
    h = hashlib.sha256()
    for obj in objs:
        _feed(h, obj)
    return h.hexdigest()


__all__ = [
    "HOURS_PER_YEAR",
    "HOURS_PER_WEEK",
    "HourlySeries",
    "ThermalGenerator",
    "VreResource",
    "StorageSpec",
    "HybridPlant",
    "PowerSystem",
    "ScenarioConfig",
    "Finding",
    "validate_system",
    "paper_scenario_grid",
    "sampled_week_hours",
    "fingerprint",
    "PAPER_STORAGE_SIZES_MWH",
    "PAPER_DISCHARGE_MW",
    "PAPER_CO2_REDUCTIONS",
]
