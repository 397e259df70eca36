"""Reading and writing systems: hourly series CSVs plus one YAML config.

Config layout (``schema_version: 1``)::

    schema_version: 1
    name: my-zone
    horizon_hours: 8760
    voll: 9000
    demand: {file: profiles.csv, column: demand_mw}
    thermal:
      - {name: ng_cc, capacity_mw: 5000, variable_cost: 30, emission_rate: 0.37}
    vre:
      - {name: wind, capacity_mw: 1000, cf: {file: profiles.csv, column: wind_cf}}
    hybrid:
      pv: {name: hybrid_pv, capacity_mw: 100, cf: {file: profiles.csv, column: hybrid_pv_cf}}
      storage: {energy_capacity_mwh: 600, charge_capacity_mw: 100, discharge_capacity_mw: 20}
      tie_line_limit_mw: 100
      grid_charging_allowed: true

Series paths are relative to the config file.
"""

from __future__ import annotations

import csv
import functools
import math
from dataclasses import asdict, fields
from importlib import resources
from pathlib import Path

import yaml

from .model import (
    Finding,
    HourlySeries,
    HybridPlant,
    PowerSystem,
    StorageSpec,
    ThermalGenerator,
    VreResource,
    validate_system,
)

SCHEMA_VERSION = 1
REFERENCE_CONFIG = "system.yaml"


class SeriesParseError(ValueError):
    def __init__(self, code: str, path, message: str, row: int | None = None):
        loc = f"{path}" + (f", row {row}" if row is not None else "")
        super().__init__(f"{code} in {loc}: {message}")
        self.code = code
        self.path = str(path)
        self.row = row


class ConfigError(ValueError):
    def __init__(self, path, message: str, findings: list[Finding] | None = None):
        super().__init__(f"{path}: {message}")
        self.path = str(path)
        self.findings = findings or []


def load_series_csv(path, column: str, kind: str = "power", horizon_hours: int | None = None, label: str | None = None) -> HourlySeries:
    """Read one numeric column. ``kind`` is ``"power"`` (non-negative MW) or
    ``"cf"`` (fraction in [0, 1]). Rows are numbered from 1 after the header."""
    path = Path(path)
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise SeriesParseError("FILE_NOT_FOUND", path, str(exc)) from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SeriesParseError("MISSING_HEADER", path, "file is empty") from None
        header = [h.strip() for h in header]
        if column not in header:
            raise SeriesParseError("MISSING_COLUMN", path, f"no column {column!r} (have {header})")
        col = header.index(column)
        values = []
        for row_no, row in enumerate(reader, 1):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                cell = row[col].strip()
            except IndexError:
                raise SeriesParseError("MALFORMED_ROW", path, f"row has {len(row)} fields", row_no) from None
            try:
                v = float(cell)
            except ValueError:
                raise SeriesParseError("MALFORMED_NUMBER", path, f"{cell!r} is not a number", row_no) from None
            if not math.isfinite(v):
                raise SeriesParseError("NONFINITE_VALUE", path, f"{cell!r}", row_no)
            if kind == "cf" and not 0.0 <= v <= 1.0:
                raise SeriesParseError("CF_OUT_OF_RANGE", path, f"{v!r} outside [0, 1]", row_no)
            if kind != "cf" and v < 0:
                raise SeriesParseError("NEGATIVE_VALUE", path, f"{v!r} < 0", row_no)
            values.append(v)
    if horizon_hours is not None and len(values) != horizon_hours:
        raise SeriesParseError(
            "SERIES_LENGTH_MISMATCH", path, f"{len(values)} data rows, expected {horizon_hours}"
        )
    return HourlySeries(values, label=label or column)


def _series_ref(node, base: Path, kind: str, horizon: int, where: str) -> HourlySeries:
    if not isinstance(node, dict) or "file" not in node or "column" not in node:
        raise ConfigError(base, f"{where}: expected a mapping with 'file' and 'column'")
    target = base / node["file"]
    if not target.exists():
        raise ConfigError(base, f"{where}: unresolved file reference {node['file']!r}")
    return load_series_csv(target, node["column"], kind=kind, horizon_hours=horizon, label=node["column"])


def _pick(cls, node: dict, where: str, skip=()):
    names = {f.name for f in fields(cls)} - set(skip)
    unknown = set(node) - names - set(skip) - {"cf"}
    if unknown:
        raise ValueError(f"{where}: unknown keys {sorted(unknown)}")
    return {k: v for k, v in node.items() if k in names}


def load_system(config_path) -> PowerSystem:
    config_path = Path(config_path)
    try:
        doc = yaml.safe_load(config_path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(config_path, str(exc)) from exc
    except yaml.YAMLError as exc:
        raise ConfigError(config_path, f"not valid YAML: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(config_path, "top level must be a mapping")
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ConfigError(config_path, f"unsupported schema_version {doc.get('schema_version')!r}")
    base = config_path.parent
    horizon = int(doc.get("horizon_hours", 8760))
    try:
        demand = _series_ref(doc["demand"], base, "power", horizon, "demand")
        thermal = [ThermalGenerator(**_pick(ThermalGenerator, g, f"thermal[{i}]")) for i, g in enumerate(doc.get("thermal", []))]
        vre = [
            VreResource(cf_profile=_series_ref(v.get("cf"), base, "cf", horizon, f"vre[{i}].cf"),
                        **_pick(VreResource, v, f"vre[{i}]", skip=("cf_profile",)))
            for i, v in enumerate(doc.get("vre", []))
        ]
        hy = doc["hybrid"]
        pv_node = hy["pv"]
        pv = VreResource(cf_profile=_series_ref(pv_node.get("cf"), base, "cf", horizon, "hybrid.pv.cf"),
                         **_pick(VreResource, pv_node, "hybrid.pv", skip=("cf_profile",)))
        storage = StorageSpec(**_pick(StorageSpec, hy["storage"], "hybrid.storage"))
        hybrid = HybridPlant(
            pv=pv,
            storage=storage,
            tie_line_limit_mw=hy.get("tie_line_limit_mw"),
            grid_charging_allowed=bool(hy.get("grid_charging_allowed", True)),
        )
        system = PowerSystem(
            thermal_fleet=thermal, vre_fleet=vre, demand=demand, hybrid=hybrid,
            voll=float(doc.get("voll", 9000.0)), name=str(doc.get("name", config_path.stem)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, (ConfigError, SeriesParseError)):
            raise
        raise ConfigError(config_path, f"invalid config: {exc}") from exc
    findings = validate_system(system)
    if findings:
        raise ConfigError(config_path, f"{len(findings)} validation finding(s): " + "; ".join(map(str, findings[:5])), findings)
    return system


def _plain(obj):
    return {k: v for k, v in asdict(obj).items()}


def save_system(system: PowerSystem, config_path, series_file: str = "profiles.csv") -> Path:
    """Write ``system`` as a config plus one CSV holding every hourly series."""
    config_path = Path(config_path)
    config_path.parent.mkdir(parents=True, exist_ok=True)
    columns: dict = {}

    def column_for(series: HourlySeries, fallback: str) -> str:
        # keep the series label as column name so a reload reproduces it
        name = series.label if series.label and series.label not in columns else fallback
        while name in columns:
            name = f"{name}_"
        columns[name] = series.values
        return name

    demand_col = column_for(system.demand, "demand_mw")
    vre_nodes = []
    for v in system.vre_fleet:
        node = {f.name: getattr(v, f.name) for f in fields(v) if f.name != "cf_profile"}
        node["cf"] = {"file": series_file, "column": column_for(v.cf_profile, f"{v.name}_cf")}
        vre_nodes.append(node)
    pv = system.hybrid.pv
    pv_node = {f.name: getattr(pv, f.name) for f in fields(pv) if f.name != "cf_profile"}
    pv_node["cf"] = {"file": series_file, "column": column_for(pv.cf_profile, f"{pv.name}_cf")}
    doc = {
        "schema_version": SCHEMA_VERSION,
        "name": system.name,
        "horizon_hours": system.horizon_hours,
        "voll": system.voll,
        "demand": {"file": series_file, "column": demand_col},
        "thermal": [_plain(g) for g in system.thermal_fleet],
        "vre": vre_nodes,
        "hybrid": {
            "pv": pv_node,
            "storage": _plain(system.hybrid.storage),
            "tie_line_limit_mw": system.hybrid.tie_line_limit_mw,
            "grid_charging_allowed": system.hybrid.grid_charging_allowed,
        },
    }
    config_path.write_text(yaml.safe_dump(doc, sort_keys=False), encoding="utf-8")
    write_columns(config_path.parent / series_file, columns)
    return config_path


def write_columns(path, columns: dict) -> None:
    names = list(columns)
    n = len(next(iter(columns.values()))) if columns else 0
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names)
        for i in range(n):
            w.writerow([repr(float(columns[c][i])) for c in names])


def reference_config_path() -> Path:
    return Path(str(resources.files("tegsgrid") / "data" / "reference" / REFERENCE_CONFIG))


@functools.lru_cache(maxsize=1)
def reference_dataset() -> PowerSystem:
    """The bundled stylized zone (8760 h)."""
    return load_system(reference_config_path())


def reference_manifest() -> dict:
    path = reference_config_path().parent / "manifest.yaml"
    return yaml.safe_load(path.read_text(encoding="utf-8"))
