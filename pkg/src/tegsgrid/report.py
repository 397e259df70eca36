"""Summary tables, hourly traces and SVG charts.

Summary CSV columns (schema version 1) are fixed by ``SUMMARY_COLUMNS``;
floats are written with ``repr`` so every value survives a round trip.
The JSON twin holds the same rows as a list of objects, with ``null`` where
the CSV has an empty cell.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from .lp import OPTIMAL
from .metrics import compute_pna

REPORT_SCHEMA_VERSION = 1
SUMMARY_COLUMNS = (
    "size_mwh",
    "discharge_mw",
    "derated_mw",
    "co2_reduction",
    "status",
    "paf",
    "pna",
    "total_cost",
    "total_emissions",
)
TRACE_COLUMNS = (
    "hour",
    "demand_mw",
    "pv_gen_mw",
    "pv_curtailment_mw",
    "charge_mw",
    "discharge_mw",
    "soc_mwh",
    "non_served_mw",
    "derated_mw",
    "unavailable",
)


class ReportError(OSError):
    """An output could not be written; ``path`` names the file."""

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = str(path)


# --------------------------------------------------------------------------
# summary


def summary_rows(outcomes) -> list[dict]:
    rows = []
    seen = set()
    for o in outcomes:
        sc = o.scenario
        key = (sc.storage_energy_mwh, sc.discharge_capacity_mw, sc.derated_power_mw, sc.co2_reduction_fraction,
               sc.expansion_enabled)
        if key in seen:
            raise ValueError(f"duplicate scenario in outcomes: {sc}")
        seen.add(key)
        ok = o.status == OPTIMAL and o.availability is not None
        rows.append({
            "size_mwh": float(sc.storage_energy_mwh),
            "discharge_mw": float(sc.discharge_capacity_mw),
            "derated_mw": float(sc.derated_power_mw),
            "co2_reduction": float(sc.co2_reduction_fraction),
            "status": o.status.lower(),
            "paf": float(o.availability.paf) if ok else None,
            "pna": float(o.availability.pna) if ok else None,
            "total_cost": float(o.total_cost) if ok else None,
            "total_emissions": float(o.total_emissions) if ok else None,
        })
    return rows


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_summary(outcomes, path) -> tuple[Path, Path]:
    """Write ``path`` (CSV) and its JSON twin next to it; returns both paths."""
    path = Path(path)
    rows = summary_rows(outcomes)
    json_path = path.with_suffix(".json")
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(SUMMARY_COLUMNS)
            for row in rows:
                w.writerow([_cell(row[c]) for c in SUMMARY_COLUMNS])
    except OSError as exc:
        raise ReportError(path, exc.strerror or str(exc)) from exc
    doc = {"schema_version": REPORT_SCHEMA_VERSION, "columns": list(SUMMARY_COLUMNS), "rows": rows}
    try:
        json_path.write_text(json.dumps(doc, indent=1, allow_nan=False) + "\n", encoding="utf-8")
    except OSError as exc:
        raise ReportError(json_path, exc.strerror or str(exc)) from exc
    return path, json_path


def read_summary_json(path) -> list[dict]:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if doc.get("schema_version") != REPORT_SCHEMA_VERSION:
        raise ValueError(f"{path}: unsupported schema_version {doc.get('schema_version')!r}")
    return doc["rows"]


def read_summary_csv(path) -> list[dict]:
    numeric = set(SUMMARY_COLUMNS) - {"status"}
    with open(path, newline="", encoding="utf-8") as fh:
        rows = []
        for raw in csv.DictReader(fh):
            rows.append({k: (None if raw[k] == "" else float(raw[k])) if k in numeric else raw[k]
                         for k in SUMMARY_COLUMNS})
    return rows


# --------------------------------------------------------------------------
# hourly traces


@dataclass(frozen=True)
class Trace:
    demand: np.ndarray
    pv_gen: np.ndarray
    pv_curtailment: np.ndarray
    charge: np.ndarray
    discharge: np.ndarray
    soc: np.ndarray
    non_served: np.ndarray
    derated_mw: float
    unavailable: np.ndarray

    @property
    def hours(self) -> int:
        return int(self.demand.size)


def trace_from_result(result, derated_mw: float) -> Trace:
    rep = compute_pna(result.pv_gen, result.discharge, result.soc, derated_mw)
    return Trace(
        demand=np.asarray(result.demand, float), pv_gen=result.pv_gen, pv_curtailment=result.pv_curtailment,
        charge=result.charge, discharge=result.discharge, soc=result.soc, non_served=result.non_served,
        derated_mw=float(derated_mw), unavailable=rep.unavailable_mask.copy(),
    )


def write_trace(trace: Trace, path) -> Path:
    path = Path(path)
    cols = [trace.demand, trace.pv_gen, trace.pv_curtailment, trace.charge, trace.discharge, trace.soc,
            trace.non_served]
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(TRACE_COLUMNS)
            for t in range(trace.hours):
                w.writerow([t, *(repr(float(c[t])) for c in cols), repr(trace.derated_mw), int(trace.unavailable[t])])
    except OSError as exc:
        raise ReportError(path, exc.strerror or str(exc)) from exc
    return path


def read_trace(path) -> Trace:
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != TRACE_COLUMNS:
            raise ValueError(f"{path}: not a trace file (header {header!r})")
        data = [row for row in reader if row]
    arr = np.array([[float(x) for x in row] for row in data], dtype=float).reshape(-1, len(TRACE_COLUMNS))
    col = {name: arr[:, i] for i, name in enumerate(TRACE_COLUMNS)}
    return Trace(
        demand=col["demand_mw"], pv_gen=col["pv_gen_mw"], pv_curtailment=col["pv_curtailment_mw"],
        charge=col["charge_mw"], discharge=col["discharge_mw"], soc=col["soc_mwh"],
        non_served=col["non_served_mw"], derated_mw=float(col["derated_mw"][0]) if arr.size else 0.0,
        unavailable=col["unavailable"].astype(bool),
    )


# --------------------------------------------------------------------------
# SVG


_W, _H = 900, 420
_LEFT, _RIGHT, _TOP, _BOTTOM = 70, 190, 30, 50
_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf")


def _fmt(x: float) -> str:
    return f"{x:.2f}".rstrip("0").rstrip(".")


class _Svg:
    def __init__(self, title: str):
        self.parts = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_W}" height="{_H}" '
            f'viewBox="0 0 {_W} {_H}">',
            f"<title>{escape(title)}</title>",
            f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="white"/>',
        ]

    def add(self, s: str):
        self.parts.append(s)

    def text(self, x, y, s, anchor="start", size=12, **attrs):
        extra = "".join(f' {k.replace("_", "-")}="{v}"' for k, v in attrs.items())
        self.add(f'<text x="{_fmt(x)}" y="{_fmt(y)}" font-family="sans-serif" font-size="{size}" '
                 f'text-anchor="{anchor}"{extra}>{escape(s)}</text>')

    def polyline(self, xs, ys, color, label, dash=None):
        pts = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in zip(xs, ys))
        d = f' stroke-dasharray="{dash}"' if dash else ""
        self.add(f'<polyline class="series" data-label="{escape(label)}" points="{pts}" fill="none" '
                 f'stroke="{color}" stroke-width="1.6"{d}/>')

    def save(self, path) -> Path:
        path = Path(path)
        self.add("</svg>")
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text("\n".join(self.parts) + "\n", encoding="utf-8")
        except OSError as exc:
            raise ReportError(path, exc.strerror or str(exc)) from exc
        return path


def _nice_ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if not hi > lo:
        hi = lo + 1.0
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw)
    start = math.ceil(lo / step) * step
    return [round(start + i * step, 10) for i in range(int((hi - start) / step + 1e-9) + 1)]


def _frame(svg: _Svg, x_label: str, y_label: str, xlo, xhi, ylo, yhi, y2=None):
    pw, ph = _W - _LEFT - _RIGHT, _H - _TOP - _BOTTOM

    def sx(x):
        return _LEFT + (x - xlo) / ((xhi - xlo) or 1.0) * pw

    def sy(y):
        return _TOP + ph - (y - ylo) / ((yhi - ylo) or 1.0) * ph

    svg.add(f'<rect x="{_LEFT}" y="{_TOP}" width="{pw}" height="{ph}" fill="none" stroke="#444"/>')
    for t in _nice_ticks(xlo, xhi, 8):
        svg.add(f'<line x1="{_fmt(sx(t))}" y1="{_TOP + ph}" x2="{_fmt(sx(t))}" y2="{_TOP + ph + 4}" stroke="#444"/>')
        svg.text(sx(t), _TOP + ph + 17, _fmt(t), anchor="middle", size=11)
    for t in _nice_ticks(ylo, yhi, 5):
        svg.add(f'<line x1="{_LEFT - 4}" y1="{_fmt(sy(t))}" x2="{_LEFT}" y2="{_fmt(sy(t))}" stroke="#444"/>')
        svg.add(f'<line x1="{_LEFT}" y1="{_fmt(sy(t))}" x2="{_LEFT + pw}" y2="{_fmt(sy(t))}" stroke="#eee"/>')
        svg.text(_LEFT - 7, sy(t) + 4, _fmt(t), anchor="end", size=11)
    svg.text(_LEFT + pw / 2, _H - 12, x_label, anchor="middle")
    svg.text(16, _TOP + ph / 2, y_label, anchor="middle", transform=f"rotate(-90 16 {_fmt(_TOP + ph / 2)})")
    sy2 = None
    if y2 is not None:
        label2, lo2, hi2 = y2

        def sy2(y):
            return _TOP + ph - (y - lo2) / ((hi2 - lo2) or 1.0) * ph

        for t in _nice_ticks(lo2, hi2, 5):
            svg.add(f'<line x1="{_LEFT + pw}" y1="{_fmt(sy2(t))}" x2="{_LEFT + pw + 4}" y2="{_fmt(sy2(t))}" stroke="#444"/>')
            svg.text(_LEFT + pw + 7, sy2(t) + 4, _fmt(t), size=11)
        xl = _LEFT + pw + 48
        svg.text(xl, _TOP + ph / 2, label2, anchor="middle", transform=f"rotate(90 {_fmt(xl)} {_fmt(_TOP + ph / 2)})")
    return sx, sy, sy2


def _legend(svg: _Svg, entries):
    x = _W - _RIGHT + 62
    for i, (label, color, dash) in enumerate(entries):
        y = _TOP + 14 + 18 * i
        d = f' stroke-dasharray="{dash}"' if dash else ""
        svg.add(f'<line x1="{x}" y1="{y - 4}" x2="{x + 18}" y2="{y - 4}" stroke="{color}" stroke-width="2"{d}/>')
        svg.text(x + 23, y, label, size=11)


def plot_paf_curves(outcomes, path) -> Path:
    """One curve of PAF (%) against derated power per (storage size, CO2 target)."""
    outcomes = list(outcomes)
    if not outcomes:
        raise ValueError("no outcomes to plot")
    groups: dict = {}
    for o in outcomes:
        sc = o.scenario
        groups.setdefault((sc.storage_energy_mwh, sc.co2_reduction_fraction), []).append(o)
    xs_all = [o.scenario.derated_power_mw for o in outcomes]
    xlo, xhi = min(xs_all), max(xs_all)
    if xhi == xlo:
        xlo, xhi = xlo - 1.0, xhi + 1.0
    svg = _Svg("Power availability factor by derated power")
    sx, sy, _ = _frame(svg, "Derated power (MW)", "PAF (%)", xlo, xhi, 0.0, 100.0)
    entries = []
    for i, key in enumerate(sorted(groups)):
        size, r = key
        color = _PALETTE[i % len(_PALETTE)]
        dash = "6 3" if r == 0 else None
        label = f"{size:g} MWh, {r * 100:g}% CO2 cut"
        pts = sorted((o.scenario.derated_power_mw, o.paf) for o in groups[key] if o.paf is not None)
        xs = [sx(x) for x, _ in pts]
        ys = [sy(min(max(p * 100.0, 0.0), 100.0)) for _, p in pts]
        svg.polyline(xs, ys, color, label, dash)
        for x, y in zip(xs, ys):
            svg.add(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="2.5" fill="{color}"/>')
        entries.append((label, color, dash))
    _legend(svg, entries)
    return svg.save(path)


def plot_week(trace: Trace, start_hour: int, path, hours: int = 168) -> Path:
    """Hourly chart of one window: delivery target, PV output, charge and
    discharge on the left axis, state of charge on the right, with every
    unavailable hour shaded."""
    if start_hour < 0 or start_hour + hours > trace.hours:
        raise ValueError(f"window [{start_hour}, {start_hour + hours}) outside trace of {trace.hours} hours")
    sl = slice(start_hour, start_hour + hours)
    t = np.arange(hours, dtype=float)
    target = np.full(hours, trace.derated_mw)
    series = [
        ("Derated target (MW)", target, "#000000", "4 2"),
        ("PV generation (MW)", trace.pv_gen[sl], "#ff7f0e", None),
        ("Charge (MW)", trace.charge[sl], "#1f77b4", None),
        ("Discharge (MW)", trace.discharge[sl], "#d62728", None),
    ]
    soc = trace.soc[sl]
    ymax = max([float(np.max(s[1])) for s in series] + [1.0]) * 1.05
    soc_max = max(float(np.max(soc)), 1.0) * 1.05
    svg = _Svg(f"Hours {start_hour} to {start_hour + hours - 1}")
    sx, sy, sy2 = _frame(svg, "Hour of window", "Power (MW)", 0.0, float(hours), 0.0, ymax,
                         y2=("State of charge (MWh)", 0.0, soc_max))
    width = sx(1.0) - sx(0.0)
    for h in np.flatnonzero(trace.unavailable[sl]):
        svg.add(f'<rect class="unavailable" x="{_fmt(sx(float(h)))}" y="{_TOP}" width="{_fmt(width)}" '
                f'height="{_H - _TOP - _BOTTOM}" fill="#d62728" fill-opacity="0.15"/>')
    entries = []
    for label, values, color, dash in series:
        svg.polyline([sx(x + 0.5) for x in t], [sy(v) for v in values], color, label, dash)
        entries.append((label, color, dash))
    svg.polyline([sx(x + 0.5) for x in t], [sy2(v) for v in soc], "#2ca02c", "State of charge (MWh)", "2 2")
    entries.append(("State of charge (MWh)", "#2ca02c", "2 2"))
    _legend(svg, entries)
    return svg.save(path)


__all__ = [
    "SUMMARY_COLUMNS",
    "TRACE_COLUMNS",
    "ReportError",
    "Trace",
    "summary_rows",
    "write_summary",
    "read_summary_json",
    "read_summary_csv",
    "trace_from_result",
    "write_trace",
    "read_trace",
    "plot_paf_curves",
    "plot_week",
]
