"""``tegsgrid`` command line.

Exit codes:

    0  success
    2  validation failure (bad config, bad input file, bad arguments)
    3  infeasible scenario
    4  solver inconclusive
    5  I/O error

Diagnostics go to stderr, data to stdout or files. ``reference`` may be used
in place of a config path to select the bundled dataset.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys
from pathlib import Path

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_INFEASIBLE = 3
EXIT_INCONCLUSIVE = 4
EXIT_IO = 5

HELP_WIDTH = 80


class _Formatter(argparse.RawDescriptionHelpFormatter):
    def __init__(self, prog):
        super().__init__(prog, width=HELP_WIDTH, max_help_position=32)


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _use_color(stream) -> bool:
    return "NO_COLOR" not in os.environ and hasattr(stream, "isatty") and stream.isatty()


def _err(message: str, kind: str = "error"):
    colors = {"error": "31", "warning": "33", "note": "36"}
    tag = f"{kind}:"
    if _use_color(sys.stderr):
        tag = f"\033[{colors.get(kind, '0')}m{tag}\033[0m"
    print(f"{tag} {message}", file=sys.stderr)


# --------------------------------------------------------------------------
# argument parsing


def _add_scenario_flags(p: argparse.ArgumentParser):
    g = p.add_argument_group("scenario")
    g.add_argument("--storage-mwh", type=float, metavar="E", help="storage energy capacity (default: from config)")
    g.add_argument("--discharge-mw", type=float, metavar="D", help="discharge capacity (default: from config)")
    g.add_argument("--derated-mw", type=float, metavar="P", help="availability threshold (default: discharge capacity)")
    g.add_argument("--co2-reduction", type=float, default=0.0, metavar="R",
                   help="emission cut relative to the uncapped run, in [0, 1)")
    g.add_argument("--expansion", action="store_true", help="allow capacity expansion")
    g.add_argument("--reduced-horizon", action="store_true", help="use 13 sampled weeks instead of the full horizon")


def _add_solver_flags(p: argparse.ArgumentParser):
    g = p.add_argument_group("solver")
    g.add_argument("--backend", choices=("highs", "simplex"), default="highs", help="LP backend (default: highs)")
    g.add_argument("--time-limit", type=float, metavar="S", help="solver time limit in seconds")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="tegsgrid",
        description="Grid dispatch and availability analysis of PV plus thermal storage.",
        epilog="exit codes: 0 ok, 2 validation, 3 infeasible, 4 inconclusive, 5 I/O",
        formatter_class=_Formatter,
    )
    sub = ap.add_subparsers(dest="command", metavar="COMMAND", required=True)

    p = sub.add_parser("validate", help="check a system config", formatter_class=_Formatter,
                       description="Load a config and report validation findings on stderr.")
    p.add_argument("config", help="system YAML, or 'reference'")

    p = sub.add_parser("dispatch", help="solve one scenario", formatter_class=_Formatter,
                       description="Solve one dispatch scenario and print a summary.")
    p.add_argument("config", help="system YAML, or 'reference'")
    _add_scenario_flags(p)
    _add_solver_flags(p)
    p.add_argument("--traces", type=Path, metavar="DIR", help="write the hourly trace CSV into DIR")

    p = sub.add_parser("sweep", help="solve a scenario grid", formatter_class=_Formatter,
                       description="Solve a grid of scenarios; write summary CSV/JSON and a PAF plot.")
    p.add_argument("config", help="system YAML, or 'reference'")
    grid = p.add_mutually_exclusive_group()
    grid.add_argument("--paper-grid", action="store_true",
                      help="3 sizes x 11 discharge ratings x 2 CO2 cases (default)")
    grid.add_argument("--grid-file", type=Path, metavar="F",
                      help="CSV with size_mwh, discharge_mw, co2_reduction[, derated_mw]")
    p.add_argument("--co2-sweep", metavar="R1,R2,...", help="replace each CO2 target by every listed fraction")
    p.add_argument("--workers", type=int, default=1, metavar="N", help="worker processes (default: 1)")
    p.add_argument("--out", type=Path, default=Path("out"), metavar="DIR", help="output directory (default: out)")
    p.add_argument("--traces", action="store_true", help="also write one hourly trace per scenario")
    p.add_argument("--global-baseline", action="store_true",
                   help="cap against the config's own storage setup, not each uncapped twin")
    p.add_argument("--reduced-horizon", action="store_true", help="use 13 sampled weeks instead of the full horizon")
    _add_solver_flags(p)

    p = sub.add_parser("shape", help="greedy baseload shaping of a PV profile", formatter_class=_Formatter,
                       description="Shape a PV profile with storage and print its availability.")
    p.add_argument("pv_csv", metavar="PV_CSV", help="CSV holding an hourly PV series")
    p.add_argument("--column", default="pv_mw", help="column to read (default: pv_mw)")
    p.add_argument("--pv-mw", type=float, metavar="C",
                   help="treat the column as a capacity factor and scale by C MW")
    p.add_argument("--derated-mw", type=float, required=True, metavar="P", help="delivery threshold")
    p.add_argument("--storage-mwh", type=float, required=True, metavar="E", help="storage energy capacity")
    p.add_argument("--discharge-mw", type=float, required=True, metavar="D", help="discharge capacity")
    p.add_argument("--charge-mw", type=float, default=100.0, metavar="C", help="charge capacity (default: 100)")
    p.add_argument("--charge-efficiency", type=float, default=1.0, metavar="X", help="default: 1.0")
    p.add_argument("--discharge-efficiency", type=float, default=0.5, metavar="X", help="default: 0.5")

    p = sub.add_parser("export-mps", help="write the dispatch LP as MPS", formatter_class=_Formatter,
                       description="Emit the dispatch LP of one scenario for an external solver.")
    p.add_argument("config", help="system YAML, or 'reference'")
    _add_scenario_flags(p)
    p.add_argument("--out", type=Path, required=True, metavar="FILE", help="MPS output path")

    p = sub.add_parser("plot-week", help="chart one week of a trace", formatter_class=_Formatter,
                       description="Render 168 hours of a trace CSV as SVG.")
    p.add_argument("trace", type=Path, help="trace CSV written by dispatch or sweep")
    p.add_argument("--start-hour", type=int, required=True, metavar="H", help="first hour of the window")
    p.add_argument("--out", type=Path, required=True, metavar="FILE", help="SVG output path")
    return ap


# --------------------------------------------------------------------------
# helpers


def _load(config: str):
    from .io import ConfigError, SeriesParseError, load_system, reference_dataset

    try:
        return reference_dataset() if config == "reference" else load_system(config)
    except ConfigError as exc:
        for f in exc.findings:
            _err(str(f))
        code = EXIT_IO if not exc.findings and not Path(config).exists() else EXIT_VALIDATION
        raise CliError(code, str(exc)) from None
    except SeriesParseError as exc:
        raise CliError(EXIT_IO if exc.code == "FILE_NOT_FOUND" else EXIT_VALIDATION, str(exc)) from None


def _horizon(system, reduced: bool):
    from .model import sampled_week_hours

    return system.take_hours(sampled_week_hours(horizon=system.horizon_hours)) if reduced else system


def _scenario(system, args):
    from .model import ScenarioConfig

    st = system.hybrid.storage
    e = st.energy_capacity_mwh if args.storage_mwh is None else args.storage_mwh
    d = st.discharge_capacity_mw if args.discharge_mw is None else args.discharge_mw
    try:
        return ScenarioConfig(e, d, args.co2_reduction, args.derated_mw, args.expansion)
    except ValueError as exc:
        raise CliError(EXIT_VALIDATION, str(exc)) from None


def _dispatch_options(args):
    from .dispatch import DispatchOptions
    from .lp import SolveOptions

    return DispatchOptions(solve=SolveOptions(backend=getattr(args, "backend", "highs"),
                                              time_limit=getattr(args, "time_limit", None)))


def _baseline(system, scenario, options):
    from .dispatch import BaselineUnavailable, compute_baseline_emissions
    from .lp import INFEASIBLE

    if scenario.co2_reduction_fraction == 0.0:
        return None
    try:
        return compute_baseline_emissions(system, scenario, options)
    except BaselineUnavailable as exc:
        code = EXIT_INFEASIBLE if exc.status == INFEASIBLE else EXIT_INCONCLUSIVE
        raise CliError(code, str(exc)) from None


def _read_grid(path: Path):
    from .model import ScenarioConfig

    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        raise CliError(EXIT_IO, f"{path}: {exc.strerror or exc}") from None
    out = []
    for i, row in enumerate(rows, 1):
        try:
            derated = row.get("derated_mw") or None
            out.append(ScenarioConfig(float(row["size_mwh"]), float(row["discharge_mw"]),
                                      float(row.get("co2_reduction") or 0.0),
                                      None if derated is None else float(derated)))
        except (KeyError, TypeError, ValueError) as exc:
            raise CliError(EXIT_VALIDATION, f"{path}, row {i}: {exc}") from None
    return out


def _fmt(x) -> str:
    return "nan" if x is None or (isinstance(x, float) and math.isnan(x)) else f"{x:.6g}"


# --------------------------------------------------------------------------
# commands


def cmd_validate(args) -> int:
    from .io import ConfigError, load_system
    from .model import validate_system

    if args.config == "reference":
        findings = validate_system(_load("reference"))
    else:
        try:
            findings = validate_system(load_system(args.config))
        except ConfigError as exc:
            if not exc.findings:
                raise CliError(EXIT_IO if not Path(args.config).exists() else EXIT_VALIDATION, str(exc)) from None
            findings = exc.findings
    for f in findings:
        _err(str(f), "finding")
    if findings:
        return EXIT_VALIDATION
    print("ok: no findings")
    return EXIT_OK


def cmd_dispatch(args) -> int:
    from .dispatch import run_dispatch
    from .lp import INFEASIBLE, OPTIMAL
    from .metrics import availability_of
    from .report import trace_from_result, write_trace
    from .runner import trace_filename

    system = _horizon(_load(args.config), args.reduced_horizon)
    sc = _scenario(system, args)
    opts = _dispatch_options(args)
    base = _baseline(system, sc, opts)
    res = run_dispatch(system, sc, base, opts)
    if res.status != OPTIMAL:
        if res.status == INFEASIBLE:
            _err(f"scenario infeasible: the {sc.co2_reduction_fraction:g} CO2 reduction cannot be met "
                 f"(cap {_fmt(res.emissions_cap)} t against baseline {_fmt(base)} t)")
            return EXIT_INFEASIBLE
        _err(f"solver inconclusive: {res.message}")
        return EXIT_INCONCLUSIVE
    rep = availability_of(res, sc.derated_power_mw)
    lines = {
        "status": res.status.lower(),
        "hours": res.hours,
        "size_mwh": sc.storage_energy_mwh,
        "discharge_mw": sc.discharge_capacity_mw,
        "derated_mw": sc.derated_power_mw,
        "co2_reduction": sc.co2_reduction_fraction,
        "paf": rep.paf,
        "pna": rep.pna,
        "unavailable_hours": rep.unavailable_hours,
        "total_cost": res.total_cost,
        "total_emissions": res.total_emissions,
        "baseline_emissions": base,
        "non_served_mwh": float(res.non_served.sum()),
        "co2_price": res.co2_price,
        "solve_seconds": res.solve_seconds,
    }
    for k, v in lines.items():
        print(f"{k}: {v if isinstance(v, str) else _fmt(v)}")
    if args.traces is not None:
        from .report import ReportError

        try:
            path = write_trace(trace_from_result(res, sc.derated_power_mw), args.traces / trace_filename(sc))
        except ReportError as exc:
            raise CliError(EXIT_IO, str(exc)) from None
        print(f"trace: {path}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    from .lp import INFEASIBLE, OPTIMAL
    from .model import paper_scenario_grid
    from .report import ReportError, plot_paf_curves, write_summary
    from .runner import RunnerOptions, run_sweep

    system = _horizon(_load(args.config), args.reduced_horizon)
    scenarios = _read_grid(args.grid_file) if args.grid_file else paper_scenario_grid()
    co2 = None
    if args.co2_sweep:
        try:
            co2 = tuple(float(x) for x in args.co2_sweep.split(","))
        except ValueError:
            raise CliError(EXIT_VALIDATION, f"--co2-sweep: cannot parse {args.co2_sweep!r}") from None
    if args.workers < 1:
        raise CliError(EXIT_VALIDATION, "--workers must be at least 1")
    opts = RunnerOptions(
        workers=args.workers,
        persist_traces=args.out / "traces" if args.traces else None,
        co2_sweep=co2,
        global_baseline=args.global_baseline,
        dispatch=_dispatch_options(args),
    )
    try:
        outcomes = run_sweep(system, scenarios, opts)
    except ValueError as exc:
        raise CliError(EXIT_VALIDATION, str(exc)) from None
    except OSError as exc:
        raise CliError(EXIT_IO, str(exc)) from None
    try:
        csv_path, json_path = write_summary(outcomes, args.out / "summary.csv")
        written = [csv_path, json_path]
        if any(o.status == OPTIMAL for o in outcomes):
            written.append(plot_paf_curves([o for o in outcomes if o.status == OPTIMAL], args.out / "paf_curves.svg"))
    except ReportError as exc:
        raise CliError(EXIT_IO, str(exc)) from None
    counts = {s: sum(o.status == s for o in outcomes) for s in (OPTIMAL, INFEASIBLE)}
    inconclusive = len(outcomes) - sum(counts.values())
    print(f"scenarios: {len(outcomes)} (optimal {counts[OPTIMAL]}, infeasible {counts[INFEASIBLE]}, "
          f"inconclusive {inconclusive})")
    for p in written:
        print(f"wrote: {p}")
    if inconclusive:
        for o in outcomes:
            if o.status not in (OPTIMAL, INFEASIBLE):
                _err(f"{o.scenario}: {o.message.splitlines()[0] if o.message else 'inconclusive'}", "warning")
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def cmd_shape(args) -> int:
    from .io import SeriesParseError, load_series_csv
    from .model import StorageSpec
    from .shaper import shape_baseload

    try:
        series = load_series_csv(args.pv_csv, args.column, kind="cf" if args.pv_mw is not None else "power")
    except SeriesParseError as exc:
        raise CliError(EXIT_IO if exc.code == "FILE_NOT_FOUND" else EXIT_VALIDATION, str(exc)) from None
    pv = series.values * (args.pv_mw if args.pv_mw is not None else 1.0)
    try:
        storage = StorageSpec(
            energy_capacity_mwh=args.storage_mwh, charge_capacity_mw=args.charge_mw,
            discharge_capacity_mw=args.discharge_mw, charge_efficiency=args.charge_efficiency,
            discharge_efficiency=args.discharge_efficiency,
        )
        out = shape_baseload(pv, storage, args.derated_mw)
    except ValueError as exc:
        raise CliError(EXIT_VALIDATION, str(exc)) from None
    rep = out.availability(args.derated_mw)
    print(f"paf: {rep.paf!r}")
    print(f"pna: {rep.pna!r}")
    print(f"unavailable_hours: {rep.unavailable_hours}")
    print(f"horizon_hours: {rep.horizon_hours}")
    for k, v in rep.cause_breakdown.items():
        print(f"{k}: {v}")
    return EXIT_OK


def cmd_export_mps(args) -> int:
    from .dispatch import formulate
    from .lp import MpsError, write_mps

    system = _horizon(_load(args.config), args.reduced_horizon)
    sc = _scenario(system, args)
    opts = _dispatch_options(args)
    lp = formulate(system, sc, _baseline(system, sc, opts), opts)
    try:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        write_mps(lp, args.out)
    except MpsError as exc:
        raise CliError(EXIT_VALIDATION, str(exc)) from None
    except OSError as exc:
        raise CliError(EXIT_IO, f"{args.out}: {exc.strerror or exc}") from None
    print(f"wrote: {args.out} ({lp.num_vars} columns, {lp.num_rows} rows)")
    return EXIT_OK


def cmd_plot_week(args) -> int:
    from .report import ReportError, plot_week, read_trace

    try:
        trace = read_trace(args.trace)
    except OSError as exc:
        raise CliError(EXIT_IO, f"{args.trace}: {exc.strerror or exc}") from None
    except ValueError as exc:
        raise CliError(EXIT_VALIDATION, str(exc)) from None
    try:
        path = plot_week(trace, args.start_hour, args.out)
    except ValueError as exc:
        raise CliError(EXIT_VALIDATION, str(exc)) from None
    except ReportError as exc:
        raise CliError(EXIT_IO, str(exc)) from None
    shaded = int(trace.unavailable[args.start_hour:args.start_hour + 168].sum())
    print(f"wrote: {path} ({shaded} unavailable hours highlighted)")
    return EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "dispatch": cmd_dispatch,
    "sweep": cmd_sweep,
    "shape": cmd_shape,
    "export-mps": cmd_export_mps,
    "plot-week": cmd_plot_week,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors, which matches the validation code
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except CliError as exc:
        _err(str(exc))
        return exc.code
    except OSError as exc:
        _err(str(exc))
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
