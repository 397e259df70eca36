"""Run the 66-scenario grid on the reference zone and write the summary,
the PAF-curve chart and winter/summer week charts for 600 MWh / 20 MW.

    python scripts/run_paper_sweep.py [--full-year] [--workers N] [--out DIR]
"""

from __future__ import annotations

import argparse
import time
from pathlib import Path

from tegsgrid.io import reference_dataset
from tegsgrid.model import paper_scenario_grid, sampled_week_hours
from tegsgrid.report import plot_paf_curves, plot_week, read_trace, write_summary
from tegsgrid.runner import RunnerOptions, run_sweep


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--full-year", action="store_true", help="8760 h instead of the 13 sampled weeks")
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", type=Path, default=Path("results/paper_sweep"))
    args = ap.parse_args(argv)

    system = reference_dataset()
    if not args.full_year:
        system = system.take_hours(sampled_week_hours())
    start = time.perf_counter()
    outcomes = run_sweep(system, paper_scenario_grid(),
                         RunnerOptions(workers=args.workers, persist_traces=args.out / "traces"))
    elapsed = time.perf_counter() - start
    write_summary(outcomes, args.out / "summary.csv")
    plot_paf_curves([o for o in outcomes if o.paf is not None], args.out / "paf_curves.svg")

    print(f"{len(outcomes)} scenarios in {elapsed:.1f} s")
    print(f"{'MWh':>5} {'MW':>5}  {'PAF r=0':>8}  {'PAF r=0.5':>9}")
    rows = {(o.scenario.storage_energy_mwh, o.scenario.discharge_capacity_mw, o.scenario.co2_reduction_fraction): o
            for o in outcomes}
    for (e, d, r), o in rows.items():
        if r == 0.0:
            capped = rows[(e, d, 0.5)]
            fmt = lambda x: "-" if x is None else f"{x:.4f}"  # noqa: E731
            print(f"{e:5g} {d:5g}  {fmt(o.paf):>8}  {fmt(capped.paf):>9}")

    # first week is January; mid-June is calendar week 24, the seventh sampled week
    winter, summer = 0, (24 if args.full_year else 6) * 168
    for r in (0.0, 0.5):
        o = rows[(600.0, 20.0, r)]
        if o.traces_path is None:
            continue
        trace = read_trace(o.traces_path)
        for label, start_hour in (("winter", winter), ("summer", summer)):
            path = plot_week(trace, start_hour, args.out / f"week_{label}_r{r:g}.svg")
            print(f"{path}: {int(trace.unavailable[start_hour:start_hour + 168].sum())} unavailable hours")


if __name__ == "__main__":
    main()
