"""PAF against the CO2 reduction target for one storage configuration.

    python scripts/co2_sweep.py [--size-mwh 600] [--discharge-mw 20] [--step 0.05] [--max 0.7]
"""

from __future__ import annotations

import argparse
from pathlib import Path

import numpy as np

from tegsgrid.io import reference_dataset, reference_manifest
from tegsgrid.model import ScenarioConfig, sampled_week_hours
from tegsgrid.report import write_summary
from tegsgrid.runner import RunnerOptions, run_sweep


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size-mwh", type=float, default=600.0)
    ap.add_argument("--discharge-mw", type=float, default=20.0)
    ap.add_argument("--step", type=float, default=0.05)
    ap.add_argument("--max", type=float, default=0.7)
    ap.add_argument("--full-year", action="store_true")
    ap.add_argument("--out", type=Path, default=Path("results/co2_sweep"))
    args = ap.parse_args(argv)

    system = reference_dataset()
    if not args.full_year:
        system = system.take_hours(sampled_week_hours())
    fractions = tuple(float(x) for x in np.round(np.arange(0.0, args.max + 1e-9, args.step), 6))
    outcomes = run_sweep(system, [ScenarioConfig(args.size_mwh, args.discharge_mw)], RunnerOptions(co2_sweep=fractions))
    write_summary(outcomes, args.out / "summary.csv")
    print(f"manifest r* = {reference_manifest()['r_star']}")
    for o in outcomes:
        paf = "-" if o.paf is None else f"{o.paf:.4f}"
        print(f"r={o.scenario.co2_reduction_fraction:<5g} {o.status:<12} PAF {paf}")


if __name__ == "__main__":
    main()
