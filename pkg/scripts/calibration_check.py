"""Print the calibration figures of the bundled reference zone: fleet shares,
hybrid PV capacity factor, and baseline / capped PAF on the reduced horizon
for the derated powers the acceptance suite looks at.
"""

from __future__ import annotations

from tegsgrid.io import reference_dataset, reference_manifest
from tegsgrid.metrics import capacity_factor
from tegsgrid.model import PAPER_STORAGE_SIZES_MWH, ScenarioConfig, sampled_week_hours
from tegsgrid.runner import run_sweep


def main():
    system = reference_dataset()
    manifest = reference_manifest()
    pv = system.hybrid.pv
    print("fleet shares:", manifest["fleet_shares"])
    print(f"hybrid PV capacity factor: {capacity_factor(pv.available(), pv.capacity_mw):.5f}")
    print(f"r* (manifest): {manifest['r_star']}")

    reduced = system.take_hours(sampled_week_hours())
    grid = [ScenarioConfig(e, d, r) for e in PAPER_STORAGE_SIZES_MWH for d in (5.0, 10.0, 20.0, 100.0) for r in (0.0, 0.5)]
    outcomes = {(o.scenario.storage_energy_mwh, o.scenario.discharge_capacity_mw, o.scenario.co2_reduction_fraction): o
                for o in run_sweep(reduced, grid)}
    print(f"{'MWh':>5} {'MW':>5}  {'PAF r=0':>8}  {'PAF r=0.5':>9}")
    for e in PAPER_STORAGE_SIZES_MWH:
        for d in (5.0, 10.0, 20.0, 100.0):
            a, b = outcomes[(e, d, 0.0)], outcomes[(e, d, 0.5)]
            print(f"{e:5g} {d:5g}  {a.paf:8.4f}  {b.paf:9.4f}")


if __name__ == "__main__":
    main()
