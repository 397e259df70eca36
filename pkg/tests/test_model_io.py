from dataclasses import replace

import numpy as np
import pytest
import yaml
from conftest import make_toy_system
from hypothesis import given, settings
from hypothesis import strategies as st

from tegsgrid.io import (
    ConfigError,
    SeriesParseError,
    load_series_csv,
    load_system,
    reference_manifest,
    save_system,
)
from tegsgrid.model import (
    HourlySeries,
    StorageSpec,
    paper_scenario_grid,
    sampled_week_hours,
    validate_system,
)


def _codes(findings):
    return [f.code for f in findings]


def test_paper_grid_shape():
    grid = paper_scenario_grid()
    assert len(grid) == 66 == 3 * 11 * 2
    keys = {(s.storage_energy_mwh, s.discharge_capacity_mw, s.co2_reduction_fraction) for s in grid}
    assert len(keys) == 66
    assert (400.0, 5.0, 0.0) in keys and (800.0, 100.0, 0.5) in keys
    assert all(s.derated_power_mw == s.discharge_capacity_mw for s in grid)


def test_cf_out_of_range_finding_has_path(reference):
    vre = reference.vre_fleet[0]
    cf = vre.cf_profile.values.copy()
    cf[17] = 1.2
    bad = replace(reference, vre_fleet=(replace(vre, cf_profile=HourlySeries(cf)),) + reference.vre_fleet[1:])
    findings = validate_system(bad)
    assert [(f.code, f.path) for f in findings] == [("CF_OUT_OF_RANGE", "vre_fleet[0].cf_profile[17]")]


def test_reference_is_valid(reference):
    assert validate_system(reference) == []


def test_short_demand_series_is_flagged(reference):
    short = HourlySeries(reference.demand.values[:8759], horizon_hours=8760)
    findings = validate_system(replace(reference, demand=short))
    assert "SERIES_LENGTH_MISMATCH" in _codes(findings)


def test_validation_is_idempotent(reference):
    bad = replace(reference, voll=-1.0)
    assert validate_system(bad) == validate_system(bad)


def test_pv_above_tie_line_is_flagged(toy_system):
    hy = replace(toy_system.hybrid, tie_line_limit_mw=10.0)
    assert "PV_EXCEEDS_TIE_LINE" in _codes(validate_system(replace(toy_system, hybrid=hy)))


def test_must_run_above_load_is_flagged(reference):
    low = HourlySeries(np.full(8760, 100.0))
    assert "MUST_RUN_EXCEEDS_DEMAND" in _codes(validate_system(replace(reference, demand=low)))


@given(st.floats(0.01, 1.0), st.floats(0.01, 1.0))
def test_round_trip_efficiency_is_product(a, b):
    assert StorageSpec(1, 1, 1, a, b).round_trip_efficiency == a * b


def test_sampled_weeks():
    hours = sampled_week_hours()
    assert hours.size == 2184
    assert hours[0] == 0 and hours[168] == 4 * 168


# --------------------------------------------------------------------------
# ingest


def _csv(tmp_path, name, header, rows):
    p = tmp_path / name
    p.write_text(header + "\n" + "".join(f"{r}\n" for r in rows), encoding="utf-8")
    return p


def test_load_demand_series(tmp_path):
    p = _csv(tmp_path, "d.csv", "demand_mw", [100.0 + i % 24 for i in range(8760)])
    s = load_series_csv(p, "demand_mw", horizon_hours=8760)
    assert len(s) == 8760


def test_extra_row_is_length_mismatch(tmp_path):
    p = _csv(tmp_path, "d.csv", "demand_mw", [1.0] * 8761)
    with pytest.raises(SeriesParseError) as exc:
        load_series_csv(p, "demand_mw", horizon_hours=8760)
    assert exc.value.code == "SERIES_LENGTH_MISMATCH" and "d.csv" in str(exc.value)


def test_cf_out_of_range_reports_row(tmp_path):
    p = _csv(tmp_path, "cf.csv", "cf", [0.5, 0.2, 1.05, 0.1])
    with pytest.raises(SeriesParseError) as exc:
        load_series_csv(p, "cf", kind="cf")
    assert exc.value.code == "CF_OUT_OF_RANGE" and exc.value.row == 3


@pytest.mark.parametrize(
    "rows,code",
    [(["1.0", "abc"], "MALFORMED_NUMBER"), (["1.0", "nan"], "NONFINITE_VALUE"), (["-2"], "NEGATIVE_VALUE")],
)
def test_bad_cells(tmp_path, rows, code):
    p = _csv(tmp_path, "x.csv", "v", rows)
    with pytest.raises(SeriesParseError) as exc:
        load_series_csv(p, "v")
    assert exc.value.code == code and exc.value.path.endswith("x.csv")


def test_missing_column(tmp_path):
    p = _csv(tmp_path, "x.csv", "a,b", ["1,2"])
    with pytest.raises(SeriesParseError) as exc:
        load_series_csv(p, "c")
    assert exc.value.code == "MISSING_COLUMN"


def test_round_trip_save_load(tmp_path, toy_system):
    path = save_system(toy_system, tmp_path / "sys" / "system.yaml")
    back = load_system(path)
    assert back == toy_system


@settings(max_examples=25)
@given(
    st.lists(st.floats(0.0, 1e4, allow_subnormal=False), min_size=3, max_size=3),
    st.lists(st.floats(0.0, 1.0), min_size=3, max_size=3),
    st.floats(0.1, 1.0),
)
def test_round_trip_is_exact(tmp_path_factory, demand, cf, eta):
    system = make_toy_system(demand=demand, pv_cf=cf,
                             storage=StorageSpec(20.0, 20.0, 10.0, 1.0, eta, initial_soc_mwh=3.0))
    path = save_system(system, tmp_path_factory.mktemp("rt") / "system.yaml")
    assert load_system(path) == system


def test_unresolved_file_reference(tmp_path, toy_system):
    path = save_system(toy_system, tmp_path / "system.yaml")
    (tmp_path / "profiles.csv").unlink()
    with pytest.raises(ConfigError, match="unresolved"):
        load_system(path)


def test_invalid_system_lists_findings(tmp_path, toy_system):
    path = save_system(toy_system, tmp_path / "system.yaml")
    doc = yaml.safe_load(path.read_text())
    doc["hybrid"]["storage"]["discharge_efficiency"] = 1.5
    path.write_text(yaml.safe_dump(doc))
    with pytest.raises(ConfigError) as exc:
        load_system(path)
    assert "EFFICIENCY_OUT_OF_RANGE" in _codes(exc.value.findings)


def test_reference_fleet_shares(reference):
    caps = {k: v for k, v in reference.installed_capacity().items() if not k.startswith("demand_response_")}
    total = sum(caps.values())
    gas = sum(v for k, v in caps.items() if k.startswith("ng_"))
    vre = sum(v.capacity_mw for v in reference.vre_fleet) + reference.hybrid.pv.capacity_mw
    assert gas / total == pytest.approx(0.59, abs=0.01)
    assert vre / total == pytest.approx(0.14, abs=0.01)
    assert reference.hybrid.pv.capacity_mw == 100.0


def test_reference_profiles_are_plausible(reference):
    d = reference.demand.values
    assert d.max() > d.mean()
    cf = reference.hybrid.pv.cf_profile.values.reshape(365, 24)
    assert np.all(cf[:, :4] == 0.0) and np.all(cf[:, 22:] == 0.0)


def test_manifest_records_seed_and_frontier(reference):
    m = reference_manifest()
    assert isinstance(m["seed"], int)
    assert 0.0 < m["r_star"] < 1.0
    assert m["full_year_baseline"]["non_served_mwh"] == 0.0
