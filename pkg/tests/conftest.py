from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from tegsgrid.model import (
    HourlySeries,
    HybridPlant,
    PowerSystem,
    StorageSpec,
    ThermalGenerator,
    VreResource,
    sampled_week_hours,
)

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow], derandomize=True
)
settings.load_profile("default")


def make_toy_system(
    demand=(10.0, 10.0, 10.0),
    pv_cf=(1.0, 0.0, 0.0),
    pv_mw=30.0,
    storage=None,
    thermal=None,
    voll=9000.0,
    cyclic=False,
) -> PowerSystem:
    storage = storage or StorageSpec(20.0, 20.0, 10.0, 1.0, 0.5, cyclic=cyclic)
    thermal = thermal or [ThermalGenerator("backstop", 100.0, 100.0, 0.5)]
    T = len(demand)
    pv = VreResource("hybrid_pv", pv_mw, HourlySeries(np.asarray(pv_cf, float), label="pv_cf"))
    return PowerSystem(
        thermal_fleet=thermal,
        vre_fleet=[],
        demand=HourlySeries(np.asarray(demand, float), label="demand"),
        hybrid=HybridPlant(pv, storage),
        voll=voll,
        name=f"toy{T}",
    )


@pytest.fixture
def toy_system():
    return make_toy_system()


@pytest.fixture(scope="session")
def reference():
    from tegsgrid.io import reference_dataset

    return reference_dataset()


@pytest.fixture(scope="session")
def reference_reduced(reference):
    return reference.take_hours(sampled_week_hours())


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
