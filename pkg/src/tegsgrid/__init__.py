"""Hourly grid dispatch with a PV + thermal-storage hybrid plant, and the
availability of that plant against a derated delivery threshold."""

from .dispatch import DispatchOptions, DispatchResult, run_dispatch
from .io import load_system, reference_dataset, save_system
from .metrics import AvailabilityReport, compute_pna
from .model import (
    HourlySeries,
    HybridPlant,
    PowerSystem,
    ScenarioConfig,
    StorageSpec,
    ThermalGenerator,
    VreResource,
    paper_scenario_grid,
    validate_system,
)
from .runner import RunnerOptions, ScenarioOutcome, run_sweep
from .shaper import shape_baseload

__version__ = "0.1.0"

__all__ = [
    "AvailabilityReport",
    "DispatchOptions",
    "DispatchResult",
    "HourlySeries",
    "HybridPlant",
    "PowerSystem",
    "RunnerOptions",
    "ScenarioConfig",
    "ScenarioOutcome",
    "StorageSpec",
    "ThermalGenerator",
    "VreResource",
    "compute_pna",
    "load_system",
    "paper_scenario_grid",
    "reference_dataset",
    "run_dispatch",
    "run_sweep",
    "save_system",
    "shape_baseload",
    "validate_system",
]
