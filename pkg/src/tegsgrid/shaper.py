"""Greedy baseload shaping of a PV profile with storage.

Each hour the plant tries to deliver exactly the derated power: any PV
surplus charges the store (up to the charge rating and remaining headroom,
the rest is curtailed) and any deficit is covered by discharge as far as
the discharge rating and the stored energy allow. No look-ahead.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .metrics import AvailabilityReport, compute_pna
from .model import HourlySeries, StorageSpec


@dataclass(frozen=True)
class ShapedOutput:
    pv: np.ndarray
    delivered: np.ndarray
    charge: np.ndarray
    discharge: np.ndarray
    soc: np.ndarray
    curtailed: np.ndarray

    @property
    def pv_gen(self) -> np.ndarray:
        # PV that reaches the grid directly (or the store)
        return self.pv - self.curtailed

    def availability(self, derated_power: float) -> AvailabilityReport:
        # PV sent straight to the grid is what is left after curtailment and charging
        return compute_pna(self.delivered - self.discharge, self.discharge, self.soc, derated_power)


def shape_baseload(pv_profile, storage: StorageSpec, derated_power: float) -> ShapedOutput:
    pv = np.asarray(pv_profile.values if isinstance(pv_profile, HourlySeries) else pv_profile, dtype=float)
    if derated_power < 0:
        raise ValueError("derated power must be non-negative")
    if (pv < 0).any():
        raise ValueError("PV profile must be non-negative")
    T = pv.size
    delivered = np.zeros(T)
    charge = np.zeros(T)
    discharge = np.zeros(T)
    soc = np.zeros(T)
    curtailed = np.zeros(T)
    eta_c, eta_d = storage.charge_efficiency, storage.discharge_efficiency
    cap = storage.energy_capacity_mwh
    level = storage.initial_soc_mwh
    for t in range(T):
        surplus = pv[t] - derated_power
        if surplus > 0:
            c = min(surplus, storage.charge_capacity_mw, (cap - level) / eta_c)
            c = max(c, 0.0)
            charge[t] = c
            curtailed[t] = surplus - c
            delivered[t] = derated_power
            level = min(level + eta_c * c, cap)
        else:
            d = min(-surplus, storage.discharge_capacity_mw, level * eta_d)
            discharge[t] = d
            delivered[t] = pv[t] + d
            level = max(level - d / eta_d, 0.0)
        soc[t] = level
    return ShapedOutput(pv=pv, delivered=delivered, charge=charge, discharge=discharge, soc=soc, curtailed=curtailed)
