"""Power availability of a PV + storage delivery trace.

An hour counts as unavailable when PV output plus storage discharge falls
short of the derated power. The storage state in that hour is kept as a
diagnostic (empty vs. non-empty store) rather than as a second trigger, so
the stricter reading can still be recomputed from saved traces.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .model import HourlySeries


class SeriesMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class AvailabilityReport:
    pna: float
    paf: float
    unavailable_hours: int
    horizon_hours: int
    empty_storage_hours: int
    nonempty_storage_hours: int
    derated_power_mw: float
    unavailable_mask: np.ndarray

    @property
    def cause_breakdown(self) -> dict[str, int]:
        return {
            "pv_shortfall_with_empty_storage": self.empty_storage_hours,
            "pv_shortfall_with_nonempty_storage": self.nonempty_storage_hours,
        }


def _values(x) -> np.ndarray:
    return np.asarray(x.values if isinstance(x, HourlySeries) else x, dtype=float)


def compute_pna(pv_gen, discharge, soc, derated_power: float, tol: float = 1e-6, tol_soc: float = 1e-6) -> AvailabilityReport:
    pv = _values(pv_gen)
    dis = _values(discharge)
    s = _values(soc)
    if not (pv.shape == dis.shape == s.shape):
        raise SeriesMismatchError(f"series lengths differ: pv {pv.size}, discharge {dis.size}, soc {s.size}")
    horizon = pv.size
    short = pv + dis < derated_power - tol
    n_short = int(short.sum())
    empty = int((short & (s <= tol_soc)).sum())
    pna = n_short / horizon if horizon else 0.0
    return AvailabilityReport(
        pna=pna,
        paf=1.0 - pna,
        unavailable_hours=n_short,
        horizon_hours=horizon,
        empty_storage_hours=empty,
        nonempty_storage_hours=n_short - empty,
        derated_power_mw=float(derated_power),
        unavailable_mask=short,
    )


def availability_of(result, derated_power: float, **kw) -> AvailabilityReport:
    """``compute_pna`` on anything with ``pv_gen``, ``discharge`` and ``soc`` arrays."""
    return compute_pna(result.pv_gen, result.discharge, result.soc, derated_power, **kw)


class CapacityFactorWarning(UserWarning):
    pass


def capacity_factor(output, rated_mw: float) -> float:
    """Mean output over rated power, clamped to 1 with a warning."""
    if not rated_mw > 0:
        raise ValueError(f"rated power must be positive, got {rated_mw!r}")
    vals = _values(output)
    if vals.size == 0:
        return 0.0
    cf = float(vals.mean()) / rated_mw
    if cf > 1.0:
        warnings.warn(f"capacity factor {cf:.4f} exceeds 1; reported as 1.0", CapacityFactorWarning, stacklevel=2)
        return 1.0
    return cf
