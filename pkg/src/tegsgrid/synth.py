"""Seeded synthetic hourly profiles for the stylized reference zone.

Hour 0 is 00:00 local standard time on January 1st of a 365-day year.
"""

from __future__ import annotations

import numpy as np

from .model import HOURS_PER_YEAR

LATITUDE_DEG = 42.4


def _hour_grid(horizon: int = HOURS_PER_YEAR):
    t = np.arange(horizon)
    day = t // 24
    hour = t % 24
    return t, day, hour


def solar_elevation(horizon: int = HOURS_PER_YEAR, latitude_deg: float = LATITUDE_DEG) -> np.ndarray:
    """Sine of the solar elevation at mid-hour (negative below the horizon)."""
    _, day, hour = _hour_grid(horizon)
    decl = np.deg2rad(23.44) * np.sin(2 * np.pi * (284 + day + 1) / 365.0)
    ha = np.deg2rad(15.0 * (hour + 0.5 - 12.0))
    lat = np.deg2rad(latitude_deg)
    return np.sin(lat) * np.sin(decl) + np.cos(lat) * np.cos(decl) * np.cos(ha)


def _daily_ar1(rng, days: int, phi: float, sigma: float) -> np.ndarray:
    x = np.zeros(days)
    for d in range(1, days):
        x[d] = phi * x[d - 1] + sigma * rng.standard_normal()
    return x


def pv_capacity_factor(
    seed: int,
    target_cf: float = 0.24,
    inverter_loading_ratio: float = 1.3,
    horizon: int = HOURS_PER_YEAR,
) -> np.ndarray:
    """Tracking-PV profile: clear-sky envelope x seasonal amplitude x cloud
    attenuation, scaled by the DC/AC ratio and clipped at the AC rating, then
    rescaled (by bisection on the DC gain) to the target mean."""
    rng = np.random.default_rng(seed)
    sin_el = solar_elevation(horizon)
    days = horizon // 24 + 1
    # single-axis tracking keeps output high away from solar noon
    clear = np.clip(sin_el, 0.0, None) ** 0.35 * (sin_el > 0.02)
    _, day, _ = _hour_grid(horizon)
    seasonal = 0.80 + 0.20 * np.cos(2 * np.pi * (day - 172) / 365.0)
    weather = _daily_ar1(rng, days, phi=0.55, sigma=1.0)
    # daily clearness in [0.3, 1]; overcast spells persist for a few days
    clearness = 0.3 + 0.7 / (1.0 + np.exp(-(weather + 1.1) * 1.6))
    hourly = np.clip(1.0 + 0.12 * rng.standard_normal(horizon), 0.6, 1.15)
    raw = clear * seasonal * clearness[day] * hourly * inverter_loading_ratio

    lo, hi = 0.05, 10.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if np.minimum(raw * mid, 1.0).mean() < target_cf:
            lo = mid
        else:
            hi = mid
    return np.minimum(raw * 0.5 * (lo + hi), 1.0)


def wind_capacity_factor(seed: int, mean_cf: float = 0.32, horizon: int = HOURS_PER_YEAR) -> np.ndarray:
    rng = np.random.default_rng(seed)
    t, day, hour = _hour_grid(horizon)
    x = np.zeros(horizon)
    noise = rng.standard_normal(horizon)
    for i in range(1, horizon):
        x[i] = 0.97 * x[i - 1] + 0.25 * noise[i]
    seasonal = 0.12 * np.cos(2 * np.pi * (day - 15) / 365.0)
    diurnal = 0.04 * np.cos(2 * np.pi * (hour - 2) / 24.0)
    raw = 1.0 / (1.0 + np.exp(-(x + seasonal * 6 + diurnal * 6 - 0.6)))
    cf = np.clip(raw, 0.0, 1.0)
    # shift toward the target mean without leaving [0, 1]
    lo, hi = -5.0, 5.0
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        trial = 1.0 / (1.0 + np.exp(-(x + seasonal * 6 + diurnal * 6 - 0.6 + mid)))
        if trial.mean() < mean_cf:
            lo = mid
        else:
            hi = mid
    return 1.0 / (1.0 + np.exp(-(x + seasonal * 6 + diurnal * 6 - 0.6 + 0.5 * (lo + hi))))


# Relative load by hour of day: overnight heating and EV charging, flat daytime,
# evening peak. Behind-the-meter PV is subtracted separately.
DIURNAL_SHAPE = np.array([
    0.03, 0.03, 0.03, 0.03, 0.02, 0.00, -0.01, 0.00, 0.00, 0.00, 0.00, 0.00,
    0.00, 0.00, 0.00, 0.02, 0.06, 0.10, 0.10, 0.09, 0.07, 0.05, 0.04, 0.03,
])


def demand_profile(
    seed: int,
    mean_mw: float,
    btm_pv_mw: float = 0.0,
    btm_cf=None,
    seasonal_amplitude: float = 0.08,
    noise: float = 0.015,
    horizon: int = HOURS_PER_YEAR,
) -> np.ndarray:
    """Grid-served load: a gross profile (winter and summer peaks, weekend dip,
    bounded noise) minus behind-the-meter PV output ``btm_pv_mw * btm_cf``."""
    rng = np.random.default_rng(seed)
    _, day, hour = _hour_grid(horizon)
    season = 0.6 * np.cos(2 * np.pi * (day - 15) / 365.0) ** 2 + 0.4 * np.cos(2 * np.pi * (day - 200) / 365.0)
    season = season - season.mean()
    weekend = np.where((day % 7) >= 5, -0.04, 0.0)
    eps = np.clip(rng.normal(0.0, noise, horizon), -2.5 * noise, 2.5 * noise)
    gross = mean_mw * (
        1.0 + seasonal_amplitude * season / np.abs(season).max() + DIURNAL_SHAPE[hour] + weekend + eps
    )
    if btm_pv_mw:
        gross = gross - btm_pv_mw * np.asarray(btm_cf, dtype=float)
    return gross
