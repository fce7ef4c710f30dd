#!/usr/bin/env python3
"""Regenerate the bundled example dataset under src/railway_ems/data/.

Two synthetic days are produced: a clear summer day (radiation peaking
near the standard-environment level) and an autumn day with roughly half
the peak radiation and a shorter window. Demand, braking power, and
radiation are written at 15-min resolution, day-ahead prices hourly.
Everything is seeded, so reruns are byte-identical.
"""

from __future__ import annotations

import json
from datetime import datetime, timedelta
from pathlib import Path

import numpy as np

DATA_DIR = Path(__file__).resolve().parents[1] / "src" / "railway_ems" / "data"

STEPS = 96
DT_HOURS = 0.25

# scenarios of one set share a literal time grid, so every bundled day
# sits on the same template date; the meta id carries the season
DAY_START = datetime(2024, 6, 17)

HOURLY_PRICE_SUMMER = [
    0.055, 0.050, 0.047, 0.045, 0.046, 0.052, 0.075, 0.110,
    0.140, 0.125, 0.100, 0.090, 0.085, 0.082, 0.085, 0.095,
    0.105, 0.125, 0.150, 0.160, 0.145, 0.110, 0.085, 0.065,
]
HOURLY_PRICE_AUTUMN = [
    0.065, 0.060, 0.058, 0.056, 0.057, 0.064, 0.090, 0.128,
    0.152, 0.138, 0.112, 0.100, 0.095, 0.093, 0.096, 0.108,
    0.122, 0.145, 0.168, 0.172, 0.150, 0.118, 0.092, 0.074,
]


def hours() -> np.ndarray:
    return np.arange(STEPS) * DT_HOURS


def train_demand(rng: np.random.Generator) -> np.ndarray:
    h = hours()
    base = 350.0
    morning = 1450.0 * np.exp(-((h - 8.0) / 1.8) ** 2)
    midday = 700.0 * np.exp(-((h - 13.0) / 3.0) ** 2)
    evening = 1150.0 * np.exp(-((h - 18.2) / 1.6) ** 2)
    noise = rng.normal(0.0, 35.0, STEPS)
    demand = np.clip(base + morning + midday + evening + noise, 0.0, None)
    return np.round(demand, 3)


def rb_available(rng: np.random.Generator) -> np.ndarray:
    """Braking-power bursts while trains are running (05:00-23:00)."""
    h = hours()
    service = (h >= 5.0) & (h < 23.0)
    bursts = rng.uniform(0.0, 480.0, STEPS) * (rng.random(STEPS) < 0.35)
    return np.round(np.where(service, bursts, 0.0), 3)


def radiation(rng: np.random.Generator, peak: float, rise: float,
              set_: float) -> np.ndarray:
    h = hours()
    span = set_ - rise
    shape = np.sin(np.pi * np.clip((h - rise) / span, 0.0, 1.0)) ** 1.5
    shape[(h < rise) | (h > set_)] = 0.0
    wiggle = 1.0 + rng.normal(0.0, 0.03, STEPS)
    return np.round(np.clip(peak * shape * wiggle, 0.0, None), 3)


def write_profile(path: Path, start: datetime, step_minutes: int,
                  values: np.ndarray) -> None:
    lines = ["timestamp,value"]
    for k, v in enumerate(values):
        ts = start + timedelta(minutes=step_minutes * k)
        lines.append(f"{ts.isoformat()},{v:g}")
    path.write_text("\n".join(lines) + "\n")


def write_day(name: str, start: datetime, rng_seed: int, rad_peak: float,
              rad_rise: float, rad_set: float, hourly_price) -> None:
    rng = np.random.default_rng(rng_seed)
    day = DATA_DIR / "days" / name
    day.mkdir(parents=True, exist_ok=True)
    write_profile(day / "train_demand.csv", start, 15, train_demand(rng))
    write_profile(day / "rb_available.csv", start, 15, rb_available(rng))
    write_profile(day / "radiation.csv", start, 15,
                  radiation(rng, rad_peak, rad_rise, rad_set))
    write_profile(day / "price.csv", start, 60, np.asarray(hourly_price))
    (day / "scenario.meta").write_text(json.dumps({"id": name}) + "\n")


def write_fleet() -> None:
    rows = ["vehicle_id,capacity_kwh,charge_kw,consumption_kwh_per_min,arrival,departure"]
    dwells = {
        "bus-01": [("06:00", "06:30"), ("09:15", "09:40"), ("13:00", "13:30"),
                   ("17:45", "18:15"), ("21:30", "22:00")],
        "bus-02": [("06:45", "07:10"), ("10:30", "11:00"), ("15:00", "15:25"),
                   ("19:00", "19:30")],
        "bus-03": [("07:30", "08:00"), ("12:00", "12:30"), ("16:30", "17:00"),
                   ("20:15", "20:45")],
        "bus-04": [("08:15", "08:40"), ("11:15", "11:45"), ("14:15", "14:45"),
                   ("18:30", "19:00"), ("22:15", "22:45")],
    }
    day = DAY_START.date().isoformat()
    for vid, windows in dwells.items():
        for arr, dep in windows:
            rows.append(f"{vid},280,300,0.87,{day}T{arr}:00,{day}T{dep}:00")
    (DATA_DIR / "fleet.csv").write_text("\n".join(rows) + "\n")


def write_config() -> None:
    config = {
        "ess": {
            "capacity_kwh": 1000.0,
            "p_charge_max_kw": 1000.0,
            "p_discharge_max_kw": 1000.0,
            "eta_charge": 0.95,
            "eta_discharge": 0.95,
            "self_discharge": 0.0,
            "soc0_fraction": 0.5,
            "soc_min_fraction": 0.1,
            "soc_max_fraction": 1.0,
        },
        "grid": {"p_buy_max_kw": 6000.0, "p_sell_max_kw": 6000.0},
        "pv": {"penetration_of_peak_demand": 0.2, "r_c_wm2": 150.0, "r_std_wm2": 1000.0},
        "ev": {"eta_charge": 1.0, "eta_discharge": 1.0},
        "solver": {"gap_tol": 1e-06, "time_limit_s": 60.0},
    }
    (DATA_DIR / "station.json").write_text(json.dumps(config, indent=2) + "\n")


def write_tiny_instance() -> None:
    instance = {
        "id": "tiny",
        "dt_hours": 1.0,
        "demand_kw": [100.0, 200.0],
        "rb_available_kw": [50.0, 0.0],
        "pv_kw": [0.0, 30.0],
        "buy_price_eur_kwh": [0.05, 0.20],
        "grid": {"p_buy_max_kw": 1000.0, "p_sell_max_kw": 1000.0},
        "ess": {
            "capacity_kwh": 100.0,
            "p_charge_max_kw": 100.0,
            "p_discharge_max_kw": 100.0,
            "eta_charge": 0.95,
            "eta_discharge": 0.95,
            "soc0_fraction": 0.5,
            "soc_min_fraction": 0.1,
            "soc_max_fraction": 1.0,
        },
    }
    (DATA_DIR / "tiny_instance.json").write_text(json.dumps(instance, indent=2) + "\n")


def main() -> None:
    DATA_DIR.mkdir(parents=True, exist_ok=True)
    write_day("summer_day", DAY_START, rng_seed=20240617,
              rad_peak=1020.0, rad_rise=5.0, rad_set=20.0,
              hourly_price=HOURLY_PRICE_SUMMER)
    write_day("autumn_day", DAY_START, rng_seed=20241014,
              rad_peak=470.0, rad_rise=7.5, rad_set=17.5,
              hourly_price=HOURLY_PRICE_AUTUMN)
    write_fleet()
    write_config()
    write_tiny_instance()
    print(f"bundled data written under {DATA_DIR}")


if __name__ == "__main__":
    main()
