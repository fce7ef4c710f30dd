"""Electric-bus fleet: per-vehicle dwell schedules and CSV ingestion.

Fleet CSV schema (one row per dwell):
    vehicle_id,capacity_kwh,charge_kw,consumption_kwh_per_min,arrival,departure
Static attributes must be identical across all rows of one vehicle.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path

import pandas as pd

from .errors import DataError
from .timegrid import TimeGrid

FLEET_COLUMNS = [
    "vehicle_id", "capacity_kwh", "charge_kw",
    "consumption_kwh_per_min", "arrival", "departure",
]


@dataclass(frozen=True)
class Dwell:
    """One stay at the station; arrival inclusive, departure exclusive."""

    arrival: datetime
    departure: datetime

    def __post_init__(self):
        if not (self.arrival < self.departure):
            raise DataError(
                f"dwell arrival {self.arrival.isoformat()} must precede "
                f"departure {self.departure.isoformat()}"
            )


@dataclass(frozen=True)
class Vehicle:
    """One bus: battery, nominal charging power, route consumption, dwells."""

    vehicle_id: str
    battery_capacity_kwh: float
    nominal_charge_kw: float
    consumption_kwh_per_min: float
    dwells: tuple[Dwell, ...]
    eta_charge: float = 1.0
    eta_discharge: float = 1.0
    initial_soc_kwh: float | None = None  # None = starts the day full

    def __post_init__(self):
        if self.battery_capacity_kwh <= 0:
            raise DataError(f"{self.vehicle_id}: battery capacity must be positive")
        if self.nominal_charge_kw <= 0:
            raise DataError(f"{self.vehicle_id}: nominal charging power must be positive")
        if self.consumption_kwh_per_min < 0:
            raise DataError(f"{self.vehicle_id}: route consumption must be >= 0")
        for name in ("eta_charge", "eta_discharge"):
            v = getattr(self, name)
            if not (0.0 < v <= 1.0):
                raise DataError(f"{self.vehicle_id}: {name} must be in (0, 1]")
        ordered = tuple(sorted(self.dwells, key=lambda d: d.arrival))
        for a, b in zip(ordered, ordered[1:]):
            if b.arrival < a.departure:
                raise DataError(
                    f"{self.vehicle_id}: overlapping dwells "
                    f"[{a.arrival.isoformat()}..{a.departure.isoformat()}) and "
                    f"[{b.arrival.isoformat()}..{b.departure.isoformat()})"
                )
        object.__setattr__(self, "dwells", ordered)
        if self.initial_soc_kwh is not None and not (
            0.0 <= self.initial_soc_kwh <= self.battery_capacity_kwh
        ):
            raise DataError(f"{self.vehicle_id}: initial SoC outside [0, capacity]")

    @property
    def start_soc_kwh(self) -> float:
        return (self.battery_capacity_kwh if self.initial_soc_kwh is None
                else self.initial_soc_kwh)

    def dwell_windows(self, grid: TimeGrid) -> tuple[tuple[int, int], ...]:
        """Dwells as step-index windows [a, d), rounded outward to the grid.

        Arrival floors and departure ceils, clipped to the grid span;
        windows that touch or overlap after rounding merge into one.
        """
        windows: list[list[int]] = []
        for dwell in self.dwells:
            if dwell.departure <= grid.start or dwell.arrival >= grid.end:
                raise DataError(
                    f"{self.vehicle_id}: dwell "
                    f"[{dwell.arrival.isoformat()}..{dwell.departure.isoformat()}) "
                    f"lies outside the day [{grid.start.isoformat()}..{grid.end.isoformat()})"
                )
            a = max(0, grid.floor_index(dwell.arrival))
            d = min(grid.steps, grid.ceil_index(dwell.departure))
            if windows and a <= windows[-1][1]:
                windows[-1][1] = max(windows[-1][1], d)
            else:
                windows.append([a, d])
        return tuple((a, d) for a, d in windows)


@dataclass(frozen=True)
class FleetSchedule:
    """All vehicles serving the station on one day."""

    vehicles: tuple[Vehicle, ...]

    def __post_init__(self):
        object.__setattr__(self, "vehicles", tuple(self.vehicles))
        seen: set[str] = set()
        for v in self.vehicles:
            if v.vehicle_id in seen:
                raise DataError(f"duplicate vehicle id {v.vehicle_id!r}")
            seen.add(v.vehicle_id)

    def __iter__(self):
        return iter(self.vehicles)

    def __len__(self) -> int:
        return len(self.vehicles)


def load_fleet_csv(path: str | Path,
                   eta_charge: float = 1.0,
                   eta_discharge: float = 1.0) -> FleetSchedule:
    """Read the fleet CSV; one row per dwell, grouped by vehicle_id."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"fleet file not found: {path}")
    frame = pd.read_csv(path)
    missing = [c for c in FLEET_COLUMNS if c not in frame.columns]
    if missing:
        raise DataError(f"{path}: missing column(s) {missing}")

    vehicles: list[Vehicle] = []
    for vid, rows in frame.groupby("vehicle_id", sort=True):
        statics = rows[["capacity_kwh", "charge_kw", "consumption_kwh_per_min"]]
        if (statics.nunique() > 1).any():
            raise DataError(
                f"{path}: vehicle {vid!r} has inconsistent static attributes across rows"
            )
        try:
            arrivals = pd.to_datetime(rows["arrival"], format="ISO8601")
            departures = pd.to_datetime(rows["departure"], format="ISO8601")
        except (ValueError, TypeError) as exc:
            raise DataError(f"{path}: vehicle {vid!r}: bad timestamp ({exc})") from exc
        dwells = tuple(
            Dwell(arrival=a.to_pydatetime(), departure=d.to_pydatetime())
            for a, d in zip(arrivals, departures)
        )
        vehicles.append(Vehicle(
            vehicle_id=str(vid),
            battery_capacity_kwh=float(statics.iloc[0, 0]),
            nominal_charge_kw=float(statics.iloc[0, 1]),
            consumption_kwh_per_min=float(statics.iloc[0, 2]),
            dwells=dwells,
            eta_charge=eta_charge,
            eta_discharge=eta_discharge,
        ))
    return FleetSchedule(vehicles=tuple(vehicles))
