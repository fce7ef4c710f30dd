"""Electric-bus charging demand at the station.

Per-vehicle battery levels are simulated step by step: a dwelling bus
charges at its nominal power until full (the final partial step draws
exactly the remaining energy, so station demand never over-counts), a
bus between two station visits consumes its route energy, and a bus
before its first arrival or after its last departure is off duty and
holds its level. The aggregate station demand at each step is the sum of
the drawn charging powers of the plugged-in set.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np

from .errors import DataError
from .fleet import FleetSchedule, Vehicle
from .profiles import Profile
from .timegrid import TimeGrid


class Location(enum.Enum):
    AT_STATION = "at-station"
    EN_ROUTE = "en-route"
    IDLE = "idle"


@dataclass(frozen=True)
class VehicleState:
    """Battery level at the start of a step plus the step's whereabouts."""

    soc_kwh: float
    location: Location

    def validate(self, vehicle: Vehicle) -> None:
        if not (0.0 <= self.soc_kwh <= vehicle.battery_capacity_kwh):
            raise DataError(
                f"{vehicle.vehicle_id}: SoC {self.soc_kwh} outside "
                f"[0, {vehicle.battery_capacity_kwh}]"
            )


def vehicle_location(vehicle: Vehicle, grid: TimeGrid, t: int) -> Location:
    """Where the vehicle is during step t, from its rounded dwell windows."""
    windows = vehicle.dwell_windows(grid)
    if not windows:
        return Location.IDLE
    if t < windows[0][0] or t >= windows[-1][1]:
        return Location.IDLE
    for a, d in windows:
        if a <= t < d:
            return Location.AT_STATION
    return Location.EN_ROUTE


def charge_draw_kw(state: VehicleState, vehicle: Vehicle, dt_hours: float) -> float:
    """Station power the vehicle draws this step (0 when not charging).

    Full nominal power at interior steps; the step that tops the battery
    off draws remaining_kwh / (eta_charge * dt) instead.
    """
    if state.location is not Location.AT_STATION:
        return 0.0
    remaining = vehicle.battery_capacity_kwh - state.soc_kwh
    if remaining <= 0.0:
        return 0.0
    full_gain = vehicle.eta_charge * vehicle.nominal_charge_kw * dt_hours
    if full_gain <= remaining:
        return vehicle.nominal_charge_kw
    return remaining / (vehicle.eta_charge * dt_hours)


def step_vehicle(state: VehicleState, vehicle: Vehicle, grid: TimeGrid,
                 t: int) -> VehicleState:
    """Advance one step: charge while dwelling, consume while en route.

    `state` holds the SoC at the start of step t and the location during
    it; the result holds the SoC at the start of step t+1 and the
    location during t+1 (idle once the grid ends).
    """
    state.validate(vehicle)
    soc = state.soc_kwh
    if state.location is Location.AT_STATION:
        room = vehicle.battery_capacity_kwh - soc
        if room > 0.0:
            full_gain = vehicle.eta_charge * vehicle.nominal_charge_kw * grid.dt_hours
            # the topping-off step lands exactly on capacity
            soc = soc + full_gain if full_gain <= room else vehicle.battery_capacity_kwh
    elif state.location is Location.EN_ROUTE:
        burn = vehicle.eta_discharge * vehicle.consumption_kwh_per_min * grid.dt_minutes
        soc = max(0.0, soc - burn)
    next_location = (
        vehicle_location(vehicle, grid, t + 1) if t + 1 < grid.steps else Location.IDLE
    )
    return VehicleState(soc_kwh=soc, location=next_location)


def initial_states(fleet: FleetSchedule, grid: TimeGrid) -> dict[str, VehicleState]:
    return {
        v.vehicle_id: VehicleState(
            soc_kwh=v.start_soc_kwh, location=vehicle_location(v, grid, 0)
        )
        for v in fleet
    }


def plugged_in_set(fleet: FleetSchedule, states: dict[str, VehicleState],
                   grid: TimeGrid, t: int) -> set[str]:
    """Vehicles dwelling at step t whose battery is strictly below capacity.

    Arrival steps are included, departure steps excluded (half-open
    dwell windows); `states` must be synchronized to step t.
    """
    plugged = set()
    for v in fleet:
        if vehicle_location(v, grid, t) is not Location.AT_STATION:
            continue
        if states[v.vehicle_id].soc_kwh < v.battery_capacity_kwh:
            plugged.add(v.vehicle_id)
    return plugged


def ev_demand_profile(fleet: FleetSchedule, grid: TimeGrid) -> Profile:
    """Aggregate station EV charging demand, one deterministic pass."""
    states = initial_states(fleet, grid)
    by_id = {v.vehicle_id: v for v in fleet}
    demand = np.zeros(grid.steps)
    for t in range(grid.steps):
        plugged = plugged_in_set(fleet, states, grid, t)
        # accumulate in fleet order so the sum is reproducible bit for bit
        for v in fleet:
            if v.vehicle_id in plugged:
                demand[t] += charge_draw_kw(states[v.vehicle_id], v, grid.dt_hours)
        states = {
            vid: step_vehicle(state, by_id[vid], grid, t)
            for vid, state in states.items()
        }
    return Profile(grid=grid, values=demand, kind="ev_demand")
