"""Self-contained single-scenario instance files (JSON) for small studies.

Schema: dt_hours plus equally long per-step arrays demand_kw,
rb_available_kw, buy_price_eur_kwh (sell_price_eur_kwh optional,
defaults to buy), optional pv_kw and ev_demand_kw, a grid section, and
an optional ess section. PV power is given directly, bypassing the
radiation model, which keeps instances exact for hand-checking.
"""

from __future__ import annotations

import json
from datetime import datetime
from pathlib import Path

import numpy as np

from .ems import CaseFlags, EmsProblem
from .errors import DataError
from .profiles import Profile
from .scenarios import Scenario, ScenarioSet
from .stationconfig import EssParams, GridParams
from .timegrid import TimeGrid

_INSTANCE_EPOCH = datetime(2024, 1, 1)


def problem_from_dict(data: dict) -> EmsProblem:
    """Build a single-scenario EmsProblem from a parsed instance tree."""
    try:
        dt_hours = float(data["dt_hours"])
        demand = np.asarray(data["demand_kw"], dtype=float)
        grid_params = GridParams(**data["grid"])
    except KeyError as exc:
        raise DataError(f"instance is missing required key {exc}") from exc

    T = len(demand)
    grid = TimeGrid(start=_INSTANCE_EPOCH, steps=T, dt_hours=dt_hours)

    def profile(key: str, kind: str, default=None) -> Profile:
        raw = data.get(key, default)
        if raw is None:
            raise DataError(f"instance is missing required key '{key}'")
        arr = np.asarray(raw, dtype=float)
        if len(arr) != T:
            raise DataError(f"instance key '{key}' has {len(arr)} values, expected {T}")
        return Profile(grid=grid, values=arr, kind=kind)

    buy = profile("buy_price_eur_kwh", "price")
    sell = (profile("sell_price_eur_kwh", "price")
            if "sell_price_eur_kwh" in data else buy)
    scenario = Scenario(
        id=str(data.get("id", "instance")),
        probability=1.0,
        train_demand=profile("demand_kw", "demand"),
        rb_available=profile("rb_available_kw", "rb", default=[0.0] * T),
        radiation=Profile(grid=grid, values=np.zeros(T), kind="radiation"),
        buy_price=buy,
        sell_price=sell,
    )

    ess = EssParams(**data["ess"]) if data.get("ess") else None
    pv_power = None
    if data.get("pv_kw") is not None:
        pv_power = {scenario.id: profile("pv_kw", "pv_power")}
    flags = CaseFlags(ess_enabled=ess is not None, pv_enabled=pv_power is not None)

    return EmsProblem(
        scenarios=ScenarioSet(scenarios=(scenario,)),
        grid_params=grid_params,
        flags=flags,
        ev_demand=profile("ev_demand_kw", "ev_demand", default=[0.0] * T),
        ess=ess,
        pv_power=pv_power,
    )


def load_instance(path: str | Path) -> EmsProblem:
    path = Path(path)
    if not path.exists():
        raise DataError(f"instance file not found: {path}")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise DataError(f"{path}: expected a JSON object")
    return problem_from_dict(data)
