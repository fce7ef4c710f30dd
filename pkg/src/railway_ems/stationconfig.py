"""Station parameters: ESS, grid exchange, PV, EV defaults, solver options."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError

DISCHARGE_CONVENTIONS = ("as-paper", "divide")


def _positive(name: str, value: float) -> float:
    if not (value > 0 and math.isfinite(value)):
        raise ConfigError(f"{name} must be positive and finite, got {value}")
    return float(value)


def _non_negative(name: str, value: float) -> float:
    if not (value >= 0 and math.isfinite(value)):
        raise ConfigError(f"{name} must be non-negative and finite, got {value}")
    return float(value)


@dataclass(frozen=True)
class EssParams:
    """Stationary battery parameters.

    `discharge_convention` selects how discharging draws down the stored
    level: "as-paper" removes eta_discharge * P * dt from the battery
    while the bus bar receives P * dt; "divide" removes P * dt /
    eta_discharge (the conventional loss model).
    """

    capacity_kwh: float
    p_charge_max_kw: float
    p_discharge_max_kw: float
    eta_charge: float = 0.95
    eta_discharge: float = 0.95
    self_discharge: float = 0.0
    soc0_fraction: float = 0.5
    soc_min_fraction: float = 0.1
    soc_max_fraction: float = 1.0
    discharge_convention: str = "as-paper"
    enforce_terminal_soc: bool = False

    def __post_init__(self):
        _positive("ess.capacity_kwh", self.capacity_kwh)
        _non_negative("ess.p_charge_max_kw", self.p_charge_max_kw)
        _non_negative("ess.p_discharge_max_kw", self.p_discharge_max_kw)
        for name in ("eta_charge", "eta_discharge"):
            v = getattr(self, name)
            if not (0.0 < v <= 1.0):
                raise ConfigError(f"ess.{name} must be in (0, 1], got {v}")
        if not (0.0 <= self.self_discharge < 1.0):
            raise ConfigError(f"ess.self_discharge must be in [0, 1), got {self.self_discharge}")
        if not (0.0 <= self.soc_min_fraction <= self.soc0_fraction
                <= self.soc_max_fraction <= 1.0):
            raise ConfigError(
                "ess SoC fractions must satisfy 0 <= min <= initial <= max <= 1, got "
                f"min={self.soc_min_fraction}, initial={self.soc0_fraction}, "
                f"max={self.soc_max_fraction}"
            )
        if self.discharge_convention not in DISCHARGE_CONVENTIONS:
            raise ConfigError(
                f"ess.discharge_convention must be one of {DISCHARGE_CONVENTIONS}, "
                f"got {self.discharge_convention!r}"
            )

    @property
    def soc0_kwh(self) -> float:
        return self.soc0_fraction * self.capacity_kwh

    @property
    def soc_min_kwh(self) -> float:
        return self.soc_min_fraction * self.capacity_kwh

    @property
    def soc_max_kwh(self) -> float:
        return self.soc_max_fraction * self.capacity_kwh


@dataclass(frozen=True)
class GridParams:
    """Main-grid exchange limits."""

    p_buy_max_kw: float
    p_sell_max_kw: float

    def __post_init__(self):
        _positive("grid.p_buy_max_kw", self.p_buy_max_kw)
        _non_negative("grid.p_sell_max_kw", self.p_sell_max_kw)


@dataclass(frozen=True)
class PvParams:
    """PV plant rating and the two radiation thresholds of the power curve."""

    rated_kw: float
    r_c_wm2: float = 150.0
    r_std_wm2: float = 1000.0

    def __post_init__(self):
        _non_negative("pv.rated_kw", self.rated_kw)
        _positive("pv.r_c_wm2", self.r_c_wm2)
        _positive("pv.r_std_wm2", self.r_std_wm2)
        if not (self.r_c_wm2 < self.r_std_wm2):
            raise ConfigError(
                f"pv thresholds must satisfy 0 < r_c < r_std, got "
                f"r_c={self.r_c_wm2}, r_std={self.r_std_wm2}"
            )


@dataclass(frozen=True)
class EvDefaults:
    """Fleet-wide charging/discharging efficiencies applied at ingestion."""

    eta_charge: float = 1.0
    eta_discharge: float = 1.0

    def __post_init__(self):
        for name in ("eta_charge", "eta_discharge"):
            v = getattr(self, name)
            if not (0.0 < v <= 1.0):
                raise ConfigError(f"ev.{name} must be in (0, 1], got {v}")


@dataclass(frozen=True)
class SolverOptions:
    """Solve controls: backend selection, MIP gap, per-scenario time limit.

    backend=None defers to the EMS_SOLVER environment variable and then
    the package default.
    """

    backend: str | None = None
    gap_tol: float = 1e-6
    time_limit_s: float = 60.0
    jobs: int = 1

    def __post_init__(self):
        _non_negative("solver.gap_tol", self.gap_tol)
        _positive("solver.time_limit_s", self.time_limit_s)
        if self.jobs < 1:
            raise ConfigError(f"solver.jobs must be >= 1, got {self.jobs}")


@dataclass(frozen=True)
class StationConfig:
    """Everything the pipeline needs besides the scenario data itself.

    `pv` may be None only when PV is disabled for every requested case;
    `pv_penetration` defers the plant rating to `penetration x peak train
    demand` of the loaded scenario set.
    """

    grid_params: GridParams
    ess: EssParams | None = None
    pv: PvParams | None = None
    pv_penetration: float | None = None
    ev: EvDefaults = field(default_factory=EvDefaults)
    solver: SolverOptions = field(default_factory=SolverOptions)

    def __post_init__(self):
        if self.pv_penetration is not None and not (0.0 <= self.pv_penetration <= 1.0):
            raise ConfigError(
                f"pv.penetration_of_peak_demand must be in [0, 1], got {self.pv_penetration}"
            )


_SECTION_KEYS = {"ess", "grid", "pv", "ev", "solver"}


def _build_section(cls, data: dict, section: str):
    try:
        return cls(**data)
    except TypeError as exc:
        raise ConfigError(f"config section {section!r}: {exc}") from exc


def parse_config(data: dict) -> StationConfig:
    """Build a StationConfig from a parsed key/value tree."""
    if not isinstance(data, dict):
        raise ConfigError("config root must be an object")
    unknown = set(data) - _SECTION_KEYS
    if unknown:
        raise ConfigError(f"unknown config section(s): {sorted(unknown)}")
    if "grid" not in data:
        raise ConfigError("config is missing the required 'grid' section")

    grid_params = _build_section(GridParams, data["grid"], "grid")
    ess = _build_section(EssParams, data["ess"], "ess") if data.get("ess") else None

    pv = None
    pv_penetration = None
    pv_data = dict(data.get("pv") or {})
    if pv_data:
        pv_penetration = pv_data.pop("penetration_of_peak_demand", None)
        if "rated_kw" in pv_data:
            pv = _build_section(PvParams, pv_data, "pv")
        elif pv_penetration is None:
            raise ConfigError("pv section needs rated_kw or penetration_of_peak_demand")
        else:
            # rating resolved later against the scenario set's peak demand
            object_pv_keys = set(pv_data) - {"r_c_wm2", "r_std_wm2"}
            if object_pv_keys:
                raise ConfigError(f"unknown pv key(s): {sorted(object_pv_keys)}")
            pv = _build_section(PvParams, {"rated_kw": 0.0, **pv_data}, "pv")

    ev = _build_section(EvDefaults, data.get("ev") or {}, "ev")
    solver = _build_section(SolverOptions, data.get("solver") or {}, "solver")
    return StationConfig(
        grid_params=grid_params, ess=ess, pv=pv,
        pv_penetration=pv_penetration, ev=ev, solver=solver,
    )


def load_config(path: str | Path) -> StationConfig:
    """Load the station config from a JSON file."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return parse_config(data)
