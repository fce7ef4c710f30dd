"""Scenario-based daily energy management for electrified railway stations.

Coordinates grid purchases/sales, a stationary battery fed by train
regenerative braking, PV generation, train demand, and electric-bus
charging through a per-scenario MILP that minimizes the expected daily
operating cost.
"""

from importlib import resources as _resources
from pathlib import Path

from .backends import BACKENDS, SolverBackend, make_backend, solve_model
from .ems import (CaseFlags, DecisionSchedule, EmsProblem, EmsSolution,
                  build_problem, emit_milp, solve, validate_solution)
from .errors import (ConfigError, DataError, EmsError, GapError,
                     InfeasibleError, SolverError)
from .ev import VehicleState, ev_demand_profile, plugged_in_set, step_vehicle
from .fleet import Dwell, FleetSchedule, Vehicle, load_fleet_csv
from .instances import load_instance, problem_from_dict
from .oracle import OracleResult, brute_force_oracle
from .profiles import Profile, ingest_profile
from .pv import pv_power, pv_profile, size_pv_from_penetration
from .runner import CaseReport, CaseResult, run_ablation, run_case, write_report
from .scenarios import (Scenario, ScenarioSet, load_scenario_dir,
                        load_scenario_set, validate_scenario_set)
from .stationconfig import (EssParams, EvDefaults, GridParams, PvParams,
                            SolverOptions, StationConfig, load_config)
from .timegrid import TimeGrid

__version__ = "0.1.0"


def bundled_data_dir() -> Path:
    """Directory with the example dataset shipped inside the package."""
    return Path(_resources.files(__package__) / "data")


__all__ = [
    "BACKENDS", "SolverBackend", "make_backend", "solve_model",
    "CaseFlags", "DecisionSchedule", "EmsProblem", "EmsSolution",
    "build_problem", "emit_milp", "solve", "validate_solution",
    "ConfigError", "DataError", "EmsError", "GapError", "InfeasibleError",
    "SolverError",
    "VehicleState", "ev_demand_profile", "plugged_in_set", "step_vehicle",
    "Dwell", "FleetSchedule", "Vehicle", "load_fleet_csv",
    "load_instance", "problem_from_dict",
    "OracleResult", "brute_force_oracle",
    "Profile", "ingest_profile",
    "pv_power", "pv_profile", "size_pv_from_penetration",
    "CaseReport", "CaseResult", "run_ablation", "run_case", "write_report",
    "Scenario", "ScenarioSet", "load_scenario_dir", "load_scenario_set",
    "validate_scenario_set",
    "EssParams", "EvDefaults", "GridParams", "PvParams", "SolverOptions",
    "StationConfig", "load_config",
    "TimeGrid",
    "bundled_data_dir",
]
