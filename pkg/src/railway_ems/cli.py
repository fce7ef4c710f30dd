"""Command-line entry point.

Subcommands:
  run       execute one case or the full four-case ablation and write reports
  validate  check scenario/fleet data and list every violation
  oracle    compare the MILP answer against brute-force enumeration (tiny T)

Exit codes: 0 success, 2 configuration error, 3 data error,
4 infeasible problem, 5 solver failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .ems import solve
from .errors import ConfigError, DataError, EmsError, InfeasibleError, SolverError
from .fleet import load_fleet_csv
from .instances import load_instance
from .oracle import MAX_STEPS, brute_force_oracle
from .runner import ALL_CASES, format_table, run_ablation, write_report
from .scenarios import load_scenario_set, validate_scenario_set
from .stationconfig import SolverOptions, StationConfig, load_config
from .timegrid import TimeGrid

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_INFEASIBLE = 4
EXIT_SOLVER = 5


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="railway-ems",
        description="Scenario-based daily energy management for an electrified "
                    "railway station (grid exchange, storage fed by braking "
                    "power, PV, train and electric-bus demand).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="solve one case or the full ablation")
    run.add_argument("--config", required=True, help="station config JSON")
    run.add_argument("--scenarios", required=True, help="scenario directory root")
    run.add_argument("--fleet", help="fleet CSV (omit for no EV demand)")
    run.add_argument("--case", default="all",
                     help="1, 2, 3, 4, or 'all' (default: all)")
    run.add_argument("--dt-min", type=float, default=15.0,
                     help="grid resolution in minutes (default: 15)")
    run.add_argument("--gap", type=float, help="relative MIP gap tolerance")
    run.add_argument("--time-limit-s", type=float, help="per-scenario time limit")
    run.add_argument("--jobs", type=int, help="parallel scenario solves")
    run.add_argument("--out", default="ems_out", help="output directory")
    run.add_argument("--keep-going", action="store_true",
                     help="continue the ablation past a failing case")
    run.add_argument("--no-timestamp", action="store_true",
                     help="omit the generated_at field for byte-identical reruns")

    val = sub.add_parser("validate", help="validate data without solving")
    val.add_argument("--config", required=True)
    val.add_argument("--scenarios", required=True)
    val.add_argument("--fleet")
    val.add_argument("--dt-min", type=float, default=15.0)

    orc = sub.add_parser("oracle", help="brute-force cross-check on a tiny instance")
    orc.add_argument("--instance", required=True,
                     help=f"instance JSON with at most {MAX_STEPS} steps")
    orc.add_argument("--gap", type=float, default=1e-6)
    return parser


def _parse_cases(text: str) -> tuple[int, ...]:
    if text == "all":
        return ALL_CASES
    try:
        case = int(text)
    except ValueError:
        raise ConfigError(f"--case must be 1..4 or 'all', got {text!r}")
    if case not in ALL_CASES:
        raise ConfigError(f"--case must be 1..4 or 'all', got {case}")
    return (case,)


def _load_inputs(args) -> tuple[StationConfig, "ScenarioSet", "FleetSchedule | None"]:
    config = load_config(args.config)
    first_start = _scenario_day_start(Path(args.scenarios))
    grid = TimeGrid.daily(first_start, dt_minutes=args.dt_min)
    scenarios = load_scenario_set(args.scenarios, grid)
    fleet = None
    if args.fleet:
        fleet = load_fleet_csv(args.fleet, eta_charge=config.ev.eta_charge,
                               eta_discharge=config.ev.eta_discharge)
    return config, scenarios, fleet


def _scenario_day_start(root: Path):
    """Day start = first timestamp of the first scenario's demand series."""
    import pandas as pd

    if not root.is_dir():
        raise DataError(f"scenario root not found: {root}")
    subdirs = sorted(p for p in root.iterdir() if p.is_dir())
    if not subdirs:
        raise DataError(f"{root}: contains no scenario subdirectories")
    demand = subdirs[0] / "train_demand.csv"
    if not demand.exists():
        raise DataError(f"scenario {subdirs[0].name!r} has no train_demand.csv")
    head = pd.read_csv(demand, nrows=1)
    if head.empty:
        raise DataError(f"{demand}: empty profile")
    return pd.to_datetime(head.iloc[0, 0], format="ISO8601").to_pydatetime()


def cmd_run(args) -> int:
    config, scenarios, fleet = _load_inputs(args)
    options = config.solver
    if args.gap is not None:
        options = replace(options, gap_tol=args.gap)
    if args.time_limit_s is not None:
        options = replace(options, time_limit_s=args.time_limit_s)
    if args.jobs is not None:
        options = replace(options, jobs=args.jobs)

    report = run_ablation(scenarios, config, fleet=fleet,
                          cases=_parse_cases(args.case), options=options,
                          keep_going=args.keep_going)
    path = write_report(report, args.out, timestamp=not args.no_timestamp)
    print(format_table(report))
    print(f"report written to {path}")
    return EXIT_OK if not report.partial else EXIT_SOLVER


def cmd_validate(args) -> int:
    config, scenarios, fleet = _load_inputs(args)
    del config, fleet  # loading already enforces their invariants
    violations = validate_scenario_set(scenarios)
    for v in violations:
        print(f"violation: {v}")
    if violations:
        print(f"{len(violations)} violation(s) found")
        return EXIT_DATA
    print(f"ok: {len(scenarios)} scenario(s) valid")
    return EXIT_OK


def cmd_oracle(args) -> int:
    problem = load_instance(args.instance)
    if problem.grid.steps > MAX_STEPS:
        print(f"refused: enumeration is limited to {MAX_STEPS} steps, "
              f"instance has {problem.grid.steps}", file=sys.stderr)
        return EXIT_CONFIG
    oracle = brute_force_oracle(problem)
    solution = solve(problem, SolverOptions(gap_tol=args.gap))
    print(f"enumeration: status={oracle.status} "
          f"cost={'-' if oracle.cost_eur is None else f'{oracle.cost_eur:.6f}'} "
          f"({oracle.assignments_tried} binary assignments)")
    print(f"milp:        status={solution.solver_status} "
          f"cost={'-' if solution.objective_eur is None else f'{solution.objective_eur:.6f}'}")
    if oracle.is_optimal and solution.is_optimal:
        diff = abs(oracle.cost_eur - solution.objective_eur)
        print(f"difference:  {diff:.3e}")
        return EXIT_OK
    if oracle.status == "infeasible" and solution.solver_status == "infeasible":
        print("both routes agree the instance is infeasible")
        return EXIT_OK
    print("status mismatch between enumeration and MILP")
    return EXIT_SOLVER


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {"run": cmd_run, "validate": cmd_validate, "oracle": cmd_oracle}
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (SolverError, EmsError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
