"""End-to-end pipeline: per-case runs, the four-case ablation, reporting.

A case run is: EV demand simulation -> PV conversion (when enabled) ->
problem assembly -> solve -> solution validation. The ablation executes
cases 1-4 and reports expected costs plus savings against the base case.
"""

from __future__ import annotations

import json
import re
import time
from dataclasses import dataclass, field
from pathlib import Path

from .ems import (CaseFlags, EmsProblem, EmsSolution, SolutionReport, build_problem,
                  solve, validate_solution)
from .errors import EmsError, InfeasibleError, SolverError
from .fleet import FleetSchedule
from .scenarios import ScenarioSet
from .stationconfig import SolverOptions, StationConfig

ALL_CASES = (1, 2, 3, 4)
BASELINE_CASE = 1

_FILE_SAFE = re.compile(r"[^A-Za-z0-9._-]")


@dataclass
class CaseResult:
    """One solved case: problem, solution, validation, expected cost."""

    case: int
    problem: EmsProblem
    solution: EmsSolution
    report: SolutionReport
    solve_seconds: float

    @property
    def expected_cost_eur(self) -> float:
        assert self.solution.objective_eur is not None
        return self.solution.objective_eur

    @property
    def per_scenario_cost(self) -> dict[str, float]:
        return self.solution.per_scenario_cost


def run_case(scenarios: ScenarioSet, config: StationConfig, case: int,
             fleet: FleetSchedule | None = None,
             options: SolverOptions | None = None) -> CaseResult:
    """Run the full pipeline for one case; raises on infeasibility or failure."""
    flags = CaseFlags.for_case(case)
    problem = build_problem(scenarios, config, flags, fleet=fleet)
    options = options or config.solver
    started = time.monotonic()
    solution = solve(problem, options)
    elapsed = time.monotonic() - started

    if solution.solver_status == "infeasible":
        raise InfeasibleError(
            f"case {case}: {solution.message or 'problem is infeasible'}",
            hint=solution.message,
        )
    if solution.solver_status == "error":
        raise SolverError(f"case {case}: {solution.message or 'solver failure'}")

    report = validate_solution(problem, solution)
    if not report.clean:
        raise SolverError(
            f"case {case}: solution failed validation: " + "; ".join(report.violations[:5])
        )
    return CaseResult(case=case, problem=problem, solution=solution,
                      report=report, solve_seconds=elapsed)


@dataclass
class CaseReport:
    """Expected costs and savings for the executed cases."""

    results: dict[int, CaseResult] = field(default_factory=dict)
    failures: dict[int, str] = field(default_factory=dict)
    baseline_case: int = BASELINE_CASE

    @property
    def partial(self) -> bool:
        return bool(self.failures)

    def expected_cost(self, case: int) -> float:
        return self.results[case].expected_cost_eur

    def savings_pct(self, case: int) -> float | None:
        """Relative saving against the base case; None when undefined."""
        if case not in self.results or self.baseline_case not in self.results:
            return None
        base = self.expected_cost(self.baseline_case)
        if base <= 0:
            return None
        return 100.0 * (base - self.expected_cost(case)) / base

    def to_dict(self, timestamp: bool = True) -> dict:
        """Serializable tree; timestamp=False also drops timing fields so
        reruns on identical inputs are byte-identical."""
        cases = {}
        for case in sorted(self.results):
            r = self.results[case]
            entry = {
                "ess": r.problem.flags.ess_enabled,
                "pv": r.problem.flags.pv_enabled,
                "expected_cost_eur": r.expected_cost_eur,
                "savings_pct": self.savings_pct(case),
                "solver_status": r.solution.solver_status,
                "mip_gap": r.solution.gap,
                "per_scenario_cost_eur": dict(sorted(r.per_scenario_cost.items())),
                "max_residual": r.report.max_residual(),
            }
            if timestamp:
                entry["solve_seconds"] = round(r.solve_seconds, 6)
            cases[str(case)] = entry
        doc = {
            "baseline_case": self.baseline_case,
            "cases": cases,
            "failures": {str(c): msg for c, msg in sorted(self.failures.items())},
            "partial": self.partial,
        }
        if timestamp:
            doc["generated_at"] = time.strftime("%Y-%m-%dT%H:%M:%S")
        return doc


def run_ablation(scenarios: ScenarioSet, config: StationConfig,
                 fleet: FleetSchedule | None = None,
                 cases: tuple[int, ...] = ALL_CASES,
                 options: SolverOptions | None = None,
                 keep_going: bool = False) -> CaseReport:
    """Execute the requested cases; failures abort unless keep_going."""
    report = CaseReport()
    for case in cases:
        try:
            report.results[case] = run_case(scenarios, config, case,
                                            fleet=fleet, options=options)
        except EmsError as exc:
            if not keep_going:
                raise
            report.failures[case] = str(exc)
    return report


def _safe(name: str) -> str:
    return _FILE_SAFE.sub("_", name)


def _write_series_csv(path: Path, values) -> None:
    lines = ["t,value"]
    lines += [f"{t},{v:.9g}" for t, v in enumerate(values)]
    path.write_text("\n".join(lines) + "\n")


def write_report(report: CaseReport, outdir: str | Path,
                 timestamp: bool = True) -> Path:
    """Write report.json, the flat cost CSV, schedules, and plot-data CSVs."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    report_path = outdir / "report.json"
    report_path.write_text(
        json.dumps(report.to_dict(timestamp=timestamp), indent=2, sort_keys=True) + "\n"
    )

    lines = ["case,scenario,cost_eur"]
    for case in sorted(report.results):
        r = report.results[case]
        for sid in sorted(r.per_scenario_cost):
            lines.append(f"{case},{sid},{r.per_scenario_cost[sid]:.9g}")
    (outdir / "costs.csv").write_text("\n".join(lines) + "\n")

    pv_written = set()
    for case in sorted(report.results):
        r = report.results[case]
        for sid in sorted(r.solution.schedules):
            sched = r.solution.schedules[sid]
            sched.to_csv(outdir / f"schedule_case{case}_{_safe(sid)}.csv")
            if r.problem.flags.ess_enabled:
                _write_series_csv(outdir / f"soc_case{case}_{_safe(sid)}.csv", sched.soc)
        if r.problem.flags.pv_enabled and r.problem.pv_power:
            for sid, prof in r.problem.pv_power.items():
                if sid not in pv_written:
                    _write_series_csv(outdir / f"pv_{_safe(sid)}.csv", prof.values)
                    pv_written.add(sid)
    return report_path


def format_table(report: CaseReport) -> str:
    """Fixed-width summary with costs rounded to cents for display."""
    rows = ["Case  ESS  PV   Expected cost (EUR)  Savings (%)"]
    for case in sorted(report.results):
        r = report.results[case]
        savings = report.savings_pct(case)
        savings_txt = "-" if case == report.baseline_case or savings is None \
            else f"{savings:.2f}"
        rows.append(
            f"{case:<5d} {'x' if r.problem.flags.ess_enabled else '-':<4}"
            f"{'x' if r.problem.flags.pv_enabled else '-':<4}"
            f"{r.expected_cost_eur:>18.2f}  {savings_txt:>10}"
        )
    for case, msg in sorted(report.failures.items()):
        rows.append(f"{case:<5d} FAILED: {msg}")
    return "\n".join(rows)
