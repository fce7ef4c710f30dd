"""The energy-management MILP: problem assembly, emission, solve, validation.

Per scenario s and step t the model decides grid purchase/sale, ESS
charge/discharge, and how much of the available regenerative-braking
power to absorb, subject to:

  (a) charge gating      p_rbe + p_ch <= Pch_max * u_b
  (b) discharge gating   p_dis <= Pdis_max * (1 - u_b)
  (c) stored-energy recursion with self-discharge, charge efficiency on
      (p_rbe + p_ch), a configurable discharge-efficiency convention,
      fixed initial level, and min/max bounds
  (d) braking-power cap  p_rbe <= rb_available[t]
  (e) power balance      p_buy + pv + p_dis = demand + p_ch + ev + p_sell
  (f) exchange gating    p_buy <= Pbuy_max * u_g, p_sell <= Psell_max * (1 - u_g)

The objective is the probability-weighted purchase cost minus sale
revenue. Scenarios share no variables, so the model decomposes and each
scenario is solved independently (optionally in parallel); the joint
model is still constructible for export and cross-checks.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .backends import SolveResult, Status, make_backend, resolve_backend_name, load_model
from .errors import ConfigError, DataError
from .ev import ev_demand_profile
from .fleet import FleetSchedule
from .linmodel import EQUAL, GREATER_EQUAL, LESS_EQUAL, LinearModel
from .profiles import Profile, zeros_profile
from .pv import pv_profile, size_pv_from_penetration
from .scenarios import Scenario, ScenarioSet, validate_scenario_set
from .stationconfig import EssParams, GridParams, SolverOptions, StationConfig
from .timegrid import TimeGrid

BINARY_TOL = 1e-6

CASE_FLAGS = {1: (False, False), 2: (True, False), 3: (False, True), 4: (True, True)}


@dataclass(frozen=True)
class CaseFlags:
    """Which optional components participate (braking power rides with the ESS)."""

    ess_enabled: bool
    pv_enabled: bool

    @classmethod
    def for_case(cls, case: int) -> "CaseFlags":
        if case not in CASE_FLAGS:
            raise ConfigError(f"case must be one of {sorted(CASE_FLAGS)}, got {case}")
        ess, pv = CASE_FLAGS[case]
        return cls(ess_enabled=ess, pv_enabled=pv)

    @property
    def case_number(self) -> int:
        for case, flags in CASE_FLAGS.items():
            if flags == (self.ess_enabled, self.pv_enabled):
                return case
        raise AssertionError("unreachable")


@dataclass(frozen=True)
class EmsProblem:
    """Solver-ready description of one day-ahead optimization."""

    scenarios: ScenarioSet
    grid_params: GridParams
    flags: CaseFlags
    ev_demand: Profile
    ess: EssParams | None = None
    pv_power: dict[str, Profile] | None = None  # scenario id -> PV output

    def __post_init__(self):
        if self.flags.ess_enabled and self.ess is None:
            raise ConfigError("ESS is enabled but no ESS parameters were given")
        if self.flags.pv_enabled and self.pv_power is None:
            raise ConfigError("PV is enabled but no PV profiles were built")
        grid = self.scenarios.grid
        if self.ev_demand.grid != grid:
            raise DataError("EV demand profile is on a different grid than the scenarios")
        if self.pv_power is not None:
            for sid, prof in self.pv_power.items():
                if prof.grid != grid:
                    raise DataError(f"PV profile for scenario {sid!r} is on a different grid")

    @property
    def grid(self) -> TimeGrid:
        return self.scenarios.grid

    def pv_values(self, scenario: Scenario) -> np.ndarray:
        if self.flags.pv_enabled and self.pv_power is not None:
            return self.pv_power[scenario.id].values
        return np.zeros(self.grid.steps)


def build_problem(scenarios: ScenarioSet, config: StationConfig, flags: CaseFlags,
                  fleet: FleetSchedule | None = None,
                  ev_demand: Profile | None = None) -> EmsProblem:
    """Assemble an EmsProblem: EV demand, PV conversion, parameter wiring.

    EV demand is taken as given if passed, otherwise simulated from the
    fleet (zero if neither is supplied). PV profiles are built only for
    enabled cases; a penetration-based rating is resolved against the
    scenario set's peak train demand.
    """
    if len(scenarios) == 0:
        raise DataError("cannot build a problem from an empty scenario set")
    violations = validate_scenario_set(scenarios)
    if violations:
        raise DataError(
            "scenario set is invalid: " + "; ".join(str(v) for v in violations)
        )
    grid = scenarios.grid

    if ev_demand is None:
        ev_demand = (ev_demand_profile(fleet, grid) if fleet is not None
                     else zeros_profile(grid, "ev_demand"))

    pv_power = None
    if flags.pv_enabled:
        pv_params = config.pv
        if pv_params is None:
            raise ConfigError("PV case requested but the config has no pv section")
        if config.pv_penetration is not None:
            rated = size_pv_from_penetration(
                scenarios.peak_train_demand_kw(), config.pv_penetration
            )
            pv_params = type(pv_params)(
                rated_kw=rated, r_c_wm2=pv_params.r_c_wm2, r_std_wm2=pv_params.r_std_wm2
            )
        pv_power = {s.id: pv_profile(s.radiation, pv_params) for s in scenarios}

    ess = config.ess if flags.ess_enabled else None
    if flags.ess_enabled and ess is None:
        raise ConfigError("ESS case requested but the config has no ess section")

    return EmsProblem(
        scenarios=scenarios, grid_params=config.grid_params, flags=flags,
        ev_demand=ev_demand, ess=ess, pv_power=pv_power,
    )


@dataclass(frozen=True)
class ScenarioVars:
    """Variable indices of one scenario's model, per step."""

    p_buy: tuple[int, ...]
    p_sell: tuple[int, ...]
    u_g: tuple[int, ...]
    p_ch: tuple[int, ...] | None = None
    p_dis: tuple[int, ...] | None = None
    p_rbe: tuple[int, ...] | None = None
    soc: tuple[int, ...] | None = None
    u_b: tuple[int, ...] | None = None


@dataclass(frozen=True)
class ScenarioModel:
    scenario: Scenario
    model: LinearModel
    vars: ScenarioVars


@dataclass(frozen=True)
class EmsModel:
    """The emitted MILP, stored scenario-separably."""

    problem: EmsProblem
    scenario_models: tuple[ScenarioModel, ...]

    @property
    def num_vars(self) -> int:
        return sum(sm.model.num_vars for sm in self.scenario_models)

    @property
    def num_integer(self) -> int:
        return sum(sm.model.num_integer for sm in self.scenario_models)

    @property
    def num_constraints(self) -> int:
        return sum(sm.model.num_constraints for sm in self.scenario_models)

    def to_joint(self) -> tuple[LinearModel, list[list[int]]]:
        """Merge all scenarios into one model with probability-weighted objective.

        Returns the joint model plus, per scenario, the map from local to
        joint variable indices.
        """
        joint = LinearModel(name="ems-joint")
        maps: list[list[int]] = []
        objective: list[tuple[int, float]] = []
        for k, sm in enumerate(self.scenario_models):
            mapping = joint.merge(sm.model, prefix=f"s{k}_")
            maps.append(mapping)
            pi = sm.scenario.probability
            objective.extend((mapping[i], pi * c) for i, c in sm.model.objective)
        joint.set_objective(objective, minimize=True)
        return joint, maps

    def write_lp(self, path: str | Path) -> None:
        joint, _ = self.to_joint()
        Path(path).write_text(joint.to_lp_string())


def emit_scenario_model(problem: EmsProblem, scenario: Scenario) -> ScenarioModel:
    """Emit one scenario's model; the objective is the unweighted scenario cost."""
    grid = problem.grid
    T = grid.steps
    dt = grid.dt_hours
    gp = problem.grid_params
    model = LinearModel(name=f"ems-{scenario.id}")

    p_buy = tuple(model.add_var(f"p_buy_t{t}", 0.0, gp.p_buy_max_kw) for t in range(T))
    p_sell = tuple(model.add_var(f"p_sell_t{t}", 0.0, gp.p_sell_max_kw) for t in range(T))
    u_g = tuple(model.add_var(f"u_g_t{t}", 0.0, 1.0, integer=True) for t in range(T))

    ess = problem.ess if problem.flags.ess_enabled else None
    if ess is not None:
        rb_cap = scenario.rb_available.values
        p_ch = tuple(model.add_var(f"p_ch_t{t}", 0.0, ess.p_charge_max_kw) for t in range(T))
        p_dis = tuple(model.add_var(f"p_dis_t{t}", 0.0, ess.p_discharge_max_kw) for t in range(T))
        p_rbe = tuple(model.add_var(f"p_rbe_t{t}", 0.0, float(rb_cap[t])) for t in range(T))
        soc = tuple(model.add_var(f"soc_t{t}", ess.soc_min_kwh, ess.soc_max_kwh)
                    for t in range(T))
        u_b = tuple(model.add_var(f"u_b_t{t}", 0.0, 1.0, integer=True) for t in range(T))
    else:
        p_ch = p_dis = p_rbe = soc = u_b = None

    demand = scenario.train_demand.values
    ev = problem.ev_demand.values
    pv = problem.pv_values(scenario)

    for t in range(T):
        # (f) exchange gating
        model.add_constr(f"buy_gate_t{t}",
                         [(p_buy[t], 1.0), (u_g[t], -gp.p_buy_max_kw)],
                         LESS_EQUAL, 0.0)
        model.add_constr(f"sell_gate_t{t}",
                         [(p_sell[t], 1.0), (u_g[t], gp.p_sell_max_kw)],
                         LESS_EQUAL, gp.p_sell_max_kw)

        # (e) power balance; fixed injections move to the right-hand side
        balance = [(p_buy[t], 1.0), (p_sell[t], -1.0)]
        if ess is not None:
            balance += [(p_dis[t], 1.0), (p_ch[t], -1.0)]
        rhs = float(demand[t] + ev[t] - pv[t])
        model.add_constr(f"balance_t{t}", balance, EQUAL, rhs)

        if ess is None:
            continue

        # (a) combined braking + grid charging limited by the charger and u_b
        model.add_constr(f"charge_gate_t{t}",
                         [(p_rbe[t], 1.0), (p_ch[t], 1.0), (u_b[t], -ess.p_charge_max_kw)],
                         LESS_EQUAL, 0.0)
        # (b) discharging shut off while charging
        model.add_constr(f"discharge_gate_t{t}",
                         [(p_dis[t], 1.0), (u_b[t], ess.p_discharge_max_kw)],
                         LESS_EQUAL, ess.p_discharge_max_kw)
        # (d) braking power cap (also present as the variable bound)
        model.add_constr(f"rbe_cap_t{t}", [(p_rbe[t], 1.0)], LESS_EQUAL, float(rb_cap[t]))

        # (c) stored-energy recursion
        dis_coef = (ess.eta_discharge if ess.discharge_convention == "as-paper"
                    else 1.0 / ess.eta_discharge)
        terms = [(soc[t], 1.0),
                 (p_rbe[t], -ess.eta_charge * dt), (p_ch[t], -ess.eta_charge * dt),
                 (p_dis[t], dis_coef * dt)]
        keep = 1.0 - ess.self_discharge
        if t == 0:
            model.add_constr(f"soc_rec_t{t}", terms, EQUAL, keep * ess.soc0_kwh)
        else:
            terms.append((soc[t - 1], -keep))
            model.add_constr(f"soc_rec_t{t}", terms, EQUAL, 0.0)

    if ess is not None and ess.enforce_terminal_soc:
        model.add_constr("terminal_soc", [(soc[T - 1], 1.0)], GREATER_EQUAL, ess.soc0_kwh)

    buy_price = scenario.buy_price.values
    sell_price = scenario.sell_price.values
    objective = [(p_buy[t], float(buy_price[t]) * dt) for t in range(T)]
    objective += [(p_sell[t], -float(sell_price[t]) * dt) for t in range(T)]
    model.set_objective(objective, minimize=True)

    return ScenarioModel(
        scenario=scenario, model=model,
        vars=ScenarioVars(p_buy=p_buy, p_sell=p_sell, u_g=u_g, p_ch=p_ch,
                          p_dis=p_dis, p_rbe=p_rbe, soc=soc, u_b=u_b),
    )


def emit_milp(problem: EmsProblem) -> EmsModel:
    """Emit the full (scenario-separable) MILP for a problem."""
    return EmsModel(
        problem=problem,
        scenario_models=tuple(emit_scenario_model(problem, s) for s in problem.scenarios),
    )


@dataclass(frozen=True)
class DecisionSchedule:
    """Optimal per-step dispatch for one scenario (disabled parts are zero)."""

    scenario_id: str
    p_buy: np.ndarray
    p_sell: np.ndarray
    p_ch: np.ndarray
    p_dis: np.ndarray
    p_rbe: np.ndarray
    soc: np.ndarray
    u_b: np.ndarray
    u_g: np.ndarray

    def cost_eur(self, scenario: Scenario, dt_hours: float) -> float:
        buy = float(np.dot(scenario.buy_price.values, self.p_buy))
        sell = float(np.dot(scenario.sell_price.values, self.p_sell))
        return (buy - sell) * dt_hours

    def to_csv(self, path: str | Path) -> None:
        header = "t,p_buy,p_sell,p_ch,p_dis,p_rbe,soc,u_b,u_g"
        rows = [header]
        for t in range(len(self.p_buy)):
            rows.append(
                f"{t},{self.p_buy[t]:.9g},{self.p_sell[t]:.9g},{self.p_ch[t]:.9g},"
                f"{self.p_dis[t]:.9g},{self.p_rbe[t]:.9g},{self.soc[t]:.9g},"
                f"{self.u_b[t]:.9g},{self.u_g[t]:.9g}"
            )
        Path(path).write_text("\n".join(rows) + "\n")


@dataclass
class EmsSolution:
    """Per-scenario schedules plus the expected objective."""

    schedules: dict[str, DecisionSchedule]
    per_scenario_cost: dict[str, float]
    objective_eur: float | None
    solver_status: str  # optimal | feasible-gap | infeasible | error
    gap: float
    message: str = ""

    @property
    def is_optimal(self) -> bool:
        return self.solver_status == "optimal"


def _round_binaries(values: np.ndarray) -> np.ndarray:
    rounded = np.round(values)
    close = np.abs(values - rounded) <= BINARY_TOL
    return np.where(close, rounded, values)


def _extract_schedule(sm: ScenarioModel, x: np.ndarray) -> DecisionSchedule:
    T = len(sm.vars.p_buy)

    def pick(indices) -> np.ndarray:
        if indices is None:
            return np.zeros(T)
        return np.array([x[i] for i in indices])

    return DecisionSchedule(
        scenario_id=sm.scenario.id,
        p_buy=pick(sm.vars.p_buy),
        p_sell=pick(sm.vars.p_sell),
        p_ch=pick(sm.vars.p_ch),
        p_dis=pick(sm.vars.p_dis),
        p_rbe=pick(sm.vars.p_rbe),
        soc=pick(sm.vars.soc),
        u_b=_round_binaries(pick(sm.vars.u_b)),
        u_g=_round_binaries(pick(sm.vars.u_g)),
    )


def infeasibility_hint(problem: EmsProblem, scenario: Scenario) -> str:
    """Best-effort diagnosis of which constraint family blocks feasibility."""
    net = (scenario.train_demand.values + problem.ev_demand.values
           - problem.pv_values(scenario))
    dis_max = problem.ess.p_discharge_max_kw if problem.ess else 0.0
    ch_max = problem.ess.p_charge_max_kw if problem.ess else 0.0
    worst_import = float(net.max())
    worst_export = float((-net).max())
    if worst_import > problem.grid_params.p_buy_max_kw + dis_max:
        return (
            f"net demand peaks at {worst_import:.1f} kW but purchase limit plus ESS "
            f"discharge is {problem.grid_params.p_buy_max_kw + dis_max:.1f} kW "
            "(balance + exchange-gating families)"
        )
    if worst_export > problem.grid_params.p_sell_max_kw + ch_max:
        return (
            f"surplus generation peaks at {worst_export:.1f} kW but sale limit plus ESS "
            f"charging is {problem.grid_params.p_sell_max_kw + ch_max:.1f} kW "
            "(balance + exchange-gating families)"
        )
    return "stored-energy recursion or SoC bounds (ESS family)"


def _solve_scenario(sm: ScenarioModel, backend_name: str,
                    options: SolverOptions) -> SolveResult:
    backend = make_backend(backend_name)
    load_model(backend, sm.model)
    status = backend.optimize(gap_tol=options.gap_tol, time_limit_s=options.time_limit_s)
    if status in (Status.OPTIMAL, Status.FEASIBLE_GAP):
        x = backend.solution_vector(sm.model.num_vars)
        return SolveResult(status=status, x=x, objective=backend.objective_value(),
                           gap=backend.mip_gap())
    return SolveResult(status=status, x=None, objective=None, gap=math.inf)


def solve(model: EmsModel | EmsProblem, options: SolverOptions | None = None,
          joint: bool = False) -> EmsSolution:
    """Solve the EMS problem; scenarios are dispatched independently.

    With `joint=True` the merged model is solved as one MILP instead
    (slower; used to cross-check that decomposition is exact).
    """
    if isinstance(model, EmsProblem):
        model = emit_milp(model)
    options = options or SolverOptions()
    backend_name = resolve_backend_name(options.backend)

    if joint:
        return _solve_joint(model, backend_name, options)

    sms = model.scenario_models
    if options.jobs > 1 and len(sms) > 1:
        with ThreadPoolExecutor(max_workers=options.jobs) as pool:
            results = list(pool.map(
                lambda sm: _solve_scenario(sm, backend_name, options), sms
            ))
    else:
        results = [_solve_scenario(sm, backend_name, options) for sm in sms]

    schedules: dict[str, DecisionSchedule] = {}
    per_cost: dict[str, float] = {}
    worst_gap = 0.0
    statuses = []
    message = ""
    for sm, res in zip(sms, results):
        statuses.append(res.status)
        if res.x is not None:
            sched = _extract_schedule(sm, res.x)
            schedules[sm.scenario.id] = sched
            per_cost[sm.scenario.id] = sched.cost_eur(sm.scenario, model.problem.grid.dt_hours)
            worst_gap = max(worst_gap, res.gap)
        elif res.status is Status.INFEASIBLE and not message:
            message = (f"scenario {sm.scenario.id!r} is infeasible: "
                       + infeasibility_hint(model.problem, sm.scenario))

    if any(s is Status.INFEASIBLE for s in statuses):
        return EmsSolution(schedules=schedules, per_scenario_cost=per_cost,
                           objective_eur=None, solver_status="infeasible",
                           gap=math.inf, message=message)
    if any(s in (Status.ERROR, Status.UNBOUNDED) for s in statuses):
        return EmsSolution(schedules=schedules, per_scenario_cost=per_cost,
                           objective_eur=None, solver_status="error", gap=math.inf,
                           message="a scenario solve failed or was unbounded")

    expected = sum(sm.scenario.probability * per_cost[sm.scenario.id] for sm in sms)
    status = ("optimal" if all(s is Status.OPTIMAL for s in statuses)
              else "feasible-gap")
    return EmsSolution(schedules=schedules, per_scenario_cost=per_cost,
                       objective_eur=float(expected), solver_status=status,
                       gap=worst_gap)


def _solve_joint(model: EmsModel, backend_name: str,
                 options: SolverOptions) -> EmsSolution:
    joint, maps = model.to_joint()
    backend = make_backend(backend_name)
    load_model(backend, joint)
    # one model for all scenarios, so scale the per-scenario time budget
    budget = options.time_limit_s * max(1, len(model.scenario_models))
    status = backend.optimize(gap_tol=options.gap_tol, time_limit_s=budget)
    if status is Status.INFEASIBLE:
        return EmsSolution(schedules={}, per_scenario_cost={}, objective_eur=None,
                           solver_status="infeasible", gap=math.inf,
                           message="joint model infeasible")
    if status in (Status.ERROR, Status.UNBOUNDED):
        return EmsSolution(schedules={}, per_scenario_cost={}, objective_eur=None,
                           solver_status="error", gap=math.inf,
                           message=f"joint solve returned {status.value}")
    x = backend.solution_vector(joint.num_vars)
    schedules = {}
    per_cost = {}
    for sm, mapping in zip(model.scenario_models, maps):
        local_x = np.array([x[mapping[i]] for i in range(sm.model.num_vars)])
        sched = _extract_schedule(sm, local_x)
        schedules[sm.scenario.id] = sched
        per_cost[sm.scenario.id] = sched.cost_eur(sm.scenario, model.problem.grid.dt_hours)
    expected = sum(sm.scenario.probability * per_cost[sm.scenario.id]
                   for sm in model.scenario_models)
    return EmsSolution(
        schedules=schedules, per_scenario_cost=per_cost, objective_eur=float(expected),
        solver_status="optimal" if status is Status.OPTIMAL else "feasible-gap",
        gap=backend.mip_gap(),
    )


@dataclass
class SolutionReport:
    """Residuals per constraint family plus discrete violations."""

    residuals: dict[str, float]
    violations: list[str]
    objective_mismatch: float

    def max_residual(self) -> float:
        return max(self.residuals.values()) if self.residuals else 0.0

    @property
    def clean(self) -> bool:
        return not self.violations


def validate_solution(problem: EmsProblem, solution: EmsSolution,
                      balance_tol: float | None = None) -> SolutionReport:
    """Recompute every constraint family on the returned schedules.

    Tolerances: balance and gating residuals at 1e-6 x max(1, peak
    demand); SoC bounds at 1e-9 x capacity; binaries at the rounding
    tolerance; objective at 1e-6 relative.
    """
    grid = problem.grid
    dt = grid.dt_hours
    scale = 1.0
    for s in problem.scenarios:
        scale = max(scale, float(s.train_demand.values.max()))
    tol = balance_tol if balance_tol is not None else 1e-6 * scale

    residuals: dict[str, float] = {
        "balance": 0.0, "exchange_gating": 0.0, "charge_gating": 0.0,
        "discharge_gating": 0.0, "rbe_cap": 0.0, "soc_recursion": 0.0,
        "soc_bounds": 0.0, "integrality": 0.0, "complementarity_grid": 0.0,
        "complementarity_ess": 0.0, "variable_bounds": 0.0,
    }
    violations: list[str] = []

    def bump(family: str, value: float, where: str, limit: float) -> None:
        residuals[family] = max(residuals[family], value)
        if value > limit:
            violations.append(f"{where}: {family} residual {value:.3e} > {limit:.3e}")

    expected = 0.0
    ess = problem.ess
    gp = problem.grid_params
    for scenario in problem.scenarios:
        sched = solution.schedules.get(scenario.id)
        if sched is None:
            violations.append(f"{scenario.id}: no schedule in solution")
            continue
        pv = problem.pv_values(scenario)
        demand = scenario.train_demand.values
        ev = problem.ev_demand.values

        balance = np.abs(sched.p_buy + pv + sched.p_dis
                         - demand - sched.p_ch - ev - sched.p_sell)
        bump("balance", float(balance.max()), scenario.id, tol)

        for u in (sched.u_g, sched.u_b):
            frac = np.abs(u - np.round(u))
            bump("integrality", float(frac.max()), scenario.id, BINARY_TOL)

        buy_gate = sched.p_buy - gp.p_buy_max_kw * sched.u_g
        sell_gate = sched.p_sell - gp.p_sell_max_kw * (1.0 - sched.u_g)
        bump("exchange_gating", float(np.maximum(buy_gate, sell_gate).max()),
             scenario.id, tol)
        bump("complementarity_grid", float((sched.p_buy * sched.p_sell).max()),
             scenario.id, BINARY_TOL * gp.p_buy_max_kw * max(gp.p_sell_max_kw, 1.0))

        neg = max(0.0, float(-min(
            sched.p_buy.min(), sched.p_sell.min(), sched.p_ch.min(),
            sched.p_dis.min(), sched.p_rbe.min(),
        )))
        bump("variable_bounds", neg, scenario.id, tol)

        if ess is not None:
            charge_gate = sched.p_rbe + sched.p_ch - ess.p_charge_max_kw * sched.u_b
            bump("charge_gating", float(charge_gate.max()), scenario.id, tol)
            dis_gate = sched.p_dis - ess.p_discharge_max_kw * (1.0 - sched.u_b)
            bump("discharge_gating", float(dis_gate.max()), scenario.id, tol)
            rbe_over = sched.p_rbe - scenario.rb_available.values
            bump("rbe_cap", float(rbe_over.max()), scenario.id, tol)
            bump("complementarity_ess", float((sched.p_ch * sched.p_dis).max()),
                 scenario.id,
                 BINARY_TOL * ess.p_charge_max_kw * max(ess.p_discharge_max_kw, 1.0))

            dis_coef = (ess.eta_discharge if ess.discharge_convention == "as-paper"
                        else 1.0 / ess.eta_discharge)
            keep = 1.0 - ess.self_discharge
            prev = np.concatenate([[ess.soc0_kwh], sched.soc[:-1]])
            recur = np.abs(sched.soc - (keep * prev
                                        + ess.eta_charge * (sched.p_rbe + sched.p_ch) * dt
                                        - dis_coef * sched.p_dis * dt))
            bump("soc_recursion", float(recur.max()), scenario.id, tol * dt + 1e-9)
            soc_out = np.maximum(ess.soc_min_kwh - sched.soc, sched.soc - ess.soc_max_kwh)
            bump("soc_bounds", float(soc_out.max()), scenario.id,
                 1e-9 * ess.capacity_kwh)

        expected += scenario.probability * sched.cost_eur(scenario, dt)

    if solution.objective_eur is None:
        mismatch = math.inf if solution.schedules else 0.0
    else:
        mismatch = abs(solution.objective_eur - expected)
        if mismatch > 1e-6 * max(1.0, abs(expected)):
            violations.append(
                f"objective {solution.objective_eur!r} differs from recomputed "
                f"{expected!r} by {mismatch:.3e}"
            )
    return SolutionReport(residuals=residuals, violations=violations,
                          objective_mismatch=mismatch)
