"""Brute-force certification oracle for tiny instances.

Enumerates every assignment of the charging and exchange binaries
(2^(2T) with the ESS enabled, 2^T without) and solves the remaining LP
for each with the binaries baked directly into variable bounds and
matrix rows. The assembly here is deliberately independent of the
LinearModel/builder path so the two routes can certify each other.
Refuses horizons above MAX_STEPS.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .ems import EmsProblem
from .errors import DataError

MAX_STEPS = 4


@dataclass(frozen=True)
class OracleResult:
    status: str  # "optimal" | "infeasible"
    cost_eur: float | None
    assignments_tried: int

    @property
    def is_optimal(self) -> bool:
        return self.status == "optimal"


def brute_force_oracle(problem: EmsProblem) -> OracleResult:
    """Exact minimum cost of a single-scenario problem with T <= MAX_STEPS."""
    if len(problem.scenarios) != 1:
        raise DataError(
            f"oracle handles exactly one scenario, got {len(problem.scenarios)}"
        )
    T = problem.grid.steps
    if T > MAX_STEPS:
        raise DataError(f"oracle horizon limited to T <= {MAX_STEPS}, got T = {T}")

    scenario = problem.scenarios[0]
    dt = problem.grid.dt_hours
    gp = problem.grid_params
    ess = problem.ess if problem.flags.ess_enabled else None
    demand = scenario.train_demand.values
    ev = problem.ev_demand.values
    pv = problem.pv_values(scenario)
    rb = scenario.rb_available.values
    net = demand + ev - pv  # fixed RHS of the balance rows

    # variable layout: p_buy(T), p_sell(T), then with ESS: p_ch, p_dis, p_rbe, soc
    n = 2 * T + (4 * T if ess else 0)
    cost = np.zeros(n)
    cost[:T] = scenario.buy_price.values * dt
    cost[T:2 * T] = -scenario.sell_price.values * dt

    grid_patterns = list(itertools.product((0, 1), repeat=T))
    ess_patterns = list(itertools.product((0, 1), repeat=T)) if ess else [None]

    best = math.inf
    feasible = False
    tried = 0
    for u_g in grid_patterns:
        for u_b in ess_patterns:
            tried += 1
            lo = np.zeros(n)
            hi = np.zeros(n)
            hi[:T] = [gp.p_buy_max_kw * g for g in u_g]
            hi[T:2 * T] = [gp.p_sell_max_kw * (1 - g) for g in u_g]

            a_eq_rows = []
            b_eq = []
            a_ub_rows = []
            b_ub = []

            if ess is not None:
                ch0, dis0, rbe0, soc0 = 2 * T, 3 * T, 4 * T, 5 * T
                keep = 1.0 - ess.self_discharge
                dis_coef = (ess.eta_discharge
                            if ess.discharge_convention == "as-paper"
                            else 1.0 / ess.eta_discharge)
                for t in range(T):
                    hi[ch0 + t] = ess.p_charge_max_kw * u_b[t]
                    hi[dis0 + t] = ess.p_discharge_max_kw * (1 - u_b[t])
                    hi[rbe0 + t] = min(float(rb[t]), ess.p_charge_max_kw * u_b[t])
                    lo[soc0 + t] = ess.soc_min_kwh
                    hi[soc0 + t] = ess.soc_max_kwh
                    # combined charging limit (the rbe bound alone is not enough)
                    row = np.zeros(n)
                    row[ch0 + t] = 1.0
                    row[rbe0 + t] = 1.0
                    a_ub_rows.append(row)
                    b_ub.append(ess.p_charge_max_kw * u_b[t])
                    # stored-energy recursion
                    row = np.zeros(n)
                    row[soc0 + t] = 1.0
                    row[ch0 + t] = -ess.eta_charge * dt
                    row[rbe0 + t] = -ess.eta_charge * dt
                    row[dis0 + t] = dis_coef * dt
                    if t == 0:
                        b_eq.append(keep * ess.soc0_kwh)
                    else:
                        row[soc0 + t - 1] = -keep
                        b_eq.append(0.0)
                    a_eq_rows.append(row)
                if ess.enforce_terminal_soc:
                    row = np.zeros(n)
                    row[soc0 + T - 1] = -1.0
                    a_ub_rows.append(row)
                    b_ub.append(-ess.soc0_kwh)

            for t in range(T):
                row = np.zeros(n)
                row[t] = 1.0
                row[T + t] = -1.0
                if ess is not None:
                    row[3 * T + t] = 1.0   # discharge supplies the bus bar
                    row[2 * T + t] = -1.0  # charging is extra load
                a_eq_rows.append(row)
                b_eq.append(float(net[t]))

            res = linprog(
                cost,
                A_ub=np.array(a_ub_rows) if a_ub_rows else None,
                b_ub=np.array(b_ub) if b_ub else None,
                A_eq=np.array(a_eq_rows),
                b_eq=np.array(b_eq),
                bounds=np.column_stack([lo, hi]),
                method="highs",
            )
            if res.status == 0:
                feasible = True
                best = min(best, float(res.fun))

    if not feasible:
        return OracleResult(status="infeasible", cost_eur=None, assignments_tried=tried)
    return OracleResult(status="optimal", cost_eur=best, assignments_tried=tried)
