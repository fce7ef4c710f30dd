"""Shared fixtures: grid/scenario builders and randomized instances."""

from __future__ import annotations

from datetime import datetime, timedelta

import numpy as np
import pytest

from railway_ems import (CaseFlags, EmsProblem, EssParams, GridParams, Profile,
                         Scenario, ScenarioSet, TimeGrid, bundled_data_dir)

DAY_START = datetime(2024, 6, 17)


def make_grid(steps: int, dt_hours: float = 1.0, start: datetime = DAY_START) -> TimeGrid:
    return TimeGrid(start=start, steps=steps, dt_hours=dt_hours)


def make_scenario(grid: TimeGrid, demand, buy_price, rb=None, radiation=None,
                  sell_price=None, probability: float = 1.0,
                  scenario_id: str = "s0") -> Scenario:
    zeros = np.zeros(grid.steps)

    def prof(values, kind):
        return Profile(grid=grid, values=np.asarray(values, dtype=float), kind=kind)

    buy = prof(buy_price, "price")
    return Scenario(
        id=scenario_id,
        probability=probability,
        train_demand=prof(demand, "demand"),
        rb_available=prof(zeros if rb is None else rb, "rb"),
        radiation=prof(zeros if radiation is None else radiation, "radiation"),
        buy_price=buy,
        sell_price=buy if sell_price is None else prof(sell_price, "price"),
    )


def make_problem(grid: TimeGrid, demand, buy_price, rb=None, pv=None,
                 ev_demand=None, ess: EssParams | None = None,
                 grid_params: GridParams | None = None,
                 sell_price=None, scenario_id: str = "s0") -> EmsProblem:
    """Single-scenario problem straight from arrays (no config plumbing)."""
    scenario = make_scenario(grid, demand, buy_price, rb=rb,
                             sell_price=sell_price, scenario_id=scenario_id)
    pv_power = None
    if pv is not None:
        pv_power = {scenario.id: Profile(grid=grid, values=np.asarray(pv, dtype=float),
                                         kind="pv_power")}
    ev = Profile(
        grid=grid,
        values=np.zeros(grid.steps) if ev_demand is None else np.asarray(ev_demand, float),
        kind="ev_demand",
    )
    return EmsProblem(
        scenarios=ScenarioSet(scenarios=(scenario,)),
        grid_params=grid_params or GridParams(p_buy_max_kw=10_000.0, p_sell_max_kw=10_000.0),
        flags=CaseFlags(ess_enabled=ess is not None, pv_enabled=pv is not None),
        ev_demand=ev,
        ess=ess,
        pv_power=pv_power,
    )


def random_ess(rng: np.random.Generator) -> EssParams:
    soc_min = rng.uniform(0.0, 0.2)
    soc0 = rng.uniform(soc_min, 0.8)
    return EssParams(
        capacity_kwh=float(rng.uniform(200.0, 1500.0)),
        p_charge_max_kw=float(rng.uniform(200.0, 1200.0)),
        p_discharge_max_kw=float(rng.uniform(200.0, 1200.0)),
        eta_charge=float(rng.uniform(0.85, 1.0)),
        eta_discharge=float(rng.uniform(0.85, 1.0)),
        self_discharge=float(rng.choice([0.0, 0.001, 0.01])),
        soc0_fraction=float(soc0),
        soc_min_fraction=float(soc_min),
        soc_max_fraction=1.0,
        discharge_convention=str(rng.choice(["as-paper", "divide"])),
    )


def random_tiny_problem(rng: np.random.Generator, steps: int | None = None,
                        with_ess: bool | None = None) -> EmsProblem:
    """Feasible random instance with T <= 4 for enumeration cross-checks."""
    T = int(steps if steps is not None else rng.integers(1, 5))
    grid = make_grid(T, dt_hours=float(rng.choice([0.25, 0.5, 1.0])))
    demand = rng.uniform(0.0, 2000.0, T)
    prices = rng.uniform(0.01, 0.4, T)
    rb = rng.uniform(0.0, 600.0, T) * (rng.random(T) < 0.6)
    pv = rng.uniform(0.0, 900.0, T) * (rng.random(T) < 0.7)
    ev = rng.choice([0.0, 300.0, 600.0], T)
    ess = random_ess(rng) if (with_ess if with_ess is not None else rng.random() < 0.7) \
        else None
    use_pv = bool(rng.random() < 0.7)
    # import limit covers worst-case load so instances stay feasible
    p_buy = float(demand.max() + ev.max()
                  + (ess.p_charge_max_kw if ess else 0.0) + 100.0)
    return make_problem(
        grid, demand, prices, rb=rb, pv=pv if use_pv else None, ev_demand=ev,
        ess=ess,
        grid_params=GridParams(p_buy_max_kw=p_buy, p_sell_max_kw=float(rng.uniform(500, 5000))),
    )


def random_daily_scenarios(rng: np.random.Generator, n_scenarios: int,
                           steps: int = 24, dt_hours: float = 1.0) -> ScenarioSet:
    grid = make_grid(steps, dt_hours=dt_hours)
    scenarios = []
    for k in range(n_scenarios):
        h = np.arange(steps) * dt_hours
        demand = (400.0 + 1200.0 * np.exp(-((h - 8.0) / 2.0) ** 2)
                  + 900.0 * np.exp(-((h - 18.5) / 2.0) ** 2)
                  + rng.normal(0.0, 40.0, steps))
        demand = np.clip(demand, 0.0, None)
        price = np.clip(rng.uniform(0.03, 0.25, steps), 0.0, None)
        rb = rng.uniform(0.0, 400.0, steps) * (rng.random(steps) < 0.4)
        radiation = np.clip(
            1000.0 * np.sin(np.pi * np.clip((h - 6.0) / 12.0, 0.0, 1.0)) ** 1.5
            * rng.uniform(0.3, 1.05),
            0.0, None,
        )
        scenarios.append(make_scenario(
            grid, demand, price, rb=rb, radiation=radiation,
            probability=1.0 / n_scenarios, scenario_id=f"day{k:03d}",
        ))
    return ScenarioSet(scenarios=tuple(scenarios))


@pytest.fixture(scope="session")
def bundled():
    return bundled_data_dir()


@pytest.fixture(scope="session")
def daily_grid():
    return TimeGrid.daily(DAY_START, dt_minutes=15)


# one pass/fail line per acceptance criterion at the end of the run
_acceptance_outcomes: list[tuple[str, str]] = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        _acceptance_outcomes.append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_outcomes:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name, outcome in _acceptance_outcomes:
        flag = "PASS" if outcome == "passed" else outcome.upper()
        terminalreporter.write_line(f"{flag}  {name}")
