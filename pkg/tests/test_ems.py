import numpy as np
import pytest

from railway_ems import (CaseFlags, ConfigError, DataError, EssParams,
                         GridParams, Profile, ScenarioSet, SolverOptions,
                         StationConfig, build_problem, emit_milp, solve,
                         validate_solution)
from railway_ems.ems import DecisionSchedule, infeasibility_hint

from conftest import make_grid, make_problem, make_scenario, random_daily_scenarios

ESS = EssParams(
    capacity_kwh=1000.0, p_charge_max_kw=1000.0, p_discharge_max_kw=1000.0,
    eta_charge=0.95, eta_discharge=0.95, self_discharge=0.0,
    soc0_fraction=0.5, soc_min_fraction=0.1, soc_max_fraction=1.0,
)


def small_config(pv_rated=200.0):
    from railway_ems import PvParams
    return StationConfig(
        grid_params=GridParams(p_buy_max_kw=5000.0, p_sell_max_kw=5000.0),
        ess=ESS,
        pv=PvParams(rated_kw=pv_rated),
    )


# -- case flags and problem assembly ------------------------------------------

def test_case_flag_mapping():
    assert CaseFlags.for_case(1) == CaseFlags(False, False)
    assert CaseFlags.for_case(2) == CaseFlags(True, False)
    assert CaseFlags.for_case(3) == CaseFlags(False, True)
    assert CaseFlags.for_case(4) == CaseFlags(True, True)
    assert CaseFlags.for_case(4).case_number == 4
    with pytest.raises(ConfigError):
        CaseFlags.for_case(5)


def test_case1_problem_has_no_ess_or_pv():
    scen = random_daily_scenarios(np.random.default_rng(0), 2, steps=6)
    problem = build_problem(scen, small_config(), CaseFlags.for_case(1))
    assert problem.ess is None and problem.pv_power is None
    assert np.all(problem.pv_values(scen[0]) == 0.0)


def test_case4_problem_has_everything():
    scen = random_daily_scenarios(np.random.default_rng(0), 2, steps=6)
    problem = build_problem(scen, small_config(), CaseFlags.for_case(4))
    assert problem.ess is ESS
    assert set(problem.pv_power) == {s.id for s in scen}


def test_empty_scenario_set_rejected():
    with pytest.raises(DataError):
        build_problem(ScenarioSet(scenarios=()), small_config(), CaseFlags.for_case(1))


def test_invalid_probability_mass_rejected():
    grid = make_grid(2)
    scen = ScenarioSet(scenarios=(
        make_scenario(grid, [1, 1], [0.1, 0.1], probability=0.6, scenario_id="a"),
        make_scenario(grid, [1, 1], [0.1, 0.1], probability=0.6, scenario_id="b"),
    ))
    with pytest.raises(DataError):
        build_problem(scen, small_config(), CaseFlags.for_case(1))


def test_missing_ess_section_rejected():
    config = StationConfig(grid_params=GridParams(1000.0, 1000.0))
    scen = random_daily_scenarios(np.random.default_rng(0), 1, steps=4)
    with pytest.raises(ConfigError):
        build_problem(scen, config, CaseFlags.for_case(2))


def test_pv_rating_resolved_from_penetration():
    from railway_ems import PvParams
    config = StationConfig(
        grid_params=GridParams(5000.0, 5000.0),
        pv=PvParams(rated_kw=0.0), pv_penetration=0.2,
    )
    scen = random_daily_scenarios(np.random.default_rng(0), 1, steps=24)
    problem = build_problem(scen, config, CaseFlags.for_case(3))
    peak = scen.peak_train_demand_kw()
    rated = max(p.values.max() for p in problem.pv_power.values())
    assert rated <= 0.2 * peak + 1e-9


# -- model emission -----------------------------------------------------------

def test_variable_count_with_ess():
    scen = random_daily_scenarios(np.random.default_rng(1), 3, steps=8)
    problem = build_problem(scen, small_config(), CaseFlags.for_case(4))
    model = emit_milp(problem)
    S, T = 3, 8
    assert model.num_vars == S * T * (6 + 2)
    assert model.num_integer == S * T * 2


def test_case1_has_only_exchange_binaries():
    scen = random_daily_scenarios(np.random.default_rng(1), 2, steps=8)
    problem = build_problem(scen, small_config(), CaseFlags.for_case(1))
    model = emit_milp(problem)
    S, T = 2, 8
    assert model.num_vars == S * T * 3
    assert model.num_integer == S * T  # u_g only
    for sm in model.scenario_models:
        assert sm.vars.u_b is None and sm.vars.soc is None


def test_zero_rb_availability_forces_zero_rbe():
    grid = make_grid(3)
    problem = make_problem(grid, [500.0] * 3, [0.1, 0.3, 0.2],
                           rb=[0.0] * 3, ess=ESS)
    solution = solve(problem)
    assert solution.is_optimal
    sched = solution.schedules["s0"]
    assert np.all(sched.p_rbe == 0.0)


def test_lp_export_of_joint_model(tmp_path):
    scen = random_daily_scenarios(np.random.default_rng(1), 2, steps=4)
    problem = build_problem(scen, small_config(), CaseFlags.for_case(4))
    model = emit_milp(problem)
    path = tmp_path / "model.lp"
    model.write_lp(path)
    text = path.read_text()
    assert "Minimize" in text and "Binary" in text and "s1_p_buy_t0" in text


# -- hand-checked solves -------------------------------------------------------

def test_single_step_purchase():
    # demand 100 kW for 1 h at 0.1 EUR/kWh -> buy 100, pay 10
    grid = make_grid(1)
    problem = make_problem(grid, [100.0], [0.1])
    solution = solve(problem)
    assert solution.is_optimal
    assert solution.objective_eur == pytest.approx(10.0, abs=1e-9)
    assert solution.schedules["s0"].p_buy[0] == pytest.approx(100.0)


def test_single_step_pv_surplus_sold():
    # PV 150, demand 100 -> sell 50 at 0.1 -> revenue 5
    grid = make_grid(1)
    problem = make_problem(grid, [100.0], [0.1], pv=[150.0])
    solution = solve(problem)
    assert solution.is_optimal
    assert solution.objective_eur == pytest.approx(-5.0, abs=1e-9)
    sched = solution.schedules["s0"]
    assert sched.p_sell[0] == pytest.approx(50.0)
    assert sched.p_buy[0] == pytest.approx(0.0, abs=1e-9)


def test_demand_beyond_grid_limit_infeasible():
    grid = make_grid(2)
    problem = make_problem(grid, [2000.0, 2000.0], [0.1, 0.1],
                           grid_params=GridParams(p_buy_max_kw=500.0,
                                                  p_sell_max_kw=500.0))
    solution = solve(problem)
    assert solution.solver_status == "infeasible"
    assert "exchange" in solution.message or "balance" in solution.message


def test_infeasibility_hint_names_family():
    grid = make_grid(1)
    problem = make_problem(grid, [2000.0], [0.1],
                           grid_params=GridParams(500.0, 500.0))
    hint = infeasibility_hint(problem, problem.scenarios[0])
    assert "2000" in hint and "500" in hint


def test_battery_arbitrage_two_steps():
    # cheap then expensive hour; battery starts at min level so the only
    # gain is buy-low/sell-high through storage
    ess = EssParams(capacity_kwh=200.0, p_charge_max_kw=200.0,
                    p_discharge_max_kw=200.0, eta_charge=1.0, eta_discharge=1.0,
                    soc0_fraction=0.1, soc_min_fraction=0.1, soc_max_fraction=1.0)
    grid = make_grid(2)
    problem = make_problem(grid, [0.0, 0.0], [0.05, 0.5], ess=ess)
    solution = solve(problem)
    # charge 180 kWh (to full) at 0.05, discharge at 0.5: profit 180*0.45 = 81
    assert solution.objective_eur == pytest.approx(-81.0, abs=1e-6)


def test_rb_charging_is_free_energy():
    # free braking power charged then discharged against a positive price
    ess = EssParams(capacity_kwh=500.0, p_charge_max_kw=500.0,
                    p_discharge_max_kw=500.0, eta_charge=1.0, eta_discharge=1.0,
                    soc0_fraction=0.0, soc_min_fraction=0.0, soc_max_fraction=1.0)
    grid = make_grid(2)
    problem = make_problem(grid, [0.0, 100.0], [0.2, 0.2], rb=[100.0, 0.0], ess=ess)
    solution = solve(problem)
    # 100 kWh of braking energy covers the 100 kWh load entirely
    assert solution.objective_eur == pytest.approx(0.0, abs=1e-9)
    sched = solution.schedules["s0"]
    assert sched.p_rbe[0] == pytest.approx(100.0)


# -- solution validation -------------------------------------------------------

def solved_small_problem():
    grid = make_grid(4)
    problem = make_problem(grid, [300.0, 800.0, 1200.0, 400.0],
                           [0.05, 0.12, 0.3, 0.08],
                           rb=[150.0, 0.0, 80.0, 0.0],
                           pv=[0.0, 120.0, 200.0, 50.0], ess=ESS)
    return problem, solve(problem)


def test_optimal_solution_validates_clean():
    problem, solution = solved_small_problem()
    report = validate_solution(problem, solution)
    assert report.clean
    assert report.max_residual() <= 1e-6 * 1200.0


def test_corrupted_buy_flagged_as_balance_residual():
    problem, solution = solved_small_problem()
    sched = solution.schedules["s0"]
    bad = DecisionSchedule(
        scenario_id=sched.scenario_id,
        p_buy=sched.p_buy + np.array([1.0, 0, 0, 0]),
        p_sell=sched.p_sell, p_ch=sched.p_ch, p_dis=sched.p_dis,
        p_rbe=sched.p_rbe, soc=sched.soc, u_b=sched.u_b, u_g=sched.u_g,
    )
    solution.schedules["s0"] = bad
    report = validate_solution(problem, solution)
    assert not report.clean
    assert report.residuals["balance"] == pytest.approx(1.0, abs=1e-9)


def test_fractional_binary_flagged():
    problem, solution = solved_small_problem()
    sched = solution.schedules["s0"]
    bad = DecisionSchedule(
        scenario_id=sched.scenario_id, p_buy=sched.p_buy, p_sell=sched.p_sell,
        p_ch=sched.p_ch, p_dis=sched.p_dis, p_rbe=sched.p_rbe, soc=sched.soc,
        u_b=np.where(np.arange(4) == 1, 0.5, sched.u_b), u_g=sched.u_g,
    )
    solution.schedules["s0"] = bad
    report = validate_solution(problem, solution)
    assert any("integrality" in v for v in report.violations)


def test_complementarity_of_solved_instances():
    rng = np.random.default_rng(3)
    for _ in range(10):
        scen = random_daily_scenarios(rng, 1, steps=12)
        problem = build_problem(scen, small_config(), CaseFlags.for_case(4))
        solution = solve(problem)
        assert solution.is_optimal
        for sched in solution.schedules.values():
            assert float((sched.p_buy * sched.p_sell).max()) <= 1e-6 * 5000.0 * 5000.0
            assert float((sched.p_ch * sched.p_dis).max()) <= 1e-6 * 1000.0 * 1000.0


def test_soc_conservation_recomputed():
    problem, solution = solved_small_problem()
    ess = problem.ess
    dt = problem.grid.dt_hours
    sched = solution.schedules["s0"]
    soc = ess.soc0_kwh
    for t in range(4):
        soc = ((1 - ess.self_discharge) * soc
               + ess.eta_charge * (sched.p_rbe[t] + sched.p_ch[t]) * dt
               - ess.eta_discharge * sched.p_dis[t] * dt)
    assert sched.soc[-1] == pytest.approx(soc, abs=1e-9 * ess.capacity_kwh)


# -- conventions and options ---------------------------------------------------

def test_discharge_conventions_differ_when_etas_below_one():
    grid = make_grid(2)
    base = dict(capacity_kwh=200.0, p_charge_max_kw=200.0, p_discharge_max_kw=200.0,
                eta_charge=0.9, eta_discharge=0.9, soc0_fraction=0.1,
                soc_min_fraction=0.1, soc_max_fraction=1.0)
    paper = EssParams(**base, discharge_convention="as-paper")
    divide = EssParams(**base, discharge_convention="divide")
    demand = [0.0, 0.0]
    prices = [0.05, 0.5]
    cost_paper = solve(make_problem(grid, demand, prices, ess=paper)).objective_eur
    cost_divide = solve(make_problem(grid, demand, prices, ess=divide)).objective_eur
    # multiplicative discharge returns more energy per stored kWh
    assert cost_paper < cost_divide - 1e-6


def test_terminal_soc_option_blocks_free_drain():
    grid = make_grid(1)
    base = dict(capacity_kwh=400.0, p_charge_max_kw=400.0, p_discharge_max_kw=400.0,
                eta_charge=1.0, eta_discharge=1.0, soc0_fraction=0.5,
                soc_min_fraction=0.1, soc_max_fraction=1.0)
    free = EssParams(**base)
    held = EssParams(**base, enforce_terminal_soc=True)
    cost_free = solve(make_problem(grid, [100.0], [0.2], ess=free)).objective_eur
    cost_held = solve(make_problem(grid, [100.0], [0.2], ess=held)).objective_eur
    assert cost_free < cost_held
    assert cost_held == pytest.approx(100.0 * 0.2, abs=1e-6)


def test_joint_solve_matches_decomposed():
    scen = random_daily_scenarios(np.random.default_rng(4), 3, steps=12)
    problem = build_problem(scen, small_config(), CaseFlags.for_case(4))
    split = solve(problem)
    together = solve(problem, joint=True)
    assert split.is_optimal and together.is_optimal
    assert split.objective_eur == pytest.approx(together.objective_eur,
                                                rel=1e-9, abs=1e-9)


def test_parallel_scenario_solves_match_serial():
    scen = random_daily_scenarios(np.random.default_rng(5), 4, steps=12)
    problem = build_problem(scen, small_config(), CaseFlags.for_case(4))
    serial = solve(problem, SolverOptions(jobs=1))
    parallel = solve(problem, SolverOptions(jobs=4))
    assert serial.objective_eur == pytest.approx(parallel.objective_eur, rel=1e-12)
    assert serial.per_scenario_cost == parallel.per_scenario_cost


def test_solution_objective_matches_recomputation():
    _, solution = solved_small_problem()
    assert solution.is_optimal
    # recompute through the schedules
    total = sum(solution.per_scenario_cost.values())
    assert solution.objective_eur == pytest.approx(total, rel=1e-6)
