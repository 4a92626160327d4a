"""Daily speed planner: oracle equivalence, filter soundness, refinement."""

import itertools
import random
from datetime import datetime

import pytest

from solarsim.engine import DEPLETED_MIDHOUR, Session, SimConfig
from solarsim.planner import (
    InfeasibleHorizonError,
    PlannerConfig,
    PlannerError,
    feasibility_filter,
    plan_daily_speeds,
    replan,
)
from solarsim.strategies import DailyPlanPolicy

from conftest import START, constant_weather, southbound_route, toy_spec


def toy_instance(rng: random.Random):
    """A small 1-3 day instance with a 4-speed grid."""
    n_nodes = rng.randrange(8, 18)
    route = southbound_route(n_nodes=n_nodes, spacing_deg=0.5)
    wx = constant_weather(days=4, ghi=rng.uniform(300.0, 900.0),
                          temp=rng.uniform(10.0, 35.0),
                          wind_ms=rng.uniform(0.0, 4.0),
                          wind_dir=rng.choice([0.0, 90.0, 180.0]))
    spec = toy_spec(battery_capacity=rng.uniform(1500.0, 3500.0))
    cfg = SimConfig(start_time=START,
                    soc_start=rng.uniform(0.4, 0.95) * spec.battery_capacity,
                    speed_min=40.0, speed_max=70.0, speed_increment=10.0)
    return Session(spec, route, wx, cfg)


def simulate_sequence(base: Session, speeds, max_days: int):
    sim = base.clone()
    return sim.run_to_finish(DailyPlanPolicy(list(speeds), 1), max_days)


def oracle_best_arrival(base: Session, grid, days: int):
    """Exhaustive enumeration: best (arrival_day, arrival_time) achievable."""
    best = None
    for seq in itertools.product(grid, repeat=days):
        log = simulate_sequence(base, seq, days)
        if not log.finished:
            continue
        if any(DEPLETED_MIDHOUR in s.events for s in log.steps):
            continue
        key = (log.arrival_day, log.arrival_time)
        if best is None or key < best:
            best = key
    return best


def test_planner_matches_exhaustive_oracle_on_toys():
    rng = random.Random(20231022)
    grid = [40.0, 50.0, 60.0, 70.0]
    cfg = PlannerConfig(beam_width=64, speed_grid_step=10.0, horizon_days=3,
                        refine_radius=0.0)
    checked = 0
    for _ in range(20):
        base = toy_instance(rng)
        oracle = oracle_best_arrival(base, grid, 3)
        try:
            plan = plan_daily_speeds(base.clone(), cfg)
        except InfeasibleHorizonError:
            assert oracle is None
            continue
        log = simulate_sequence(base, plan.daily_speeds, 3)
        assert oracle is not None
        assert log.finished
        assert (log.arrival_day, log.arrival_time) == oracle
        checked += 1
    assert checked >= 10


def test_plan_predictions_match_simulation():
    rng = random.Random(5)
    base = toy_instance(rng)
    cfg = PlannerConfig(beam_width=16, speed_grid_step=10.0, horizon_days=3)
    plan = plan_daily_speeds(base.clone(), cfg)
    log = simulate_sequence(base, plan.daily_speeds, 3)
    assert plan.feasible
    assert plan.predicted_arrival_day == log.arrival_day
    assert plan.predicted_arrival_time == log.arrival_time
    assert sum(plan.predicted_daily_distances) == pytest.approx(
        log.total_distance_km, abs=1e-6
    )


def test_abundant_energy_plans_speed_max():
    route = southbound_route(n_nodes=10, spacing_deg=0.5)
    spec = toy_spec(panel_area=60.0, battery_capacity=20_000.0)
    wx = constant_weather(days=3, ghi=900.0)
    base = Session(spec, route, wx,
                   SimConfig(start_time=START, soc_start=18_000.0,
                             speed_min=40.0, speed_max=70.0, speed_increment=10.0))
    plan = plan_daily_speeds(base, PlannerConfig(beam_width=8, speed_grid_step=10.0))
    assert all(v == 70.0 for v in plan.daily_speeds)


def test_infeasible_horizon_carries_advisory_plan():
    route = southbound_route(n_nodes=40, spacing_deg=0.5)  # ~2170 km
    spec = toy_spec(battery_capacity=800.0)
    wx = constant_weather(days=2, ghi=100.0)
    base = Session(spec, route, wx,
                   SimConfig(start_time=START, soc_start=400.0,
                             speed_min=40.0, speed_max=70.0, speed_increment=10.0))
    with pytest.raises(InfeasibleHorizonError) as exc:
        plan_daily_speeds(base, PlannerConfig(beam_width=8, speed_grid_step=10.0,
                                              horizon_days=2))
    advisory = exc.value.advisory_plan
    assert advisory is not None
    assert not advisory.feasible
    assert sum(advisory.predicted_daily_distances) > 0.0


def test_filter_never_drops_a_simulatable_speed():
    """Filter soundness: any speed the simulator accepts passes the filter."""
    rng = random.Random(77)
    from solarsim.planner import _day_summaries

    for _ in range(10):
        base = toy_instance(rng)
        summaries = _day_summaries(base, 2)
        day_one = summaries[base.config.start_time.date().isoformat()]
        for v in (40.0, 50.0, 60.0, 70.0):
            log = simulate_sequence(base, [v, v], 2)
            day1 = [s for s in log.steps
                    if s.hour.date() == base.config.start_time.date()]
            clean = day1 and not any(DEPLETED_MIDHOUR in s.events for s in day1)
            if clean:
                assert feasibility_filter(base, v, day_one, base.config.soc_start)


def test_wider_beam_never_arrives_later():
    rng = random.Random(11)
    base = toy_instance(rng)
    narrow = plan_daily_speeds(
        base.clone(), PlannerConfig(beam_width=1, speed_grid_step=10.0))
    wide = plan_daily_speeds(
        base.clone(), PlannerConfig(beam_width=50, speed_grid_step=10.0))
    key = lambda p: (p.predicted_arrival_day, p.predicted_arrival_time)
    assert key(wide) <= key(narrow)


def test_refinement_never_worsens_arrival():
    rng = random.Random(3)
    base = toy_instance(rng)
    coarse = plan_daily_speeds(
        base.clone(), PlannerConfig(beam_width=16, speed_grid_step=10.0,
                                    refine_radius=0.0))
    refined = plan_daily_speeds(
        base.clone(), PlannerConfig(beam_width=16, speed_grid_step=10.0,
                                    refine_radius=2.0))
    key = lambda p: (p.predicted_arrival_day, p.predicted_arrival_time)
    assert key(refined) <= key(coarse)


def test_replan_midjourney_uses_current_state():
    rng = random.Random(9)
    base = toy_instance(rng)
    cfg = PlannerConfig(beam_width=16, speed_grid_step=10.0)
    first = plan_daily_speeds(base.clone(), cfg)
    sim = base.clone()
    sim.run_day(DailyPlanPolicy([first.daily_speeds[0]], 1))
    sim.advance_idle(datetime(2023, 10, 23, 8, 0))
    second = replan(sim.clone(), cfg)
    assert second.first_day == 2
    assert len(second.daily_speeds) <= max(len(first.daily_speeds), 1)


def test_planner_config_validation():
    with pytest.raises(PlannerError):
        PlannerConfig(beam_width=0)
    with pytest.raises(PlannerError):
        PlannerConfig(speed_grid_step=0.0)
    with pytest.raises(PlannerError):
        PlannerConfig(objective="FASTEST_LAP")
