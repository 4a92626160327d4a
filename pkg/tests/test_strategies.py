"""The five speed policies and the strategy factory."""

import pytest

from solarsim.engine import Session, SimConfig
from solarsim.strategies import (
    ConstantSpeedPolicy,
    DailyPlanPolicy,
    InfeasibleSpeedError,
    SocMaintainPolicy,
    StrategyError,
    StrategyParams,
    build_policy,
    compute_average_speed,
)

from conftest import START, constant_weather, southbound_route, toy_session, toy_spec


def test_constant_policy_is_time_invariant():
    s = toy_session()
    p = ConstantSpeedPolicy(64.0)
    assert p.speed(s) == 64.0
    s.step_hour(60.0)
    assert p.speed(s) == 64.0


def test_daily_plan_policy_indexes_by_day_and_holds_last():
    s = toy_session()
    p = DailyPlanPolicy([50.0, 60.0], first_day=1)
    assert p.speed(s) == 50.0
    s.state.day_index = 2
    assert p.speed(s) == 60.0
    s.state.day_index = 7
    assert p.speed(s) == 60.0
    with pytest.raises(StrategyError):
        DailyPlanPolicy([], first_day=1)


def test_soc_policy_band_validation():
    with pytest.raises(StrategyError):
        SocMaintainPolicy(band=(0.8, 0.3))
    with pytest.raises(StrategyError):
        SocMaintainPolicy(band=(-0.1, 0.5))


def test_soc_policy_speeds_on_grid_and_clamped():
    s = toy_session()
    p = SocMaintainPolicy()
    for _ in range(6):
        v = p.speed(s)
        assert 30.0 <= v <= 85.0
        assert v == round(v / s.config.speed_increment) * s.config.speed_increment
        s.step_hour(v)


def test_soc_policy_pushes_toward_band_midpoint():
    low = toy_session(soc_start=300.0)
    high = toy_session(soc_start=2900.0)
    p = SocMaintainPolicy()
    assert p.speed(low) < p.speed(high)


def test_average_speed_is_largest_feasible_constant():
    route = southbound_route(n_nodes=20, spacing_deg=0.5)  # ~1056 km
    base = toy_session(route=route, days=3)
    v, log = compute_average_speed(base, max_days=3)
    assert log.finished
    assert base.config.speed_min <= v <= base.config.speed_max
    # One grid notch faster must not be feasible (v is the maximum).
    if v < base.config.speed_max:
        faster = base.clone()
        flog = faster.run_to_finish(ConstantSpeedPolicy(v + base.config.speed_increment), 3)
        from solarsim.engine import DEPLETED_MIDHOUR
        assert (not flog.finished) or any(
            DEPLETED_MIDHOUR in s.events for s in flog.steps
        )


def test_average_speed_infeasible_carries_fallback():
    route = southbound_route(n_nodes=40, spacing_deg=0.5)
    spec = toy_spec(battery_capacity=600.0)
    wx = constant_weather(days=2, ghi=80.0)
    base = Session(spec, route, wx, SimConfig(start_time=START, soc_start=300.0))
    with pytest.raises(InfeasibleSpeedError) as exc:
        compute_average_speed(base, max_days=2)
    assert exc.value.fallback_log is not None
    assert not exc.value.fallback_log.finished


def test_build_policy_kinds_and_aliases():
    s = toy_session()
    assert isinstance(build_policy("MIN_SPEED", s), ConstantSpeedPolicy)
    assert build_policy("min", s).speed_kmh == s.config.speed_min
    assert build_policy("MAX", s).speed_kmh == s.config.speed_max
    assert isinstance(build_policy("soc", s), SocMaintainPolicy)
    assert isinstance(build_policy("daily-avg", s), DailyPlanPolicy)
    avg = build_policy("AVERAGE", s, StrategyParams(max_days=3))
    assert isinstance(avg, ConstantSpeedPolicy)
    with pytest.raises(StrategyError, match="unknown strategy"):
        build_policy("WARP", s)


def test_build_policy_params_override_speeds():
    s = toy_session()
    p = build_policy("MIN_SPEED", s, StrategyParams(min_speed=44.0))
    assert p.speed_kmh == 44.0
    p = build_policy("MAX_SPEED", s, StrategyParams(max_speed=90.0))
    assert p.speed_kmh == 90.0
