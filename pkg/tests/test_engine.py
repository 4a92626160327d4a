"""Hour-stepped session engine: windows, stepping, conservation, determinism."""

import random
from datetime import datetime, time

import pytest

from solarsim.engine import (
    ARRIVED,
    BATTERY_FULL_SPILL,
    DEPLETED_MIDHOUR,
    OUTSIDE_DRIVING_WINDOW,
    HOUR,
    InputError,
    Session,
    SetupError,
    SimConfig,
    WindowError,
    summarize_journey,
)
from solarsim.strategies import ConstantSpeedPolicy

from conftest import START, constant_weather, southbound_route, toy_session, toy_spec


def test_config_window_nesting_enforced():
    with pytest.raises(SetupError, match="driving window"):
        SimConfig(start_time=START, soc_start=100.0,
                  charging_start=time(9, 0))
    with pytest.raises(SetupError, match="speed_min"):
        SimConfig(start_time=START, soc_start=100.0, speed_min=50.0, speed_max=40.0)


def test_speed_validation():
    s = toy_session()
    with pytest.raises(InputError, match="outside"):
        s.step_hour(10.0)
    with pytest.raises(InputError, match="outside"):
        s.step_hour(500.0)
    with pytest.raises(InputError, match="grid"):
        s.step_hour(60.5)


def test_step_outside_window_raises_with_next_hour():
    s = toy_session()
    s.advance_idle(datetime(2023, 10, 22, 17, 0))
    with pytest.raises(WindowError) as exc:
        s.step_hour(60.0)
    assert exc.value.next_driving_hour == datetime(2023, 10, 23, 8, 0)
    assert "advance_idle" in str(exc.value)


def test_step_moves_distance_equals_speed_times_duration():
    s = toy_session()
    step = s.step_hour(60.0)
    assert step.distance == pytest.approx(60_000.0, rel=1e-6)
    assert step.driven_duration == pytest.approx(1.0, rel=1e-12)
    assert s.state.clock == START + HOUR
    assert s.state.odometer == pytest.approx(60_000.0, rel=1e-6)


def test_step_energy_conservation_single():
    s = toy_session()
    b0 = s.state.battery
    step = s.step_hour(60.0)
    delta = step.battery_after - b0
    bd = step.breakdown
    assert delta == pytest.approx(
        bd.charge - bd.consumption_total - bd.spilled, abs=1e-9
    )


def test_battery_never_exceeds_capacity_and_spill_event():
    spec = toy_spec(panel_area=40.0, battery_capacity=500.0)
    s = toy_session(spec=spec, soc_start=495.0)
    step = s.step_hour(31.0)
    assert step.battery_after <= 500.0
    assert BATTERY_FULL_SPILL in step.events
    assert step.breakdown.spilled > 0.0


def test_depletion_halts_midhour():
    s = toy_session(soc_start=30.0)
    wx_night = constant_weather(ghi=0.0)
    s = Session(toy_spec(), southbound_route(), wx_night,
                SimConfig(start_time=START, soc_start=30.0))
    step = s.step_hour(100.0)
    assert DEPLETED_MIDHOUR in step.events
    assert step.distance < 100_000.0
    assert s.state.battery >= 0.0
    assert s.state.halted_for_charge


def test_arrival_truncates_final_hour():
    route = southbound_route(n_nodes=3, spacing_deg=0.25)  # ~55.6 km
    s = toy_session(route=route)
    s.step_hour(50.0)
    step = s.step_hour(50.0)
    assert ARRIVED in step.events
    assert s.state.finished
    assert step.driven_duration < 1.0
    assert s.state.odometer == pytest.approx(route.total_length, abs=1e-6)
    assert s.state.arrival_time is not None
    assert s.state.arrival_time < s.state.clock + HOUR


def test_post_arrival_step_rejected():
    route = southbound_route(n_nodes=3, spacing_deg=0.1)
    s = toy_session(route=route)
    s.step_hour(50.0)
    with pytest.raises(Exception, match="finished"):
        s.step_hour(50.0)


def test_advance_idle_charges_in_window_only():
    s = toy_session()
    s.step_hour(60.0)  # 09:00
    b0 = s.state.battery
    logs = s.advance_idle(datetime(2023, 10, 23, 8, 0))
    assert s.state.clock == datetime(2023, 10, 23, 8, 0)
    # Charged until 19:00, idle overnight, charged again from 06:30.
    charged = sum(l.breakdown.charge for l in logs)
    assert charged > 0.0
    overnight = [l for l in logs if l.breakdown.charge == 0.0]
    assert overnight
    assert any(OUTSIDE_DRIVING_WINDOW in l.events for l in logs)
    assert all(l.distance == 0.0 and l.commanded_speed == 0.0 for l in logs)
    assert s.state.battery <= s.spec.battery_capacity
    assert s.state.battery > b0
    with pytest.raises(InputError):
        s.advance_idle(datetime(2023, 10, 22, 8, 0))  # into the past


def test_day_index_increments_at_midnight():
    s = toy_session()
    assert s.state.day_index == 1
    s.advance_idle(datetime(2023, 10, 23, 0, 0))
    assert s.state.day_index == 2


def test_determinism_bit_identical_logs():
    speeds = [60.0, 70.0, 55.0, 65.0]

    def run():
        s = toy_session()
        out = []
        for v in speeds:
            out.append(s.step_hour(v))
        return s, out

    s1, a = run()
    s2, b = run()
    assert s1.state.battery == s2.state.battery
    assert s1.state.odometer == s2.state.odometer
    for x, y in zip(a, b):
        assert x.as_dict() == y.as_dict()


def test_clone_is_independent():
    s = toy_session()
    c = s.clone()
    s.step_hour(60.0)
    assert c.state.clock == START
    assert c.state.odometer == 0.0


def test_run_day_follows_policy_and_stops_at_window_end():
    s = toy_session()
    logs = s.run_day(ConstantSpeedPolicy(60.0))
    driving = [l for l in logs if l.commanded_speed > 0]
    assert len(driving) == 9  # 08:00..17:00
    assert s.state.clock.time() >= time(17, 0)


def test_run_to_finish_produces_journey_log():
    route = southbound_route(n_nodes=8, spacing_deg=0.5)  # ~389 km
    s = toy_session(route=route)
    log = s.run_to_finish(ConstantSpeedPolicy(60.0), max_days=3)
    assert log.finished
    assert log.arrival_day == 1
    assert log.total_distance_km == pytest.approx(route.total_length / 1000.0, abs=1e-6)
    assert sum(d.distance_km for d in log.days) == pytest.approx(
        log.total_distance_km, abs=1e-9
    )


def test_run_to_finish_stops_at_weather_span_end():
    route = southbound_route(n_nodes=40, spacing_deg=0.5)  # ~2170 km
    wx = constant_weather(days=2, ghi=500.0)
    s = Session(toy_spec(), route, wx, SimConfig(start_time=START, soc_start=2500.0))
    log = s.run_to_finish(ConstantSpeedPolicy(40.0), max_days=10)
    assert not log.finished
    assert log.total_distance_km < route.total_length / 1000.0


def test_substep_halving_changes_little():
    route = southbound_route(n_nodes=8, spacing_deg=0.5)
    totals = []
    for substep in (250.0, 125.0):
        s = toy_session(route=route, substep_m=substep)
        log = s.run_to_finish(ConstantSpeedPolicy(60.0), max_days=2)
        totals.append(sum(d.consumption_kwh for d in log.days))
    assert abs(totals[0] - totals[1]) / totals[1] < 1e-4


def test_randomized_conservation_and_bounds():
    rng = random.Random(42)
    checked = 0
    for _ in range(40):
        spec = toy_spec(
            battery_capacity=rng.uniform(800.0, 3000.0),
            panel_area=rng.uniform(2.0, 8.0),
        )
        wx = constant_weather(
            ghi=rng.uniform(0.0, 1000.0), temp=rng.uniform(5.0, 40.0),
            wind_ms=rng.uniform(0.0, 6.0), wind_dir=rng.uniform(0.0, 359.0),
        )
        s = Session(spec, southbound_route(), wx,
                    SimConfig(start_time=START,
                              soc_start=rng.uniform(50.0, spec.battery_capacity)))
        for _ in range(5):
            if s.state.finished:
                break
            b0 = s.state.battery
            step = s.step_hour(float(rng.randrange(30, 101)))
            bd = step.breakdown
            assert 0.0 <= step.battery_after <= spec.battery_capacity
            if DEPLETED_MIDHOUR not in step.events:
                assert step.battery_after - b0 == pytest.approx(
                    bd.charge - bd.consumption_total - bd.spilled, abs=1e-9
                )
                checked += 1
    assert checked > 100
