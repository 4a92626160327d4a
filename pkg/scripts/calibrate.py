#!/usr/bin/env python3
"""Run the five strategies on the bundled fixture and report arrivals.

Calibration aid while tuning fixture constants; not part of the test suite.
"""

from __future__ import annotations

import sys
import time as _time
from datetime import datetime
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from solarsim import fixtures
from solarsim.energy import load_vehicle_spec
from solarsim.engine import DEPLETED_MIDHOUR, Session, SimConfig
from solarsim.geo import load_route
from solarsim.planner import PlannerConfig, plan_daily_speeds
from solarsim.strategies import StrategyParams, build_policy, compute_average_speed
from solarsim.weather import load_weather

MIN_SPEED_FIXTURE = 57.0


def fixture_session():
    spec = load_vehicle_spec(fixtures.path(fixtures.VEHICLE))
    route = load_route(fixtures.path(fixtures.ROUTE))
    weather = load_weather(fixtures.path(fixtures.WEATHER))
    cfg = SimConfig(
        start_time=datetime(2023, 10, 22, 8, 0),
        soc_start=fixtures.SOC_START_FRACTION * spec.battery_capacity,
    )
    return Session(spec, route, weather, cfg)


def describe(name, log):
    dists = [f"{d.distance_km:.0f}" for d in log.days]
    halts = sum(1 for s in log.steps if DEPLETED_MIDHOUR in s.events)
    print(
        f"{name:12s} arrival_day={log.arrival_day} time={log.arrival_time} "
        f"total={log.total_distance_km:.1f} km halts={halts} days={dists}"
    )
    return log


def main() -> None:
    base = fixture_session()
    t0 = _time.time()

    v_avg, avg_log = compute_average_speed(base.clone(), max_days=8)
    print(f"average-speed optimum: {v_avg} km/h  ({_time.time()-t0:.2f}s)")

    runs = {}
    for name, params in [
        ("min", StrategyParams(min_speed=MIN_SPEED_FIXTURE)),
        ("max", StrategyParams(max_speed=100.0)),
        ("soc", StrategyParams()),
    ]:
        s = base.clone()
        kind = {"min": "MIN_SPEED", "max": "MAX_SPEED", "soc": "SOC_MAINTAIN"}[name]
        pol = build_policy(kind, s, params)
        runs[name] = describe(name, s.clone().run_to_finish(pol, 8))

    s = base.clone()
    from solarsim.strategies import ConstantSpeedPolicy

    runs["avg"] = describe("avg", avg_log)

    t1 = _time.time()
    plan = plan_daily_speeds(base.clone(), PlannerConfig())
    print(f"plan: {plan.daily_speeds} arrival {plan.predicted_arrival_day} "
          f"{plan.predicted_arrival_time} min_soc {plan.predicted_min_soc:.0f} "
          f"({_time.time()-t1:.2f}s)")
    from solarsim.strategies import DailyPlanPolicy

    s = base.clone()
    runs["daily"] = describe(
        "daily", s.run_to_finish(DailyPlanPolicy(plan.daily_speeds, plan.first_day), 8)
    )

    # SoC band compliance for the soc run
    s = base.clone()
    pol = build_policy("SOC_MAINTAIN", s)
    log = s.run_to_finish(pol, 8)
    cap = base.spec.battery_capacity
    socs = [st.battery_after / cap for st in log.steps]
    speeds = sorted({st.commanded_speed for st in log.steps if st.commanded_speed > 0})
    print(f"soc range [{min(socs):.3f}, {max(socs):.3f}] speeds {speeds[:3]}..{speeds[-3:]}")

    print(f"total {_time.time()-t0:.2f}s")


if __name__ == "__main__":
    main()
