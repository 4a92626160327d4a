"""Deterministic solar-vehicle journey simulator.

Route/weather ingestion, an hourly energy-balance engine under race time
windows, five speed strategies, beam-search daily speed planning, and a
session HTTP service.
"""

from .energy import EnergyBreakdown, PhysicsConstants, VehicleSpec, load_vehicle_spec
from .engine import JourneyLog, Session, SimConfig, StepLog, VehicleState, new_session
from .geo import Route, RouteNode, RouteSegment, load_route
from .planner import PlannerConfig, SpeedPlan, plan_daily_speeds, replan
from .weather import WeatherSample, WeatherSeries, load_weather

__version__ = "0.1.0"

__all__ = [
    "EnergyBreakdown",
    "JourneyLog",
    "PhysicsConstants",
    "PlannerConfig",
    "Route",
    "RouteNode",
    "RouteSegment",
    "Session",
    "SimConfig",
    "SpeedPlan",
    "StepLog",
    "VehicleSpec",
    "VehicleState",
    "WeatherSample",
    "WeatherSeries",
    "load_route",
    "load_vehicle_spec",
    "load_weather",
    "new_session",
    "plan_daily_speeds",
    "replan",
    "__version__",
]
