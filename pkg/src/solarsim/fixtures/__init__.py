"""Bundled Darwin->Adelaide fixture data (route, weather, vehicle).

Besides the three data files, this module records the canonical scenario
constants the fixture was calibrated under, so tests, the CLI, and the
calibration script all run the exact same race configuration.
"""

from datetime import datetime
from importlib import resources
from pathlib import Path


def path(name: str) -> Path:
    """Filesystem path of a bundled fixture file."""
    return Path(resources.files(__package__) / name)


ROUTE = "wsc_route.json"
WEATHER = "wsc_weather.jsonl"
VEHICLE = "wsc_vehicle.toml"

# Canonical race scenario for the bundled fixture.
START_TIME = datetime(2023, 10, 22, 8, 0)
SOC_START_FRACTION = 0.754
# Speed floor/ceiling for the constant-speed strategies: 57 km/h covers
# ~513 km per 9-hour driving day; 100 km/h is the fastest speed at which
# the fixture vehicle can still finish on this route's weather.
MIN_SPEED_KMH = 57.0
MAX_SPEED_KMH = 100.0


def load_scenario():
    """Vehicle spec, route, weather, and engine config for the fixture race.

    Returns a 4-tuple ``(spec, route, weather, config)`` ready to construct
    a :class:`solarsim.engine.Session`.
    """
    from ..energy import load_vehicle_spec
    from ..engine import SimConfig
    from ..geo import load_route
    from ..weather import load_weather

    spec = load_vehicle_spec(path(VEHICLE))
    route = load_route(path(ROUTE))
    weather = load_weather(path(WEATHER))
    config = SimConfig(
        start_time=START_TIME,
        soc_start=SOC_START_FRACTION * spec.battery_capacity,
    )
    return spec, route, weather, config
