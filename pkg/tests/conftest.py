"""Shared builders: small synthetic routes/weather plus the bundled scenario."""

from datetime import datetime, timedelta

import pytest

from solarsim import fixtures
from solarsim.energy import VehicleSpec
from solarsim.engine import Session, SimConfig
from solarsim.geo import Route, RouteNode
from solarsim.weather import WeatherSample, WeatherSeries

HOUR = timedelta(hours=1)

START = datetime(2023, 10, 22, 8, 0)


def toy_spec(**overrides) -> VehicleSpec:
    base = dict(
        panel_area=4.0,
        panel_efficiency=0.25,
        system_efficiency=0.9,
        mass=300.0,
        drag_coefficient=0.12,
        frontal_area=1.0,
        rolling_resistance=0.008,
        battery_capacity=3000.0,
        constant_power_loss=20.0,
        panel_temp_coefficient=0.0016,
    )
    base.update(overrides)
    return VehicleSpec(**base)


def southbound_route(n_nodes: int = 14, spacing_deg: float = 0.5,
                     zones: tuple[str, ...] = ("z1",), altitudes=None) -> Route:
    """Flat route heading due south; ~55.6 km per node at 0.5 deg spacing."""
    nodes = []
    for i in range(n_nodes):
        zone = zones[min(i * len(zones) // n_nodes, len(zones) - 1)]
        alt = altitudes[i] if altitudes else 0.0
        nodes.append(
            RouteNode(
                latitude=-12.0 - i * spacing_deg,
                longitude=131.0,
                altitude=alt,
                area_name=f"wp{i}",
                weather_zone_id=zone,
            )
        )
    return Route(nodes)


def constant_weather(zones=("z1",), start: datetime = START.replace(hour=0),
                     days: int = 3, ghi: float = 700.0, temp: float = 25.0,
                     wind_ms: float = 0.0, wind_dir: float = 0.0) -> WeatherSeries:
    samples = []
    for zone in zones:
        for h in range(days * 24):
            samples.append(
                WeatherSample(
                    zone_id=zone,
                    timestamp=start + h * HOUR,
                    ghi=ghi,
                    temperature=temp,
                    wind_direction=wind_dir,
                    wind_speed=wind_ms,
                )
            )
    return WeatherSeries(samples)


def toy_session(spec=None, route=None, weather=None, days: int = 3,
                soc_start: float = 2500.0, **config_overrides) -> Session:
    spec = spec or toy_spec()
    route = route or southbound_route()
    weather = weather or constant_weather(
        zones=tuple(sorted({n.weather_zone_id for n in route.nodes})), days=days
    )
    cfg = SimConfig(start_time=START, soc_start=soc_start, **config_overrides)
    return Session(spec, route, weather, cfg)


@pytest.fixture(scope="session")
def race():
    """The bundled Darwin->Adelaide scenario (spec, route, weather, config)."""
    return fixtures.load_scenario()


@pytest.fixture()
def race_session(race):
    spec, route, weather, cfg = race
    return Session(spec, route, weather, cfg)
