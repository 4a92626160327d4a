"""Route geometry: distances, headings, inclines, lookup, loaders."""

import json
import math

import pytest

from solarsim import fixtures
from solarsim.geo import (
    Route,
    RouteError,
    RouteNode,
    haversine_m,
    initial_bearing_deg,
    load_route,
    segment_geometry,
)

from conftest import southbound_route


def node(lat, lon, alt=0.0, zone="z1"):
    return RouteNode(latitude=lat, longitude=lon, altitude=alt,
                     area_name="", weather_zone_id=zone)


def test_one_degree_of_latitude():
    d = haversine_m(0.0, 0.0, 1.0, 0.0)
    assert d == pytest.approx(111_195.0, rel=1e-3)


def test_route_total_length_two_nodes():
    r = Route([node(0.0, 0.0), node(1.0, 0.0)])
    assert r.total_length == pytest.approx(111_195.0, rel=1e-3)


def test_zero_length_segment_rejected():
    with pytest.raises(RouteError, match="zero-length segment"):
        segment_geometry(node(10.0, 20.0), node(10.0, 20.0))


def test_degenerate_route_rejected():
    with pytest.raises(RouteError, match="degenerate route"):
        Route([node(0.0, 0.0)])


def test_out_of_bounds_coordinates_rejected():
    with pytest.raises(RouteError, match="latitude"):
        node(91.0, 0.0)
    with pytest.raises(RouteError, match="longitude"):
        node(0.0, 181.0)


def test_heading_cardinal_directions():
    assert initial_bearing_deg(0.0, 0.0, 1.0, 0.0) == pytest.approx(0.0, abs=1e-9)
    assert initial_bearing_deg(1.0, 0.0, 0.0, 0.0) == pytest.approx(180.0, abs=1e-9)
    assert initial_bearing_deg(0.0, 0.0, 0.0, 1.0) == pytest.approx(90.0, abs=1e-6)


def test_incline_and_elevation_change():
    seg = segment_geometry(node(0.0, 0.0, 0.0), node(0.009, 0.0, 50.0))
    horizontal = haversine_m(0.0, 0.0, 0.009, 0.0)
    assert seg.elevation_change == 50.0
    assert seg.incline == pytest.approx(math.atan2(50.0, horizontal), rel=1e-12)
    assert seg.length == pytest.approx(math.hypot(horizontal, 50.0), rel=1e-12)


def test_segment_index_and_zone_lookup():
    r = southbound_route(n_nodes=4, spacing_deg=0.5, zones=("a", "b"))
    assert r.zone_at(0.0) == "a"
    assert r.zone_at(r.total_length) == "b"
    with pytest.raises(RouteError):
        r.segment_index_at(-1.0)
    with pytest.raises(RouteError):
        r.segment_index_at(r.total_length + 1.0)


def test_locate_interpolates_altitude():
    r = Route([node(0.0, 0.0, 0.0), node(1.0, 0.0, 100.0)])
    _, lat, _, alt, heading, zone = r.locate(r.total_length / 2.0)
    assert alt == pytest.approx(50.0, rel=1e-6)
    assert lat == pytest.approx(0.5, rel=1e-6)
    assert heading == pytest.approx(0.0, abs=1e-9)
    assert zone == "z1"


def test_elevation_profile_endpoints():
    r = Route([node(0.0, 0.0, 0.0), node(1.0, 0.0, 100.0)])
    prof = r.elevation_profile(0.0, r.total_length, 10_000.0)
    assert prof[0] == (0.0, pytest.approx(0.0))
    assert prof[-1][0] == pytest.approx(r.total_length)
    assert prof[-1][1] == pytest.approx(100.0)


def test_reversed_route_same_length():
    r = southbound_route(n_nodes=6)
    assert r.reversed().total_length == pytest.approx(r.total_length, rel=1e-12)


def test_load_route_json_and_errors(tmp_path):
    good = tmp_path / "r.json"
    good.write_text(json.dumps([
        {"lat": 0.0, "lon": 0.0, "alt_m": 0.0, "zone": "z"},
        {"lat": 1.0, "lon": 0.0, "alt_m": 0.0, "zone": "z"},
    ]))
    assert load_route(good).total_length == pytest.approx(111_195.0, rel=1e-3)

    bad = tmp_path / "bad.json"
    bad.write_text("[{]")
    with pytest.raises(RouteError, match="invalid JSON"):
        load_route(bad)

    missing = tmp_path / "miss.json"
    missing.write_text(json.dumps([{"lat": 0.0, "lon": 0.0}]))
    with pytest.raises(RouteError, match="node 0"):
        load_route(missing)


def test_load_route_csv(tmp_path):
    p = tmp_path / "r.csv"
    p.write_text("lat,lon,alt_m,zone\n0.0,0.0,0.0,z\n1.0,0.0,0.0,z\n")
    assert load_route(p).total_length == pytest.approx(111_195.0, rel=1e-3)


def test_bundled_route_scale():
    r = load_route(fixtures.path(fixtures.ROUTE))
    assert abs(r.total_length / 1000.0 - 3020.0) / 3020.0 < 0.05
    assert len(r.nodes) >= 100
    zones = {n.weather_zone_id for n in r.nodes}
    assert len(zones) >= 2
