"""Route ingestion and geometry queries.

Routes are ordered node lists (lat/lon/altitude/name/weather zone) read from
JSON or CSV. Segment lengths use the haversine great-circle distance on a
mean-radius sphere with a Pythagorean correction for the altitude difference;
headings are initial great-circle bearings.
"""

from __future__ import annotations

import bisect
import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

EARTH_RADIUS_M = 6_371_000.0


class RouteError(ValueError):
    """Malformed or degenerate route input."""


@dataclass(frozen=True)
class RouteNode:
    latitude: float
    longitude: float
    altitude: float
    area_name: str
    weather_zone_id: str
    curvature: float | None = None  # parsed-through metadata, unused by physics

    def __post_init__(self) -> None:
        if not -90.0 <= self.latitude <= 90.0:
            raise RouteError(f"latitude {self.latitude} out of [-90, 90]")
        if not -180.0 <= self.longitude <= 180.0:
            raise RouteError(f"longitude {self.longitude} out of [-180, 180]")
        if not self.weather_zone_id:
            raise RouteError("weather_zone_id must be non-empty")


@dataclass(frozen=True)
class RouteSegment:
    start_node_index: int
    length: float  # meters, > 0
    heading: float  # degrees [0, 360), clockwise from true north
    incline: float  # radians
    elevation_change: float  # meters, signed


def haversine_m(lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    """Great-circle distance on the mean-radius sphere, meters."""
    p1, p2 = math.radians(lat1), math.radians(lat2)
    dphi = p2 - p1
    dlmb = math.radians(lon2 - lon1)
    a = math.sin(dphi / 2) ** 2 + math.cos(p1) * math.cos(p2) * math.sin(dlmb / 2) ** 2
    return 2 * EARTH_RADIUS_M * math.asin(math.sqrt(a))


def initial_bearing_deg(lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    """Initial great-circle bearing from point 1 to point 2, degrees [0, 360)."""
    p1, p2 = math.radians(lat1), math.radians(lat2)
    dlmb = math.radians(lon2 - lon1)
    y = math.sin(dlmb) * math.cos(p2)
    x = math.cos(p1) * math.sin(p2) - math.sin(p1) * math.cos(p2) * math.cos(dlmb)
    return math.degrees(math.atan2(y, x)) % 360.0


def segment_geometry(a: RouteNode, b: RouteNode, start_index: int = 0) -> RouteSegment:
    """Derive length/heading/incline for the leg from node `a` to node `b`."""
    horizontal = haversine_m(a.latitude, a.longitude, b.latitude, b.longitude)
    dalt = b.altitude - a.altitude
    if horizontal == 0.0 and dalt == 0.0:
        raise RouteError(f"zero-length segment at node {start_index}")
    length = math.hypot(horizontal, dalt)
    incline = math.atan2(dalt, horizontal) if horizontal > 0 else math.copysign(math.pi / 2, dalt)
    if not abs(incline) < math.pi / 2:
        raise RouteError(f"vertical segment at node {start_index}")
    heading = initial_bearing_deg(a.latitude, a.longitude, b.latitude, b.longitude)
    return RouteSegment(
        start_node_index=start_index,
        length=length,
        heading=heading,
        incline=incline,
        elevation_change=dalt,
    )


class Route:
    """Immutable ordered route with derived per-segment geometry."""

    def __init__(self, nodes: list[RouteNode]):
        if len(nodes) < 2:
            raise RouteError("degenerate route: need at least 2 nodes")
        self.nodes = list(nodes)
        self.segments = [
            segment_geometry(a, b, i) for i, (a, b) in enumerate(zip(nodes, nodes[1:]))
        ]
        cum = [0.0]
        for seg in self.segments:
            cum.append(cum[-1] + seg.length)
        self.cumulative_distance = cum

    @property
    def total_length(self) -> float:
        return self.cumulative_distance[-1]

    def segment_index_at(self, odometer: float) -> int:
        if not 0.0 <= odometer <= self.total_length:
            raise RouteError(
                f"odometer {odometer} outside [0, {self.total_length}]"
            )
        idx = bisect.bisect_right(self.cumulative_distance, odometer) - 1
        return min(idx, len(self.segments) - 1)

    def locate(self, odometer: float):
        """Interpolated position at `odometer` meters from the start.

        Returns (segment_index, latitude, longitude, altitude, heading,
        weather_zone_id). The zone is that of the containing segment's start
        node.
        """
        i = self.segment_index_at(odometer)
        seg = self.segments[i]
        a, b = self.nodes[i], self.nodes[i + 1]
        frac = (odometer - self.cumulative_distance[i]) / seg.length
        return (
            i,
            a.latitude + frac * (b.latitude - a.latitude),
            a.longitude + frac * (b.longitude - a.longitude),
            a.altitude + frac * (b.altitude - a.altitude),
            seg.heading,
            a.weather_zone_id,
        )

    def zone_at(self, odometer: float) -> str:
        return self.nodes[self.segment_index_at(odometer)].weather_zone_id

    def altitude_at(self, odometer: float) -> float:
        return self.locate(odometer)[3]

    def elevation_profile(
        self, start_m: float, end_m: float, sample_every_m: float
    ) -> list[tuple[float, float]]:
        """Inclusive-endpoint (odometer, altitude) samples every `sample_every_m`."""
        if not 0.0 <= start_m < end_m <= self.total_length:
            raise RouteError(f"bad profile range [{start_m}, {end_m}]")
        if sample_every_m <= 0:
            raise RouteError("sample_every must be > 0")
        samples = []
        d = start_m
        while d < end_m:
            samples.append((d, self.altitude_at(d)))
            d += sample_every_m
        samples.append((end_m, self.altitude_at(end_m)))
        return samples

    def reversed(self) -> "Route":
        return Route(list(reversed(self.nodes)))

    def polyline(self) -> list[tuple[float, float]]:
        return [(n.latitude, n.longitude) for n in self.nodes]


def _node_from_record(rec: dict, where: str) -> RouteNode:
    try:
        return RouteNode(
            latitude=float(rec["lat"]),
            longitude=float(rec["lon"]),
            altitude=float(rec["alt_m"]),
            area_name=str(rec.get("name", "")),
            weather_zone_id=str(rec["zone"]),
            curvature=float(rec["curvature"]) if "curvature" in rec and rec["curvature"] not in ("", None) else None,
        )
    except KeyError as exc:
        raise RouteError(f"{where}: missing field {exc.args[0]!r}") from exc
    except (TypeError, ValueError) as exc:
        raise RouteError(f"{where}: {exc}") from exc


def load_route(path) -> Route:
    """Load a route from a JSON node array or a CSV with a lat,lon,... header."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    nodes: list[RouteNode] = []
    if text.lstrip().startswith("["):
        try:
            records = json.loads(text)
        except json.JSONDecodeError as exc:
            raise RouteError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
        if not isinstance(records, list):
            raise RouteError(f"{path}: expected a JSON array of node records")
        for i, rec in enumerate(records):
            nodes.append(_node_from_record(rec, f"{path}: node {i}"))
    else:
        reader = csv.DictReader(text.splitlines())
        required = {"lat", "lon", "alt_m", "zone"}
        if not reader.fieldnames or not required <= set(reader.fieldnames):
            raise RouteError(f"{path}: CSV header must contain {sorted(required)}")
        for i, rec in enumerate(reader):
            nodes.append(_node_from_record(rec, f"{path}: record {i}"))
    if len(nodes) < 2:
        raise RouteError(f"{path}: degenerate route: need at least 2 nodes")
    return Route(nodes)
