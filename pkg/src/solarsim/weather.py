"""Hourly weather series keyed by (zone, hour).

Samples are piecewise-constant over each wall-clock hour; the whole journey
shares one local timezone, so timestamps are naive datetimes. Series must be
dense: every covered zone needs a sample for every hour of the span.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import datetime, timedelta
from pathlib import Path
from typing import TYPE_CHECKING, Iterable

if TYPE_CHECKING:
    from .geo import Route

HOUR = timedelta(hours=1)


class WeatherError(ValueError):
    """Malformed, sparse, or out-of-range weather input."""


@dataclass(frozen=True)
class WeatherSample:
    zone_id: str
    timestamp: datetime  # start of the hour this sample covers
    ghi: float  # W/m^2
    temperature: float  # degrees C
    wind_direction: float  # degrees [0, 360), direction the wind blows FROM
    wind_speed: float  # m/s

    def __post_init__(self) -> None:
        if self.ghi < 0:
            raise WeatherError(f"{self.zone_id}@{self.timestamp}: negative ghi")
        if self.wind_speed < 0:
            raise WeatherError(f"{self.zone_id}@{self.timestamp}: negative wind_speed")
        if not 0.0 <= self.wind_direction < 360.0:
            raise WeatherError(
                f"{self.zone_id}@{self.timestamp}: wind_direction {self.wind_direction} not in [0, 360)"
            )


def floor_hour(t: datetime) -> datetime:
    return t.replace(minute=0, second=0, microsecond=0)


class WeatherSeries:
    """Dense per-zone hourly samples over one contiguous span."""

    def __init__(self, samples: Iterable[WeatherSample]):
        self._by_key: dict[tuple[str, datetime], WeatherSample] = {}
        for s in samples:
            key = (s.zone_id, s.timestamp)
            if key in self._by_key:
                raise WeatherError(f"duplicate sample for {s.zone_id}@{s.timestamp}")
            self._by_key[key] = s
        if not self._by_key:
            raise WeatherError("empty weather series")
        self.zones = sorted({z for z, _ in self._by_key})
        hours = [h for _, h in self._by_key]
        self.first_hour = min(hours)
        self.last_hour = max(hours)
        self._validate_dense()

    def _validate_dense(self) -> None:
        gaps = []
        n_hours = int((self.last_hour - self.first_hour) / HOUR) + 1
        for zone in self.zones:
            for i in range(n_hours):
                h = self.first_hour + i * HOUR
                if (zone, h) not in self._by_key:
                    gaps.append(f"{zone}@{h.isoformat()}")
        if gaps:
            shown = ", ".join(gaps[:10])
            more = f" (+{len(gaps) - 10} more)" if len(gaps) > 10 else ""
            raise WeatherError(f"sparse series, missing: {shown}{more}")

    def covers(self, t: datetime) -> bool:
        return self.first_hour <= floor_hour(t) <= self.last_hour

    def sample(self, zone: str, t: datetime) -> WeatherSample:
        """Sample of the hour containing `t` (floor rule)."""
        if zone not in set(self.zones):
            raise WeatherError(f"unknown zone {zone!r}")
        h = floor_hour(t)
        if not self.first_hour <= h <= self.last_hour:
            raise WeatherError(
                f"time {t.isoformat()} outside span "
                f"[{self.first_hour.isoformat()}, {self.last_hour.isoformat()}]"
            )
        return self._by_key[(zone, h)]

    def daily_ghi_kwh(self, zone: str, day: datetime) -> float:
        """Sum of hourly GHI over one calendar day, kWh/m^2."""
        day0 = day.replace(hour=0, minute=0, second=0, microsecond=0)
        total = 0.0
        for i in range(24):
            h = day0 + i * HOUR
            if self.first_hour <= h <= self.last_hour:
                total += self._by_key[(zone, h)].ghi
        return total / 1000.0


def forecast_along(
    route: "Route",
    series: WeatherSeries,
    start_odometer: float,
    assumed_speed_kmh: float,
    horizon_h: int,
    start_time: datetime | None = None,
):
    """Project the vehicle forward and sample weather at each future hour.

    Returns (entries, span_exhausted); each entry is (hour, zone, sample).
    The projected odometer clamps at the route end.
    """
    if assumed_speed_kmh <= 0:
        raise WeatherError("assumed_speed must be > 0")
    if horizon_h < 1:
        raise WeatherError("horizon must be >= 1")
    t0 = floor_hour(start_time if start_time is not None else series.first_hour)
    entries = []
    exhausted = False
    for k in range(1, horizon_h + 1):
        t = t0 + k * HOUR
        if not series.covers(t):
            exhausted = True
            break
        odo = min(start_odometer + assumed_speed_kmh * 1000.0 * k, route.total_length)
        zone = route.zone_at(odo)
        entries.append((t, zone, series.sample(zone, t)))
    return entries, exhausted


def _sample_from_record(rec: dict, where: str) -> WeatherSample:
    try:
        return WeatherSample(
            zone_id=str(rec["zone"]),
            timestamp=floor_hour(datetime.fromisoformat(rec["time"])),
            ghi=float(rec["ghi_wm2"]),
            temperature=float(rec["temp_c"]),
            wind_direction=float(rec["wind_dir_deg"]),
            wind_speed=float(rec["wind_ms"]),
        )
    except KeyError as exc:
        raise WeatherError(f"{where}: missing field {exc.args[0]!r}") from exc
    except (TypeError, ValueError) as exc:
        raise WeatherError(f"{where}: {exc}") from exc


def load_weather(path) -> WeatherSeries:
    """Load a JSONL weather file, one sample record per line."""
    path = Path(path)
    samples = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise WeatherError(f"{path}:{lineno}: invalid JSON: {exc.msg}") from exc
            samples.append(_sample_from_record(rec, f"{path}:{lineno}"))
    return WeatherSeries(samples)
