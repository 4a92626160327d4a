"""Hour-stepped journey session under race time-window rules.

A session advances one commanded hour at a time inside the driving window
(08:00-17:00 by default), charging throughout the wider charging window
(06:30-19:00). Motion is integrated piecewise over the route segments
crossed during the hour via the compiled/fallback kernel; battery state is
clamped to [0, capacity] with overflow recorded as spilled energy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from datetime import date, datetime, time, timedelta

import numpy as np

from . import kernel
from .energy import EnergyBreakdown, PhysicsConstants, VehicleSpec, air_density_ideal_gas, charge_power
from .geo import Route
from .weather import WeatherSeries, floor_hour

HOUR = timedelta(hours=1)

# StepLog event tags
DEPLETED_MIDHOUR = "DEPLETED_MIDHOUR"
ARRIVED = "ARRIVED"
BATTERY_FULL_SPILL = "BATTERY_FULL_SPILL"
OUTSIDE_DRIVING_WINDOW = "OUTSIDE_DRIVING_WINDOW"


class EngineError(Exception):
    pass


class SetupError(EngineError):
    pass


class InputError(EngineError):
    pass


class WindowError(EngineError):
    def __init__(self, message: str, next_driving_hour: datetime | None = None):
        super().__init__(message)
        self.next_driving_hour = next_driving_hour


class SessionStateError(EngineError):
    pass


@dataclass(frozen=True)
class SimConfig:
    start_time: datetime
    soc_start: float  # Wh
    driving_start: time = time(8, 0)
    driving_end: time = time(17, 0)
    charging_start: time = time(6, 30)
    charging_end: time = time(19, 0)
    speed_min: float = 30.0  # km/h
    speed_max: float = 130.0  # km/h
    speed_increment: float = 1.0  # km/h
    substep_m: float = 250.0
    charge_while_driving: bool = True
    regen_efficiency: float = 1.0
    air_density_mode: str = "constant"  # or "ideal_gas"
    idle_loss_outside_charging: bool = False

    def __post_init__(self) -> None:
        if not (self.charging_start <= self.driving_start and self.driving_end <= self.charging_end):
            raise SetupError("driving window must lie inside the charging window")
        if not self.speed_min < self.speed_max:
            raise SetupError("speed_min must be < speed_max")
        if self.speed_increment <= 0:
            raise SetupError("speed_increment must be > 0")
        if self.air_density_mode not in ("constant", "ideal_gas"):
            raise SetupError(f"unknown air_density_mode {self.air_density_mode!r}")


@dataclass
class VehicleState:
    odometer: float  # meters
    battery: float  # Wh
    clock: datetime
    day_index: int
    finished: bool = False
    halted_for_charge: bool = False
    arrival_time: datetime | None = None


@dataclass
class StepLog:
    hour: datetime
    commanded_speed: float  # km/h; 0 for idle slices
    distance: float  # meters
    driven_duration: float  # hours
    breakdown: EnergyBreakdown
    events: list[str] = field(default_factory=list)
    odometer_after: float = 0.0
    battery_after: float = 0.0

    def as_dict(self) -> dict:
        d = {
            "hour": self.hour.isoformat(),
            "commanded_speed_kmh": self.commanded_speed,
            "distance_m": self.distance,
            "driven_duration_h": self.driven_duration,
            "events": list(self.events),
            "odometer_m": self.odometer_after,
            "battery_wh": self.battery_after,
        }
        d.update(self.breakdown.as_dict())
        return d


@dataclass
class DaySummary:
    day: int
    date: str
    distance_km: float
    drag_kwh: float
    rolling_kwh: float
    gravitational_kwh: float
    system_kwh: float
    consumption_kwh: float
    charge_kwh: float
    spilled_kwh: float
    battery_end_wh: float

    def as_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class JourneyLog:
    steps: list[StepLog]
    days: list[DaySummary]
    finished: bool
    arrival_day: int | None
    arrival_time: str | None
    total_distance_km: float

    def as_dict(self) -> dict:
        return {
            "finished": self.finished,
            "arrival_day": self.arrival_day,
            "arrival_time": self.arrival_time,
            "total_distance_km": self.total_distance_km,
            "days": [d.as_dict() for d in self.days],
            "steps": [s.as_dict() for s in self.steps],
        }


def summarize_journey(steps: list[StepLog], start_date: date, state: VehicleState) -> JourneyLog:
    by_day: dict[int, list[StepLog]] = {}
    for s in steps:
        di = (s.hour.date() - start_date).days + 1
        by_day.setdefault(di, []).append(s)
    days = []
    for di in sorted(by_day):
        logs = by_day[di]
        bd = EnergyBreakdown()
        for s in logs:
            bd.add(s.breakdown)
        days.append(
            DaySummary(
                day=di,
                date=(start_date + timedelta(days=di - 1)).isoformat(),
                distance_km=sum(s.distance for s in logs) / 1000.0,
                drag_kwh=bd.drag / 1000.0,
                rolling_kwh=bd.rolling / 1000.0,
                gravitational_kwh=bd.gravitational / 1000.0,
                system_kwh=bd.system / 1000.0,
                consumption_kwh=bd.consumption_total / 1000.0,
                charge_kwh=bd.charge / 1000.0,
                spilled_kwh=bd.spilled / 1000.0,
                battery_end_wh=logs[-1].battery_after,
            )
        )
    arrival_day = None
    arrival_time = None
    if state.finished and state.arrival_time is not None:
        arrival_day = (state.arrival_time.date() - start_date).days + 1
        arrival_time = state.arrival_time.isoformat()
    return JourneyLog(
        steps=steps,
        days=days,
        finished=state.finished,
        arrival_day=arrival_day,
        arrival_time=arrival_time,
        total_distance_km=state.odometer / 1000.0,
    )


class _RouteTables:
    """Static per-route arrays consumed by the kernel."""

    def __init__(self, route: Route, spec: VehicleSpec, constants: PhysicsConstants, regen_eff: float):
        n = len(route.segments)
        self.cum = np.asarray(route.cumulative_distance, dtype=np.float64)
        self.grade = np.empty(n)
        self.cos_incline = np.empty(n)
        self.cos_heading = np.empty(n)
        self.sin_heading = np.empty(n)
        zones: list[str] = []
        zone_of: dict[str, int] = {}
        self.zone_idx = np.empty(n, dtype=np.int32)
        for i, seg in enumerate(route.segments):
            g = seg.elevation_change / seg.length
            if g < 0 and regen_eff != 1.0:
                g *= regen_eff
            self.grade[i] = g
            self.cos_incline[i] = math.cos(seg.incline)
            h = math.radians(seg.heading)
            self.cos_heading[i] = math.cos(h)
            self.sin_heading[i] = math.sin(h)
            z = route.nodes[seg.start_node_index].weather_zone_id
            if z not in zone_of:
                zone_of[z] = len(zones)
                zones.append(z)
            self.zone_idx[i] = zone_of[z]
        self.zones = zones
        self.zero_charge = np.zeros(len(zones))


class Session:
    """Single-writer simulation session; steps are strictly serialized."""

    def __init__(
        self,
        spec: VehicleSpec,
        route: Route,
        weather: WeatherSeries,
        config: SimConfig,
        constants: PhysicsConstants | None = None,
    ):
        self.spec = spec
        self.route = route
        self.weather = weather
        self.config = config
        self.constants = constants or PhysicsConstants()
        if config.soc_start > spec.battery_capacity:
            raise SetupError(
                f"soc_start {config.soc_start} exceeds battery_capacity {spec.battery_capacity}"
            )
        if config.soc_start < 0:
            raise SetupError("soc_start must be >= 0")
        if not weather.covers(config.start_time):
            raise SetupError(
                f"start_time {config.start_time.isoformat()} outside weather span"
            )
        missing = set(z for z in (n.weather_zone_id for n in route.nodes)) - set(weather.zones)
        if missing:
            raise SetupError(f"route zones not covered by weather: {sorted(missing)}")
        self.tables = _RouteTables(route, spec, self.constants, config.regen_efficiency)
        self._hour_env_cache: dict[datetime, tuple] = {}
        self.state = VehicleState(
            odometer=0.0,
            battery=config.soc_start,
            clock=config.start_time,
            day_index=1,
        )
        self._start_date = config.start_time.date()

    # -- helpers -------------------------------------------------------------

    def clone(self) -> "Session":
        """Cheap copy sharing immutable inputs and caches; independent state."""
        other = object.__new__(Session)
        other.spec = self.spec
        other.route = self.route
        other.weather = self.weather
        other.config = self.config
        other.constants = self.constants
        other.tables = self.tables
        other._hour_env_cache = self._hour_env_cache
        other.state = replace(self.state)
        other._start_date = self._start_date
        return other

    def _day_of(self, t: datetime) -> int:
        return (t.date() - self._start_date).days + 1

    def _hour_env(self, hour: datetime):
        """Per-zone arrays (wind_x, wind_y, charge_w, drag_coef) for one hour."""
        env = self._hour_env_cache.get(hour)
        if env is None:
            zones = self.tables.zones
            wind_x = np.empty(len(zones))
            wind_y = np.empty(len(zones))
            cw = np.empty(len(zones))
            dc = np.empty(len(zones))
            for i, z in enumerate(zones):
                s = self.weather.sample(z, hour)
                rad = math.radians(s.wind_direction)
                wind_x[i] = s.wind_speed * math.cos(rad)
                wind_y[i] = s.wind_speed * math.sin(rad)
                cw[i] = charge_power(self.spec, s.ghi, s.temperature)
                rho = (
                    air_density_ideal_gas(s.temperature)
                    if self.config.air_density_mode == "ideal_gas"
                    else self.constants.air_density
                )
                dc[i] = 0.5 * rho * self.spec.drag_coefficient * self.spec.frontal_area
            env = (wind_x, wind_y, cw, dc)
            self._hour_env_cache[hour] = env
        return env

    def next_driving_hour(self, t: datetime | None = None) -> datetime:
        """First hour-start >= t at which a full driving step fits."""
        t = t if t is not None else self.state.clock
        cand = floor_hour(t)
        if cand < t:
            cand += HOUR
        while not self._is_driving_hour(cand):
            cand += HOUR
            cand = cand.replace(minute=0)
        return cand

    def _is_driving_hour(self, t: datetime) -> bool:
        cfg = self.config
        if t.time() < cfg.driving_start:
            return False
        end = datetime.combine(t.date(), cfg.driving_end)
        return t + HOUR <= end

    def _charge_overlap_h(self, t0: datetime, t1: datetime) -> float:
        """Hours of [t0, t1) lying inside the charging window."""
        cfg = self.config
        lo = datetime.combine(t0.date(), cfg.charging_start)
        hi = datetime.combine(t0.date(), cfg.charging_end)
        start = max(t0, lo)
        end = min(t1, hi)
        if end <= start:
            return 0.0
        return (end - start).total_seconds() / 3600.0

    def _validate_speed(self, speed_kmh: float) -> None:
        cfg = self.config
        grid = round(speed_kmh / cfg.speed_increment) * cfg.speed_increment
        if abs(speed_kmh - grid) > 1e-9:
            raise InputError(
                f"speed {speed_kmh} km/h is off the {cfg.speed_increment} km/h grid"
            )
        if speed_kmh != 0.0 and not cfg.speed_min <= speed_kmh <= cfg.speed_max:
            raise InputError(
                f"speed {speed_kmh} km/h outside [{cfg.speed_min}, {cfg.speed_max}]"
            )

    # -- operations ----------------------------------------------------------

    def step_hour(self, speed_kmh: float) -> StepLog:
        """Drive (or deliberately hold) at `speed_kmh` for one hour."""
        st = self.state
        if st.finished:
            raise SessionStateError("session already finished")
        self._validate_speed(speed_kmh)
        if not self._is_driving_hour(st.clock):
            nxt = self.next_driving_hour()
            raise WindowError(
                f"driving is permitted from {self.config.driving_start:%H:%M} to "
                f"{self.config.driving_end:%H:%M}; next driving hour is {nxt.isoformat()} "
                "(use advance_idle)",
                next_driving_hour=nxt,
            )
        hour = st.clock
        spec = self.spec
        if speed_kmh == 0.0:
            log = self._idle_slice(hour, hour + HOUR)
            self.state.clock = hour + HOUR
            self.state.day_index = self._day_of(self.state.clock)
            return log

        wind_x, wind_y, cw, dc = self._hour_env(hour)
        if not self.config.charge_while_driving:
            cw = self.tables.zero_charge
        speed_ms = speed_kmh / 3.6
        start_index = self.route.segment_index_at(st.odometer)
        (
            dist,
            drive_s,
            battery,
            e_drag,
            e_roll,
            e_grav,
            e_sys,
            e_charge,
            e_spill,
            halted,
            arrived,
        ) = kernel.drive_hour(
            self.tables.cum,
            self.tables.grade,
            self.tables.cos_incline,
            self.tables.cos_heading,
            self.tables.sin_heading,
            self.tables.zone_idx,
            wind_x,
            wind_y,
            cw,
            dc,
            spec.mass * self.constants.gravity * spec.rolling_resistance,
            spec.mass * self.constants.gravity,
            spec.constant_power_loss,
            speed_ms,
            start_index,
            st.odometer,
            st.battery,
            spec.battery_capacity,
            3600.0,
            self.config.substep_m,
        )
        events = []
        if halted:
            events.append(DEPLETED_MIDHOUR)
            st.halted_for_charge = True
        else:
            st.halted_for_charge = False
        if e_spill > 0.0:
            events.append(BATTERY_FULL_SPILL)
        if arrived:
            events.append(ARRIVED)
            st.finished = True
            st.arrival_time = hour + timedelta(seconds=drive_s)
            st.odometer = self.route.total_length
        else:
            st.odometer += dist
        st.battery = battery
        st.clock = hour + HOUR
        st.day_index = self._day_of(st.clock)
        log = StepLog(
            hour=hour,
            commanded_speed=speed_kmh,
            distance=dist,
            driven_duration=drive_s / 3600.0,
            breakdown=EnergyBreakdown(
                drag=e_drag,
                rolling=e_roll,
                gravitational=e_grav,
                system=e_sys,
                charge=e_charge,
                spilled=e_spill,
            ),
            events=events,
            odometer_after=st.odometer,
            battery_after=st.battery,
        )
        return log

    def _idle_slice(self, t0: datetime, t1: datetime) -> StepLog:
        st = self.state
        overlap = self._charge_overlap_h(t0, t1)
        full_h = (t1 - t0).total_seconds() / 3600.0
        loss_h = overlap if not self.config.idle_loss_outside_charging else full_h
        e_charge = 0.0
        if overlap > 0.0:
            zone = self.route.zone_at(st.odometer)
            s = self.weather.sample(zone, t0)
            e_charge = charge_power(self.spec, s.ghi, s.temperature) * overlap
        e_sys = self.spec.constant_power_loss * loss_h
        e_spill = 0.0
        battery = st.battery + e_charge - e_sys
        if battery > self.spec.battery_capacity:
            e_spill = battery - self.spec.battery_capacity
            battery = self.spec.battery_capacity
        if battery < 0.0:
            battery = 0.0
        st.battery = battery
        events = []
        if not self._is_driving_hour(t0):
            events.append(OUTSIDE_DRIVING_WINDOW)
        if e_spill > 0.0:
            events.append(BATTERY_FULL_SPILL)
        return StepLog(
            hour=t0,
            commanded_speed=0.0,
            distance=0.0,
            driven_duration=0.0,
            breakdown=EnergyBreakdown(system=e_sys, charge=e_charge, spilled=e_spill),
            events=events,
            odometer_after=st.odometer,
            battery_after=st.battery,
        )

    def advance_idle(self, until: datetime) -> list[StepLog]:
        """Stand still (charging when the window allows) until `until`."""
        st = self.state
        if until <= st.clock:
            raise InputError(f"until {until.isoformat()} is not after clock {st.clock.isoformat()}")
        logs = []
        while st.clock < until:
            boundary = floor_hour(st.clock) + HOUR
            t1 = min(until, boundary)
            logs.append(self._idle_slice(st.clock, t1))
            st.clock = t1
            st.day_index = self._day_of(st.clock)
        return logs

    def run_day(self, policy) -> list[StepLog]:
        """Advance to the day's driving start, drive per `policy`, then idle to
        the end of the charging window."""
        st = self.state
        if st.finished:
            raise SessionStateError("session already finished")
        start = self.next_driving_hour()
        logs = []
        if st.clock < start:
            logs.extend(self.advance_idle(start))
        while not st.finished and self._is_driving_hour(st.clock):
            speed = policy.speed(self)
            if speed is None:
                break
            logs.append(self.step_hour(speed))
        if not st.finished:
            day_end = datetime.combine(st.clock.date(), self.config.charging_end)
            if st.clock < day_end:
                logs.extend(self.advance_idle(day_end))
        return logs

    def run_to_finish(self, policy, max_days: int) -> JourneyLog:
        if max_days < 1:
            raise InputError("max_days must be >= 1")
        steps: list[StepLog] = []
        for _ in range(max_days):
            if not self.weather.covers(self.next_driving_hour()):
                break  # weather span exhausted; report progress so far
            steps.extend(self.run_day(policy))
            if self.state.finished:
                break
        return summarize_journey(steps, self._start_date, self.state)


def new_session(
    spec: VehicleSpec,
    route: Route,
    weather: WeatherSeries,
    config: SimConfig,
    constants: PhysicsConstants | None = None,
) -> Session:
    return Session(spec, route, weather, config, constants)
