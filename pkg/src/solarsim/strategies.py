"""The five hour-level speed policies.

A policy is an object with `speed(session) -> float | None`; the engine
queries it once per driving hour. MIN/MAX/AVERAGE drive a constant speed,
DAILY_AVERAGE follows a per-day speed plan, and SOC_MAINTAIN is a
proportional controller around the instantaneous power-balance speed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .energy import charge_power
from .engine import DEPLETED_MIDHOUR, JourneyLog, Session

STRATEGY_KINDS = ("MIN_SPEED", "MAX_SPEED", "AVERAGE_SPEED", "DAILY_AVERAGE", "SOC_MAINTAIN")


class StrategyError(Exception):
    pass


class InfeasibleSpeedError(StrategyError):
    """No constant speed finishes the route; carries the min-speed outcome."""

    def __init__(self, message: str, fallback_log: JourneyLog | None = None):
        super().__init__(message)
        self.fallback_log = fallback_log


class ConstantSpeedPolicy:
    """Pure, time-invariant policy: the same speed every driving hour."""

    def __init__(self, speed_kmh: float):
        self.speed_kmh = float(speed_kmh)

    def speed(self, session: Session) -> float:
        return self.speed_kmh


class DailyPlanPolicy:
    """Follows a daily speed plan without modification.

    `first_day` is the session day index the first planned speed applies to;
    if the journey outruns the plan the last speed is held.
    """

    def __init__(self, daily_speeds: list[float], first_day: int):
        if not daily_speeds:
            raise StrategyError("empty speed plan")
        self.daily_speeds = [float(v) for v in daily_speeds]
        self.first_day = first_day

    def speed(self, session: Session) -> float:
        idx = session.state.day_index - self.first_day
        idx = min(max(idx, 0), len(self.daily_speeds) - 1)
        return self.daily_speeds[idx]


class SocMaintainPolicy:
    """Hold state of charge inside a band by modulating speed.

    Speed is the power-balance speed (consumption equals current array
    output, found by bisection) plus a proportional correction for the
    band-midpoint error, clamped to [clamp_lo, clamp_hi] and rounded to the
    engine speed grid.
    """

    def __init__(
        self,
        band: tuple[float, float] = (0.3, 0.8),
        clamp: tuple[float, float] = (30.0, 85.0),
        gain: float = 2.0,
    ):
        lo, hi = band
        if not 0.0 <= lo < hi <= 1.0:
            raise StrategyError(f"invalid SoC band [{lo}, {hi}]")
        self.band = (lo, hi)
        self.clamp = clamp
        self.gain = gain

    def _consumption_power(self, session: Session, speed_ms: float) -> float:
        st = session.state
        i = session.route.segment_index_at(st.odometer)
        t = session.tables
        env = session._hour_env(st.clock)
        wind_x, wind_y, _, drag_coef = env
        zi = t.zone_idx[i]
        vw = wind_x[zi] * t.cos_heading[i] + wind_y[zi] * t.sin_heading[i]
        air = speed_ms + vw
        return (
            drag_coef[zi] * air * air * speed_ms
            + session.spec.mass * session.constants.gravity * session.spec.rolling_resistance
            * t.cos_incline[i] * speed_ms
            + session.spec.mass * session.constants.gravity * t.grade[i] * speed_ms
            + session.spec.constant_power_loss
        )

    def balance_speed_kmh(self, session: Session) -> float:
        """Speed at which consumption power equals current charge power."""
        st = session.state
        zone = session.route.zone_at(st.odometer)
        s = session.weather.sample(zone, st.clock)
        p_charge = charge_power(session.spec, s.ghi, s.temperature)
        hi_ms = self.clamp[1] / 3.6
        if self._consumption_power(session, hi_ms) <= p_charge:
            return self.clamp[1]
        lo_ms = 0.0
        if self._consumption_power(session, lo_ms) >= p_charge:
            return 0.0
        for _ in range(60):
            mid = 0.5 * (lo_ms + hi_ms)
            if self._consumption_power(session, mid) <= p_charge:
                lo_ms = mid
            else:
                hi_ms = mid
        return lo_ms * 3.6

    def speed(self, session: Session) -> float:
        lo, hi = self.band
        mid = 0.5 * (lo + hi)
        soc = session.state.battery / session.spec.battery_capacity
        v = self.balance_speed_kmh(session)
        v += self.gain * (soc - mid) * (self.clamp[1] - self.clamp[0])
        v = min(max(v, self.clamp[0]), self.clamp[1])
        inc = session.config.speed_increment
        v = round(v / inc) * inc
        v = min(max(v, max(self.clamp[0], session.config.speed_min)),
                min(self.clamp[1], session.config.speed_max))
        return v


def policy_speed(policy, session: Session) -> float | None:
    return policy.speed(session)


def compute_average_speed(
    base_session: Session, max_days: int = 8
) -> tuple[float, JourneyLog]:
    """Largest grid speed whose whole-journey run arrives without depletion.

    Scans the grid from the top down: feasibility is not monotone in speed
    (too slow strands the vehicle on low-sun days far from the goal), so the
    first feasible speed from above is the answer.
    """
    cfg = base_session.config
    inc = cfg.speed_increment
    v = math.floor(cfg.speed_max / inc) * inc
    fallback: JourneyLog | None = None
    while v >= cfg.speed_min:
        sim = base_session.clone()
        log = sim.run_to_finish(ConstantSpeedPolicy(v), max_days)
        depleted = any(DEPLETED_MIDHOUR in s.events for s in log.steps)
        if log.finished and not depleted:
            return v, log
        if v == cfg.speed_min:
            fallback = log
        v -= inc
    raise InfeasibleSpeedError(
        "no feasible constant speed on the grid", fallback_log=fallback
    )


@dataclass
class StrategyParams:
    min_speed: float | None = None
    max_speed: float | None = None
    band: tuple[float, float] = (0.3, 0.8)
    clamp: tuple[float, float] = (30.0, 85.0)
    gain: float = 2.0
    max_days: int = 8


STRATEGY_ALIASES = {
    "MIN": "MIN_SPEED",
    "MAX": "MAX_SPEED",
    "AVG": "AVERAGE_SPEED",
    "AVERAGE": "AVERAGE_SPEED",
    "DAILY_AVG": "DAILY_AVERAGE",
    "DAILY": "DAILY_AVERAGE",
    "SOC": "SOC_MAINTAIN",
}

STRATEGY_KINDS = (
    "MIN_SPEED", "MAX_SPEED", "AVERAGE_SPEED", "DAILY_AVERAGE", "SOC_MAINTAIN",
)


def build_policy(
    kind: str,
    session: Session,
    params: StrategyParams | None = None,
    planner_cfg=None,
):
    """Instantiate one of the named strategies for a session."""
    params = params or StrategyParams()
    kind = kind.upper().replace("-", "_")
    kind = STRATEGY_ALIASES.get(kind, kind)
    if kind == "MIN_SPEED":
        return ConstantSpeedPolicy(params.min_speed if params.min_speed is not None else session.config.speed_min)
    if kind == "MAX_SPEED":
        return ConstantSpeedPolicy(params.max_speed if params.max_speed is not None else session.config.speed_max)
    if kind == "AVERAGE_SPEED":
        v, _ = compute_average_speed(session, params.max_days)
        return ConstantSpeedPolicy(v)
    if kind == "DAILY_AVERAGE":
        from .planner import PlannerConfig, plan_daily_speeds

        plan = plan_daily_speeds(session, planner_cfg or PlannerConfig())
        return DailyPlanPolicy(plan.daily_speeds, plan.first_day)
    if kind == "SOC_MAINTAIN":
        return SocMaintainPolicy(band=params.band, clamp=params.clamp, gain=params.gain)
    raise StrategyError(f"unknown strategy kind {kind!r}")
