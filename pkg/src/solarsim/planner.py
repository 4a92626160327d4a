"""Daily average-speed planning by filtered beam search.

Days are atomic search layers: a node is the vehicle state at the end of a
simulated day, expanded by one engine day per candidate grid speed. A cheap
energy-balance bound discards certainly-infeasible speeds before the full
simulation; surviving nodes are ranked lexicographically by (arrival day,
arrival time, -final battery) and the best path gets a +/-2 km/h local
refinement on the 1 km/h grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import datetime, timedelta

from .engine import DEPLETED_MIDHOUR, HOUR, Session
from .strategies import ConstantSpeedPolicy, DailyPlanPolicy

_UNFINISHED_DAY = 10**9


class PlannerError(Exception):
    pass


class InfeasibleHorizonError(PlannerError):
    """No grid plan reaches the goal; carries the most-progress plan."""

    def __init__(self, message: str, advisory_plan: "SpeedPlan | None" = None):
        super().__init__(message)
        self.advisory_plan = advisory_plan


@dataclass(frozen=True)
class PlannerConfig:
    beam_width: int = 50
    speed_grid_step: float = 5.0  # km/h; refined to the engine grid afterwards
    horizon_days: int | None = None  # None: bounded by the weather span
    objective: str = "EARLIEST_ARRIVAL"
    refine_radius: float = 2.0  # km/h; 0 disables the local refinement pass
    use_filter: bool = True

    def __post_init__(self) -> None:
        if self.beam_width < 1:
            raise PlannerError("beam_width must be >= 1")
        if self.speed_grid_step <= 0:
            raise PlannerError("speed_grid_step must be > 0")
        if self.objective != "EARLIEST_ARRIVAL":
            raise PlannerError(f"unsupported objective {self.objective!r}")


@dataclass
class SpeedPlan:
    daily_speeds: list[float]  # km/h, one per planned driving day
    predicted_daily_distances: list[float]  # km
    predicted_arrival_day: int | None
    predicted_arrival_time: str | None
    predicted_min_soc: float  # Wh
    feasible: bool
    first_day: int  # session day index of daily_speeds[0]

    def as_dict(self) -> dict:
        return {
            "daily_kmh": list(self.daily_speeds),
            "predicted_km": list(self.predicted_daily_distances),
            "arrival_day": self.predicted_arrival_day,
            "arrival_time": self.predicted_arrival_time,
            "min_soc_wh": self.predicted_min_soc,
            "feasible": self.feasible,
            "first_day": self.first_day,
        }


@dataclass(frozen=True)
class DayWeatherSummary:
    """Optimistic per-day bounds used by the pre-simulation filter."""

    date_iso: str
    charge_ub_wh: float  # best-case harvest over the charging window
    max_wind_ms: float  # any direction; best case is a pure tailwind


@dataclass
class _Node:
    session: Session
    speeds: tuple[float, ...] = ()
    distances: tuple[float, ...] = ()
    min_soc: float = math.inf
    halts: int = 0
    finished: bool = False
    arrival: datetime | None = None

    def score(self, start_date) -> tuple:
        st = self.session.state
        if self.finished and self.arrival is not None:
            day = (self.arrival.date() - start_date).days + 1
            secs = (
                self.arrival - datetime.combine(self.arrival.date(), datetime.min.time())
            ).total_seconds()
            # Depletion halts rank a finished plan below any halt-free one on
            # the same day: a recommended plan should never pin the battery.
            # Among equally early plans, steadier daily speeds win before the
            # battery comparison: watt-scale battery differences between
            # same-arrival plans are route-texture artifacts, and a constant
            # pace is gentler on the driver.
            return (day, self.halts, secs, _spread(self.speeds), -st.battery, self.speeds)
        return (_UNFINISHED_DAY, 0, -st.odometer, -st.battery, self.speeds)


def _grid_speeds(session: Session, step: float) -> list[float]:
    cfg = session.config
    v = math.ceil(cfg.speed_min / step) * step
    out = []
    while v <= cfg.speed_max:
        out.append(float(v))
        v += step
    if not out:
        out = [cfg.speed_min]
    return out


def _day_summaries(session: Session, horizon_days: int) -> dict[str, DayWeatherSummary]:
    """Best-case charge and wind per upcoming calendar day."""
    out: dict[str, DayWeatherSummary] = {}
    w = session.weather
    cfg = session.config
    spec = session.spec
    from .energy import charge_power

    day = session.state.clock.date()
    for _ in range(horizon_days + 1):
        charge_ub = 0.0
        wind_max = 0.0
        any_hour = False
        for h in range(24):
            t = datetime.combine(day, datetime.min.time()) + h * HOUR
            if not w.covers(t):
                continue
            overlap = session._charge_overlap_h(t, t + HOUR)
            best = 0.0
            for z in session.tables.zones:
                s = w.sample(z, t)
                best = max(best, charge_power(spec, s.ghi, s.temperature))
                wind_max = max(wind_max, s.wind_speed)
            charge_ub += best * overlap
            any_hour = True
        if any_hour:
            out[day.isoformat()] = DayWeatherSummary(day.isoformat(), charge_ub, wind_max)
        day = day + timedelta(days=1)
    return out


def feasibility_filter(
    session: Session,
    candidate_kmh: float,
    summary: DayWeatherSummary,
    battery_wh: float,
) -> bool:
    """Keep `candidate_kmh` unless it is certainly infeasible for the day.

    Uses an optimistic lower bound on consumption (pure tailwind, gentlest
    grade on the route, drive time capped by the distance left to the goal)
    against an optimistic upper bound on harvest, so a speed the full
    simulation would accept is never dropped.
    """
    spec = session.spec
    cfg = session.config
    g = session.constants.gravity
    v = candidate_kmh / 3.6
    air = max(v - summary.max_wind_ms, 0.0)
    rho_max = 1.5  # generous bound across density modes
    drag_lb = 0.5 * spec.drag_coefficient * min(session.constants.air_density, rho_max) \
        * spec.frontal_area * air * air * v
    min_grade = float(session.tables.grade.min())
    grav_lb = spec.mass * g * min(min_grade, 0.0) * v
    roll_lb = spec.mass * g * spec.rolling_resistance * float(session.tables.cos_incline.min()) * v
    window_h = (
        cfg.driving_end.hour * 3600 + cfg.driving_end.minute * 60
        - cfg.driving_start.hour * 3600 - cfg.driving_start.minute * 60
    ) / 3600.0
    remaining_km = (session.route.total_length - session.state.odometer) / 1000.0
    hours_lb = min(window_h, remaining_km / candidate_kmh)
    cons_lb_wh = (
        max(drag_lb + roll_lb + grav_lb, 0.0) + spec.constant_power_loss
    ) * hours_lb
    return battery_wh + summary.charge_ub_wh - cons_lb_wh >= 0.0


def _simulate_plan(base: Session, speeds: list[float], first_day: int, max_days: int):
    sim = base.clone()
    log = sim.run_to_finish(DailyPlanPolicy(speeds, first_day), max_days)
    return sim, log


def _plan_from_simulation(base: Session, speeds: list[float], first_day: int, max_days: int) -> SpeedPlan:
    sim, log = _simulate_plan(base, speeds, first_day, max_days)
    dist_by_day: dict[int, float] = {}
    for s in log.steps:
        di = (s.hour.date() - base._start_date).days + 1
        dist_by_day[di] = dist_by_day.get(di, 0.0) + s.distance
    n_days = len(speeds)
    distances = [
        dist_by_day.get(first_day + i, 0.0) / 1000.0 for i in range(n_days)
    ]
    min_soc = min((s.battery_after for s in log.steps), default=base.state.battery)
    return SpeedPlan(
        daily_speeds=[float(v) for v in speeds],
        predicted_daily_distances=distances,
        predicted_arrival_day=log.arrival_day,
        predicted_arrival_time=log.arrival_time,
        predicted_min_soc=min_soc,
        feasible=log.finished,
        first_day=first_day,
    )


def evaluate_daily_speeds(
    session: Session, speeds: list[float], max_days: int | None = None
) -> SpeedPlan:
    """Predict the outcome of a caller-chosen daily speed sequence.

    Same simulation the beam search scores candidates with, exposed so a
    user can edit a plan day by day and see the predicted arrival and
    battery floor without any client-side modelling. `session` is cloned,
    never mutated.
    """
    if session.state.finished:
        raise PlannerError("nothing to plan: session already finished")
    if not speeds:
        raise PlannerError("speeds must contain at least one day")
    cfg = session.config
    for v in speeds:
        if not (cfg.speed_min <= float(v) <= cfg.speed_max):
            raise PlannerError(
                f"speed {v} outside [{cfg.speed_min}, {cfg.speed_max}] km/h"
            )
    base = session.clone()
    first_driving = base.next_driving_hour()
    first_day = (first_driving.date() - base._start_date).days + 1
    horizon = len(speeds) if max_days is None else max(len(speeds), max_days)
    return _plan_from_simulation(base, [float(v) for v in speeds], first_day, horizon)


def plan_daily_speeds(session: Session, cfg: PlannerConfig) -> SpeedPlan:
    """Beam-search a daily constant-speed plan over the remaining route."""
    if session.state.finished:
        raise PlannerError("nothing to plan: session already finished")
    base = session.clone()
    start_date = base._start_date
    first_driving = base.next_driving_hour()
    first_day = (first_driving.date() - start_date).days + 1

    span_days = (session.weather.last_hour.date() - first_driving.date()).days + 1
    horizon = span_days if cfg.horizon_days is None else min(cfg.horizon_days, span_days)
    if horizon < 1:
        raise PlannerError("weather span does not cover any driving day")

    grid = _grid_speeds(session, cfg.speed_grid_step)
    summaries = _day_summaries(base, horizon)

    beam: list[_Node] = [_Node(session=base)]
    finished_nodes: list[_Node] = []
    for _layer in range(horizon):
        children: list[_Node] = []
        for node in beam:
            if node.finished:
                continue
            day_date = node.session.next_driving_hour().date().isoformat()
            summary = summaries.get(day_date)
            battery = node.session.state.battery
            for v in grid:
                if cfg.use_filter and summary is not None and not feasibility_filter(
                    node.session, v, summary, battery
                ):
                    continue
                child_sess = node.session.clone()
                try:
                    logs = child_sess.run_day(ConstantSpeedPolicy(v))
                except Exception:
                    continue  # weather span exhausted mid-day
                day_dist = sum(s.distance for s in logs)
                day_halts = sum(1 for s in logs if DEPLETED_MIDHOUR in s.events)
                depleted = day_halts > 0
                child = _Node(
                    session=child_sess,
                    speeds=node.speeds + (v,),
                    distances=node.distances + (day_dist,),
                    min_soc=min(node.min_soc, min((s.battery_after for s in logs), default=battery)),
                    halts=node.halts + day_halts,
                    finished=child_sess.state.finished,
                    arrival=child_sess.state.arrival_time,
                )
                if child.finished:
                    finished_nodes.append(child)
                    continue
                if depleted and day_dist < 0.5 * v * 1000.0 * 9.0:
                    continue  # pinned at zero with little progress
                children.append(child)
        if finished_nodes:
            # Layers are calendar days: any path still open can only arrive
            # on a later day than the finishers of this layer.
            break
        if not children:
            break
        children.sort(key=lambda n: n.score(start_date))
        beam = children[: cfg.beam_width]

    if not finished_nodes:
        best_partial = max(beam, key=lambda n: n.session.state.odometer) if beam else None
        if best_partial is not None and best_partial.speeds:
            advisory_speeds = list(best_partial.speeds)
        else:
            # Even with every candidate pruned, report how far the gentlest
            # speed would get as the most-progress advisory.
            advisory_speeds = [grid[0]] * horizon
        advisory = _plan_from_simulation(base, advisory_speeds, first_day, horizon)
        raise InfeasibleHorizonError(
            f"no feasible plan within {horizon} days at any grid speed", advisory
        )

    finished_nodes.sort(key=lambda n: n.score(start_date))
    best_speeds = list(finished_nodes[0].speeds)

    if cfg.refine_radius > 0:
        seeds = [best_speeds]
        const = _best_constant_seed(base, grid, first_day, horizon, start_date, len(best_speeds))
        if const is not None:
            seeds.append(const)
        refined = [
            _refine(base, s, first_day, horizon, cfg, start_date) for s in seeds
        ]
        refined.sort(
            key=lambda s: _log_score(
                _simulate_plan(base, s, first_day, horizon)[1], start_date, s
            )
        )
        best_speeds = refined[0]

    return _plan_from_simulation(base, best_speeds, first_day, horizon)


def _best_constant_seed(base, grid, first_day, horizon, start_date, n_days):
    """Best single-speed plan on the coarse grid, as a refinement seed."""
    best = None
    best_key = None
    for v in grid:
        speeds = [v] * n_days
        _, log = _simulate_plan(base, speeds, first_day, horizon)
        if not log.finished:
            continue
        key = _log_score(log, start_date, speeds)
        if best_key is None or key < best_key:
            best_key = key
            best = speeds
    return best


def _refine(
    base: Session,
    speeds: list[float],
    first_day: int,
    horizon: int,
    cfg: PlannerConfig,
    start_date,
) -> list[float]:
    """Steepest-descent single-day moves of +/-refine_radius km/h on the
    engine grid, applied one at a time until no move improves the score.

    Each round evaluates every single-day change and commits only the best
    one. Because raising any full driving day banks the same extra distance,
    arrival time ties across days and the battery tie-break decides, so the
    spare energy margin flows to the days where speed is cheapest (tailwind,
    cool panels) instead of whichever day a fixed scan order visits first.
    """
    inc = base.config.speed_increment
    _, log = _simulate_plan(base, speeds, first_day, horizon)
    best_key = _log_score(log, start_date, speeds)
    best = list(speeds)
    for _round in range(40):
        round_key = best_key
        round_best = None
        for i in range(len(best)):
            center = best[i]
            lo = max(base.config.speed_min, center - cfg.refine_radius)
            hi = min(base.config.speed_max, center + cfg.refine_radius)
            v = math.ceil(lo / inc) * inc
            while v <= hi:
                if v != best[i]:
                    cand = list(best)
                    cand[i] = v
                    _, clog = _simulate_plan(base, cand, first_day, horizon)
                    key = _log_score(clog, start_date, cand)
                    if key < round_key:
                        round_key = key
                        round_best = cand
                v += inc
        # Paired swaps keep the banked distance (and so the arrival time)
        # unchanged while evening out the speed profile; convexity of the
        # drag term makes a flatter profile strictly cheaper, so these moves
        # escape the lopsided local optima single-day moves get stuck in.
        for i in range(len(best)):
            for j in range(len(best)):
                if i == j:
                    continue
                lo_i = best[i] - inc
                hi_j = best[j] + inc
                if lo_i < base.config.speed_min or hi_j > base.config.speed_max:
                    continue
                cand = list(best)
                cand[i] = lo_i
                cand[j] = hi_j
                _, clog = _simulate_plan(base, cand, first_day, horizon)
                key = _log_score(clog, start_date, cand)
                if key < round_key:
                    round_key = key
                    round_best = cand
        if round_best is None:
            break
        best_key = round_key
        best = round_best
    return best


def _spread(speeds) -> float:
    """Population variance of the daily speeds (steadiness tiebreak)."""
    if not speeds:
        return 0.0
    mean = sum(speeds) / len(speeds)
    return sum((v - mean) ** 2 for v in speeds) / len(speeds)


def _log_score(log, start_date, speeds) -> tuple:
    halts = sum(1 for s in log.steps if DEPLETED_MIDHOUR in s.events)
    if log.finished and log.arrival_time is not None:
        at = datetime.fromisoformat(log.arrival_time)
        day = (at.date() - start_date).days + 1
        secs = (at - datetime.combine(at.date(), datetime.min.time())).total_seconds()
        last_battery = log.steps[-1].battery_after if log.steps else 0.0
        return (day, halts, secs, _spread(speeds), -last_battery, tuple(speeds))
    return (_UNFINISHED_DAY, halts, -log.total_distance_km, 0.0, tuple(speeds))


def replan(session: Session, cfg: PlannerConfig) -> SpeedPlan:
    """Plan the remaining route from the current mid-journey state."""
    return plan_daily_speeds(session, cfg)
