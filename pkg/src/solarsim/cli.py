"""Command-line front end: run strategies, plan speeds, serve HTTP, validate data.

Output tables are fixed-width ASCII with kilometers rounded half-up; JSON
output uses the same canonical serialization as the HTTP service, so a
`run --format json` document is byte-identical to the service's simulate
response for the same inputs.
"""

from __future__ import annotations

import csv
import io
import sys
from datetime import datetime
from decimal import ROUND_HALF_UP, Decimal

import click

from . import fixtures
from .energy import load_vehicle_spec
from .engine import EngineError, JourneyLog, Session, SimConfig
from .geo import RouteError, load_route
from .planner import (
    InfeasibleHorizonError,
    PlannerConfig,
    PlannerError,
    plan_daily_speeds,
)
from .service import canonical_json
from .strategies import (
    STRATEGY_KINDS,
    InfeasibleSpeedError,
    StrategyParams,
    build_policy,
)
from .weather import WeatherError, load_weather

EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_INPUT = 2

_STRATEGY_CHOICES = ("min", "max", "avg", "daily-avg", "soc", "all")
_CLI_TO_KIND = {
    "min": "MIN_SPEED",
    "max": "MAX_SPEED",
    "avg": "AVERAGE_SPEED",
    "daily-avg": "DAILY_AVERAGE",
    "soc": "SOC_MAINTAIN",
}


class _InputFileError(click.ClickException):
    """Unreadable or malformed route/weather/vehicle input."""

    exit_code = EXIT_INPUT


def _round_half_up(value: float, digits: int = 0) -> Decimal:
    q = Decimal(1).scaleb(-digits)
    return Decimal(repr(value)).quantize(q, rounding=ROUND_HALF_UP)


def _fmt_km(value: float) -> str:
    return str(_round_half_up(value))


def _load_inputs(route, weather, vehicle):
    try:
        spec = load_vehicle_spec(vehicle)
        rt = load_route(route)
        wx = load_weather(weather)
    except (RouteError, WeatherError, ValueError, OSError) as exc:
        raise _InputFileError(str(exc)) from exc
    return spec, rt, wx


def _base_session(route, weather, vehicle, start_time, soc_fraction) -> Session:
    spec, rt, wx = _load_inputs(route, weather, vehicle)
    try:
        config = SimConfig(
            start_time=datetime.fromisoformat(start_time),
            soc_start=soc_fraction * spec.battery_capacity,
        )
        return Session(spec, rt, wx, config)
    except (EngineError, ValueError) as exc:
        raise _InputFileError(str(exc)) from exc


def _distance_table(rows: list[tuple[str, JourneyLog]]) -> str:
    n_days = max((len(log.days) for _, log in rows), default=0)
    headers = ["Strategy"] + [f"Day{i}" for i in range(1, n_days + 1)] + ["Total"]
    table = [headers]
    for name, log in rows:
        by_day = {d.day: d.distance_km for d in log.days}
        cells = [_fmt_km(by_day.get(i, 0.0)) for i in range(1, n_days + 1)]
        table.append([name] + cells + [_fmt_km(log.total_distance_km)])
    widths = [max(len(r[i]) for r in table) for i in range(len(headers))]
    lines = []
    for r in table:
        lines.append(
            "  ".join(
                cell.ljust(widths[i]) if i == 0 else cell.rjust(widths[i])
                for i, cell in enumerate(r)
            )
        )
    return "\n".join(lines)


def _daily_summary_table(log: JourneyLog, session: Session) -> str:
    """Per-day weather and energy rows for one journey."""
    days = log.days
    wx = session.weather
    zones = session.tables.zones
    ghi, tmax = [], []
    for d in days:
        day0 = datetime.fromisoformat(d.date)
        ghi.append(sum(wx.daily_ghi_kwh(z, day0) for z in zones) / len(zones))
        temps = [
            wx.sample(zones[0], h).temperature
            for h in (day0.replace(hour=hh) for hh in range(24))
            if wx.covers(h)
        ]
        tmax.append(max(temps) if temps else 0.0)
    rows = [
        ("GHI", [f"{v:.3f}" for v in ghi]),
        ("Temperature", [f"{v:.1f}" for v in tmax]),
        ("Distance", [str(_round_half_up(d.distance_km)) for d in days]),
        ("Drag", [f"{d.drag_kwh:.3f}" for d in days]),
        ("Rolling", [f"{d.rolling_kwh:.3f}" for d in days]),
        ("Gravitational", [f"{d.gravitational_kwh:.3f}" for d in days]),
        ("Consumption", [f"{d.consumption_kwh:.3f}" for d in days]),
        ("Generation", [f"{d.charge_kwh:.3f}" for d in days]),
    ]
    headers = ["Data"] + [f"Day{d.day}" for d in days]
    table = [headers] + [[name] + cells for name, cells in rows]
    widths = [max(len(r[i]) for r in table) for i in range(len(headers))]
    lines = []
    for r in table:
        lines.append(
            "  ".join(
                cell.ljust(widths[i]) if i == 0 else cell.rjust(widths[i])
                for i, cell in enumerate(r)
            )
        )
    return "\n".join(lines)


def _steps_csv(log: JourneyLog) -> str:
    buf = io.StringIO()
    fields = [
        "hour", "commanded_speed_kmh", "distance_m", "driven_duration_h",
        "drag_wh", "rolling_wh", "gravitational_wh", "system_wh",
        "charge_wh", "spilled_wh", "odometer_m", "battery_wh", "events",
    ]
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for s in log.steps:
        d = s.as_dict()
        d["events"] = "|".join(d["events"])
        writer.writerow({k: d[k] for k in fields})
    return buf.getvalue()


def _emit(text: str, out, exact: bool = False) -> None:
    """Print `text` and optionally write it to `out`.

    With `exact` the file holds `text` byte-for-byte (no trailing newline),
    so machine-readable output can be compared against HTTP response bodies.
    """
    click.echo(text, nl=not text.endswith("\n"))
    if out:
        with open(out, "w") as fh:
            fh.write(text if exact or text.endswith("\n") else text + "\n")


def _strategy_params(min_speed, max_speed, max_days) -> StrategyParams:
    return StrategyParams(min_speed=min_speed, max_speed=max_speed, max_days=max_days)


_COMMON = [
    click.option("--route", type=click.Path(exists=True, dir_okay=False),
                 default=None, help="Route file (JSON or CSV); bundled fixture if omitted."),
    click.option("--weather", type=click.Path(exists=True, dir_okay=False),
                 default=None, help="Weather series (JSONL); bundled fixture if omitted."),
    click.option("--vehicle", type=click.Path(exists=True, dir_okay=False),
                 default=None, help="Vehicle spec file; bundled fixture if omitted."),
    click.option("--start-time", default=None,
                 help="Race start (ISO timestamp); fixture default if omitted."),
    click.option("--soc-start", type=float, default=fixtures.SOC_START_FRACTION,
                 show_default=True, help="Initial state of charge as a fraction of capacity."),
    click.option("--seedless", is_flag=True, default=False,
                 help="Reserved; the simulator is always deterministic."),
]


def _with_common(fn):
    for deco in reversed(_COMMON):
        fn = deco(fn)
    return fn


def _resolve_common(route, weather, vehicle, start_time):
    route = route or str(fixtures.path(fixtures.ROUTE))
    weather = weather or str(fixtures.path(fixtures.WEATHER))
    vehicle = vehicle or str(fixtures.path(fixtures.VEHICLE))
    start_time = start_time or fixtures.START_TIME.isoformat()
    return route, weather, vehicle, start_time


@click.group()
def main() -> None:
    """Deterministic solar-vehicle journey simulator."""


@main.command()
@_with_common
@click.option("--strategy", type=click.Choice(_STRATEGY_CHOICES), default="all",
              show_default=True)
@click.option("--format", "fmt", type=click.Choice(("table", "json", "csv")),
              default="table", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Also write the report to this file.")
@click.option("--beam-width", type=int, default=50, show_default=True)
@click.option("--min-speed", type=float, default=fixtures.MIN_SPEED_KMH, show_default=True)
@click.option("--max-speed", type=float, default=fixtures.MAX_SPEED_KMH, show_default=True)
@click.option("--max-days", type=int, default=14, show_default=True)
def run(route, weather, vehicle, start_time, soc_start, seedless, strategy, fmt,
        out, beam_width, min_speed, max_speed, max_days):
    """Simulate one strategy (or all five) over the whole route."""
    route, weather, vehicle, start_time = _resolve_common(route, weather, vehicle, start_time)
    base = _base_session(route, weather, vehicle, start_time, soc_start)
    params = _strategy_params(min_speed, max_speed, max_days)
    planner_cfg = PlannerConfig(beam_width=beam_width)
    kinds = (
        list(STRATEGY_KINDS) if strategy == "all" else [_CLI_TO_KIND[strategy]]
    )
    rows: list[tuple[str, JourneyLog]] = []
    infeasible = False
    for kind in kinds:
        sim = base.clone()
        try:
            policy = build_policy(kind, sim, params, planner_cfg=planner_cfg)
            log = sim.run_to_finish(policy, max_days)
        except InfeasibleSpeedError as exc:
            infeasible = True
            log = exc.fallback_log
            if log is None:
                raise click.ClickException(f"{kind}: {exc}") from exc
        except (InfeasibleHorizonError,) as exc:
            infeasible = True
            if exc.advisory_plan is None:
                raise click.ClickException(f"{kind}: {exc}") from exc
            sim = base.clone()
            policy = build_policy(
                "DAILY_AVERAGE", sim, params,
                planner_cfg=planner_cfg,
            )
            log = sim.run_to_finish(policy, max_days)
        except (EngineError, PlannerError, WeatherError) as exc:
            raise click.ClickException(f"{kind}: {exc}") from exc
        if not log.finished:
            infeasible = True
        rows.append((kind, log))

    if fmt == "json":
        if strategy == "all":
            text = canonical_json({name: log.as_dict() for name, log in rows})
        else:
            text = canonical_json(rows[0][1].as_dict())
    elif fmt == "csv":
        text = "".join(
            (f"# {name}\n" if strategy == "all" else "") + _steps_csv(log)
            for name, log in rows
        )
    else:
        parts = [_distance_table(rows)]
        for name, log in rows:
            if strategy == "all" and name != "DAILY_AVERAGE":
                continue
            parts.append("")
            parts.append(f"Daily summary ({name})")
            parts.append(_daily_summary_table(log, base))
        text = "\n".join(parts)
    _emit(text, out, exact=fmt == "json")
    sys.exit(EXIT_INFEASIBLE if infeasible else EXIT_OK)


@main.command("plan")
@_with_common
@click.option("--format", "fmt", type=click.Choice(("table", "json")),
              default="table", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.option("--beam-width", type=int, default=50, show_default=True)
@click.option("--grid-step", type=float, default=5.0, show_default=True)
@click.option("--horizon-days", type=int, default=None)
@click.option("--no-filter", is_flag=True, default=False,
              help="Disable the pre-simulation feasibility filter.")
def plan_cmd(route, weather, vehicle, start_time, soc_start, seedless, fmt, out,
             beam_width, grid_step, horizon_days, no_filter):
    """Compute the daily average-speed plan for the route."""
    route, weather, vehicle, start_time = _resolve_common(route, weather, vehicle, start_time)
    base = _base_session(route, weather, vehicle, start_time, soc_start)
    cfg = PlannerConfig(
        beam_width=beam_width,
        speed_grid_step=grid_step,
        horizon_days=horizon_days,
        use_filter=not no_filter,
    )
    try:
        plan = plan_daily_speeds(base, cfg)
    except InfeasibleHorizonError as exc:
        click.echo(f"infeasible: {exc}", err=True)
        if exc.advisory_plan is not None:
            click.echo(canonical_json(exc.advisory_plan.as_dict()), err=True)
        sys.exit(EXIT_INFEASIBLE)
    except (PlannerError, EngineError, WeatherError) as exc:
        raise click.ClickException(str(exc)) from exc

    if fmt == "json":
        text = canonical_json(plan.as_dict())
    else:
        lines = ["Day  Speed(km/h)  Predicted(km)"]
        for i, (v, d) in enumerate(zip(plan.daily_speeds, plan.predicted_daily_distances)):
            lines.append(f"{plan.first_day + i:>3}  {v:>11.1f}  {d:>13.1f}")
        lines.append(f"Arrival: day {plan.predicted_arrival_day} at {plan.predicted_arrival_time}")
        lines.append(f"Minimum state of charge: {plan.predicted_min_soc:.0f} Wh")
        text = "\n".join(lines)
    _emit(text, out, exact=fmt == "json")
    sys.exit(EXIT_OK)


@main.command()
@click.option("--listen", default="127.0.0.1:8000", show_default=True,
              help="host:port to bind.")
@click.option("--data-dir", type=click.Path(file_okay=False),
              default="./solarsim-data", show_default=True)
def serve(listen, data_dir):
    """Start the HTTP session service."""
    from .service import main as service_main

    service_main(listen=listen, data_dir=data_dir)


@main.command()
@click.option("--route", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--weather", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--vehicle", type=click.Path(exists=True, dir_okay=False), default=None)
def validate(route, weather, vehicle):
    """Check data files and report problems without simulating."""
    if not any((route, weather, vehicle)):
        raise click.ClickException("nothing to validate: pass --route/--weather/--vehicle")
    failed = False
    if route:
        try:
            rt = load_route(route)
            click.echo(f"route OK: {len(rt.nodes)} nodes, {rt.total_length / 1000.0:.1f} km")
        except (RouteError, ValueError, OSError) as exc:
            failed = True
            click.echo(f"route INVALID: {exc}")
    if weather:
        try:
            wx = load_weather(weather)
            click.echo(
                f"weather OK: {len(wx.zones)} zones, "
                f"{wx.first_hour.isoformat()} .. {wx.last_hour.isoformat()}"
            )
        except (WeatherError, ValueError, OSError) as exc:
            failed = True
            click.echo(f"weather INVALID: {exc}")
    if vehicle:
        try:
            spec = load_vehicle_spec(vehicle)
            click.echo(f"vehicle OK: {spec.mass:.0f} kg, {spec.battery_capacity:.0f} Wh")
        except (ValueError, OSError) as exc:
            failed = True
            click.echo(f"vehicle INVALID: {exc}")
    sys.exit(EXIT_INPUT if failed else EXIT_OK)


if __name__ == "__main__":
    main()
