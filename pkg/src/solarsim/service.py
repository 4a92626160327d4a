"""Event-sourced HTTP session service over the engine and planner.

Routes and weather series are ingested once and addressed by a hash of
their canonicalized content. Each simulation session appends every
state-changing command to a per-session JSONL log; restarting the service
replays those logs through the (deterministic) engine, reproducing every
session state bit-exactly. Mutations carry an optimistic version token and
are serialized per session.
"""

from __future__ import annotations

import hashlib
import json
import threading
from dataclasses import dataclass, field
from datetime import datetime, time
from pathlib import Path
from typing import Any

from fastapi import FastAPI, Request
from fastapi.responses import Response

from .energy import VehicleSpec
from .engine import (
    EngineError,
    InputError,
    Session,
    SessionStateError,
    SetupError,
    SimConfig,
    WindowError,
    summarize_journey,
)
from .geo import Route, RouteError, load_route
from .planner import (
    InfeasibleHorizonError,
    PlannerConfig,
    PlannerError,
    evaluate_daily_speeds,
    plan_daily_speeds,
)
from .strategies import (
    InfeasibleSpeedError,
    StrategyParams,
    build_policy,
)
from .weather import WeatherError, WeatherSeries, forecast_along, load_weather

DEFAULT_MAX_DAYS = 14


def canonical_json(obj: Any) -> str:
    """Deterministic JSON used for content hashes and comparable payloads."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def content_id(prefix: str, obj: Any) -> str:
    digest = hashlib.sha256(canonical_json(obj).encode()).hexdigest()
    return f"{prefix}-{digest[:16]}"


class ServiceError(Exception):
    """Transport-level error carrying the envelope fields."""

    def __init__(self, status: int, code: str, message: str, details: dict | None = None):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.details = details or {}


def _not_found(kind: str, resource_id: str) -> ServiceError:
    return ServiceError(404, "not_found", f"unknown {kind} id {resource_id!r}",
                        {"id": resource_id, "kind": kind})


def _validation(message: str, details: dict | None = None) -> ServiceError:
    return ServiceError(422, "validation_error", message, details)


# -- payload parsing ---------------------------------------------------------

_TIME_FIELDS = ("driving_start", "driving_end", "charging_start", "charging_end")
_CONFIG_FLOATS = (
    "speed_min", "speed_max", "speed_increment", "substep_m", "regen_efficiency",
)


def _parse_vehicle(payload: Any) -> VehicleSpec:
    if not isinstance(payload, dict):
        raise _validation("vehicle must be an object of spec fields")
    try:
        return VehicleSpec(**{k: float(v) for k, v in payload.items()})
    except TypeError as exc:
        raise _validation(f"bad vehicle spec: {exc}") from exc
    except ValueError as exc:
        msg = str(exc)
        raise _validation(f"bad vehicle spec: {msg}", {"field": msg.split()[0]}) from exc


def _parse_config(payload: Any) -> SimConfig:
    if not isinstance(payload, dict):
        raise _validation("config must be an object")
    kwargs: dict[str, Any] = {}
    try:
        kwargs["start_time"] = datetime.fromisoformat(payload["start_time"])
        kwargs["soc_start"] = float(payload["soc_start"])
    except KeyError as exc:
        raise _validation(f"config is missing {exc.args[0]!r}", {"field": exc.args[0]})
    except (TypeError, ValueError) as exc:
        raise _validation(f"bad config value: {exc}") from exc
    for name in _TIME_FIELDS:
        if name in payload:
            try:
                kwargs[name] = time.fromisoformat(payload[name])
            except (TypeError, ValueError) as exc:
                raise _validation(f"bad config time {name!r}: {payload[name]!r}",
                                  {"field": name}) from exc
    for name in _CONFIG_FLOATS:
        if name in payload:
            kwargs[name] = float(payload[name])
    for name in ("charge_while_driving", "idle_loss_outside_charging"):
        if name in payload:
            kwargs[name] = bool(payload[name])
    if "air_density_mode" in payload:
        kwargs["air_density_mode"] = str(payload["air_density_mode"])
    try:
        return SimConfig(**kwargs)
    except SetupError as exc:
        raise _validation(f"bad config: {exc}") from exc


def _parse_planner_config(payload: Any) -> PlannerConfig:
    payload = payload or {}
    if not isinstance(payload, dict):
        raise _validation("planner config must be an object")
    kwargs: dict[str, Any] = {}
    if "beam_width" in payload:
        kwargs["beam_width"] = int(payload["beam_width"])
    if "speed_grid_step" in payload:
        kwargs["speed_grid_step"] = float(payload["speed_grid_step"])
    if "horizon_days" in payload and payload["horizon_days"] is not None:
        kwargs["horizon_days"] = int(payload["horizon_days"])
    if "refine_radius" in payload:
        kwargs["refine_radius"] = float(payload["refine_radius"])
    if "use_filter" in payload:
        kwargs["use_filter"] = bool(payload["use_filter"])
    try:
        return PlannerConfig(**kwargs)
    except PlannerError as exc:
        raise _validation(f"bad planner config: {exc}") from exc


def _parse_strategy_params(payload: Any) -> StrategyParams:
    payload = payload or {}
    if not isinstance(payload, dict):
        raise _validation("strategy params must be an object")
    kwargs: dict[str, Any] = {}
    for name in ("min_speed", "max_speed", "gain"):
        if name in payload and payload[name] is not None:
            kwargs[name] = float(payload[name])
    for name in ("band", "clamp"):
        if name in payload and payload[name] is not None:
            lo, hi = payload[name]
            kwargs[name] = (float(lo), float(hi))
    if "max_days" in payload:
        kwargs["max_days"] = int(payload["max_days"])
    return StrategyParams(**kwargs)


# -- store -------------------------------------------------------------------

@dataclass
class SessionRecord:
    session_id: str
    created_at: str
    route_id: str
    weather_id: str
    payload: dict
    session: Session
    events: list[dict] = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    @property
    def version(self) -> int:
        return len(self.events)


class Store:
    """On-disk resource and session store; replays session logs on startup."""

    def __init__(self, data_dir: Path | str):
        self.data_dir = Path(data_dir)
        (self.data_dir / "routes").mkdir(parents=True, exist_ok=True)
        (self.data_dir / "weather").mkdir(parents=True, exist_ok=True)
        (self.data_dir / "sessions").mkdir(parents=True, exist_ok=True)
        self.routes: dict[str, Route] = {}
        self.weather: dict[str, WeatherSeries] = {}
        self.sessions: dict[str, SessionRecord] = {}
        self._ingest_lock = threading.Lock()
        self._load_existing()

    # -- ingestion -----------------------------------------------------------

    def ingest_route(self, records: Any) -> str:
        rid = content_id("rt", records)
        with self._ingest_lock:
            if rid in self.routes:
                return rid
            path = self.data_dir / "routes" / f"{rid}.json"
            path.write_text(canonical_json(records) + "\n")
            try:
                self.routes[rid] = load_route(path)
            except (RouteError, ValueError, KeyError, TypeError) as exc:
                path.unlink(missing_ok=True)
                raise _validation(f"bad route: {exc}") from exc
        return rid

    def ingest_weather(self, records: Any) -> str:
        wid = content_id("wx", records)
        with self._ingest_lock:
            if wid in self.weather:
                return wid
            if not isinstance(records, list):
                raise _validation("weather must be a list of sample records")
            path = self.data_dir / "weather" / f"{wid}.jsonl"
            path.write_text("".join(canonical_json(r) + "\n" for r in records))
            try:
                self.weather[wid] = load_weather(path)
            except (WeatherError, ValueError, KeyError, TypeError) as exc:
                path.unlink(missing_ok=True)
                raise _validation(f"bad weather: {exc}") from exc
        return wid

    # -- sessions ------------------------------------------------------------

    def _session_path(self, sid: str) -> Path:
        return self.data_dir / "sessions" / f"{sid}.jsonl"

    def _build_session(self, payload: dict) -> tuple[Session, str, str]:
        route_id = payload.get("route_id")
        weather_id = payload.get("weather_id")
        if route_id not in self.routes:
            raise _not_found("route", str(route_id))
        if weather_id not in self.weather:
            raise _not_found("weather", str(weather_id))
        spec = _parse_vehicle(payload.get("vehicle"))
        config = _parse_config(payload.get("config"))
        try:
            session = Session(spec, self.routes[route_id], self.weather[weather_id], config)
        except SetupError as exc:
            raise _validation(f"bad session setup: {exc}") from exc
        return session, route_id, weather_id

    def create_session(self, payload: dict) -> SessionRecord:
        session, route_id, weather_id = self._build_session(payload)
        with self._ingest_lock:
            sid = f"s-{len(self.sessions) + 1:06d}"
            rec = SessionRecord(
                session_id=sid,
                created_at=session.config.start_time.isoformat(),
                route_id=route_id,
                weather_id=weather_id,
                payload=payload,
                session=session,
            )
            self.sessions[sid] = rec
        self._append_event(rec, {"command": "create", "payload": payload}, replayed=False)
        return rec

    def get(self, sid: str) -> SessionRecord:
        rec = self.sessions.get(sid)
        if rec is None:
            raise _not_found("session", sid)
        return rec

    def _append_event(self, rec: SessionRecord, event: dict, replayed: bool) -> None:
        event = {"seq": len(rec.events), **event}
        rec.events.append(event)
        if not replayed:
            with self._session_path(rec.session_id).open("a") as fh:
                fh.write(canonical_json(event) + "\n")

    # -- replay --------------------------------------------------------------

    def _load_existing(self) -> None:
        for path in sorted((self.data_dir / "routes").glob("rt-*.json")):
            self.routes[path.stem] = load_route(path)
        for path in sorted((self.data_dir / "weather").glob("wx-*.jsonl")):
            self.weather[path.stem] = load_weather(path)
        for path in sorted((self.data_dir / "sessions").glob("s-*.jsonl")):
            self._replay(path)

    def _replay(self, path: Path) -> None:
        events = [json.loads(line) for line in path.read_text().splitlines() if line]
        if not events or events[0].get("command") != "create":
            raise ServiceError(500, "corrupt_log", f"{path}: missing create event")
        payload = events[0]["payload"]
        session, route_id, weather_id = self._build_session(payload)
        rec = SessionRecord(
            session_id=path.stem,
            created_at=session.config.start_time.isoformat(),
            route_id=route_id,
            weather_id=weather_id,
            payload=payload,
            session=session,
        )
        for event in events:
            command = event["command"]
            if command == "step":
                session.step_hour(float(event["speed_kmh"]))
            elif command == "advance":
                session.advance_idle(datetime.fromisoformat(event["until"]))
            # create/plan/simulate do not change engine state
            rec.events.append(event)
        self.sessions[rec.session_id] = rec


# -- snapshots ---------------------------------------------------------------

def state_snapshot(rec: SessionRecord) -> dict:
    s = rec.session
    st = s.state
    try:
        next_driving = s.next_driving_hour().isoformat() if not st.finished else None
    except EngineError:
        next_driving = None
    return {
        "session_id": rec.session_id,
        "version": rec.version,
        "route_id": rec.route_id,
        "weather_id": rec.weather_id,
        "clock": st.clock.isoformat(),
        "day": st.day_index,
        "odometer_m": st.odometer,
        "odometer_km": st.odometer / 1000.0,
        "route_length_km": s.route.total_length / 1000.0,
        "remaining_km": (s.route.total_length - st.odometer) / 1000.0,
        "battery_wh": st.battery,
        "battery_capacity_wh": s.spec.battery_capacity,
        "soc": st.battery / s.spec.battery_capacity,
        "finished": st.finished,
        "arrival_time": st.arrival_time.isoformat() if st.arrival_time else None,
        "next_driving_hour": next_driving,
        "driving_window": [
            s.config.driving_start.isoformat("minutes"),
            s.config.driving_end.isoformat("minutes"),
        ],
        "charging_window": [
            s.config.charging_start.isoformat("minutes"),
            s.config.charging_end.isoformat("minutes"),
        ],
        "speed_limits": [s.config.speed_min, s.config.speed_max],
    }


def _check_version(rec: SessionRecord, body: dict) -> None:
    token = body.get("version")
    if token is not None and int(token) != rec.version:
        raise ServiceError(
            409, "stale_version",
            f"version {token} is stale; session is at version {rec.version}",
            {"expected": rec.version, "given": int(token)},
        )


def run_strategy(session: Session, strategy: str, params: StrategyParams,
                 planner_cfg: PlannerConfig, max_days: int):
    """Whole-journey run of a named strategy on a clone of `session`."""
    sim = session.clone()
    policy = build_policy(strategy, sim, params, planner_cfg=planner_cfg)
    return sim.run_to_finish(policy, max_days)


# -- application -------------------------------------------------------------

def create_app(data_dir: Path | str) -> FastAPI:
    app = FastAPI(title="solarsim service", docs_url=None, redoc_url=None)
    store = Store(data_dir)
    app.state.store = store

    def _json(payload: dict | list, status: int = 200) -> Response:
        return Response(canonical_json(payload), status_code=status,
                        media_type="application/json")

    @app.exception_handler(ServiceError)
    async def _service_error(_req: Request, exc: ServiceError):
        return _json(
            {"code": exc.code, "message": exc.message, "details": exc.details},
            exc.status,
        )

    def _envelope(exc: Exception) -> ServiceError:
        if isinstance(exc, WindowError):
            details = {}
            if exc.next_driving_hour is not None:
                details["next_driving_hour"] = exc.next_driving_hour.isoformat()
            return ServiceError(409, "window_violation", str(exc), details)
        if isinstance(exc, SessionStateError):
            return ServiceError(409, "conflict", str(exc))
        if isinstance(exc, InfeasibleHorizonError):
            details = {}
            if exc.advisory_plan is not None:
                details["advisory_plan"] = exc.advisory_plan.as_dict()
            return ServiceError(409, "infeasible_horizon", str(exc), details)
        if isinstance(exc, InfeasibleSpeedError):
            return ServiceError(409, "infeasible_speed", str(exc))
        if isinstance(exc, (InputError, SetupError, PlannerError, RouteError,
                            WeatherError, ValueError)):
            return _validation(str(exc))
        raise exc

    async def _body(request: Request) -> Any:
        raw = await request.body()
        if not raw:
            return {}
        try:
            return json.loads(raw)
        except json.JSONDecodeError as exc:
            raise _validation(f"request body is not valid JSON: {exc}") from exc

    @app.post("/routes")
    async def post_routes(request: Request):
        body = await _body(request)
        records = body.get("nodes") if isinstance(body, dict) else body
        if not isinstance(records, list):
            raise _validation("route payload must be a node list (or {'nodes': [...]})")
        rid = store.ingest_route(records)
        route = store.routes[rid]
        return _json(
            {"route_id": rid, "nodes": len(route.nodes),
             "total_length_km": route.total_length / 1000.0},
            201,
        )

    @app.post("/weather")
    async def post_weather(request: Request):
        raw = await request.body()
        try:
            body = json.loads(raw) if raw else {}
        except json.JSONDecodeError:
            # Accept the on-disk JSONL form (one sample object per line) as
            # well as a JSON array body.
            try:
                body = [
                    json.loads(ln)
                    for ln in raw.decode("utf-8", "replace").splitlines()
                    if ln.strip()
                ]
            except json.JSONDecodeError as exc:
                raise _validation(f"request body is not valid JSON: {exc}") from exc
        records = body.get("records") if isinstance(body, dict) else body
        if not isinstance(records, list):
            raise _validation("weather payload must be a record list (or {'records': [...]})")
        wid = store.ingest_weather(records)
        series = store.weather[wid]
        return _json(
            {"weather_id": wid, "samples": len(records), "zones": list(series.zones),
             "span": [series.first_hour.isoformat(), series.last_hour.isoformat()]},
            201,
        )

    @app.post("/sessions")
    async def post_sessions(request: Request):
        body = await _body(request)
        if not isinstance(body, dict):
            raise _validation("session payload must be an object")
        rec = store.create_session(body)
        return _json({"session_id": rec.session_id, "state": state_snapshot(rec)}, 201)

    @app.get("/sessions/{sid}/state")
    async def get_state(sid: str):
        return _json({"state": state_snapshot(store.get(sid))})

    @app.post("/sessions/{sid}/step")
    async def post_step(sid: str, request: Request):
        rec = store.get(sid)
        body = await _body(request)
        with rec.lock:
            _check_version(rec, body)
            try:
                speed = float(body["speed_kmh"])
            except (KeyError, TypeError, ValueError) as exc:
                raise _validation("step requires a numeric 'speed_kmh'") from exc
            try:
                step = rec.session.step_hour(speed)
            except EngineError as exc:
                raise _envelope(exc) from exc
            store._append_event(
                rec,
                {"command": "step", "speed_kmh": speed, "result": step.as_dict()},
                replayed=False,
            )
            return _json({"state": state_snapshot(rec), "step": step.as_dict()})

    @app.post("/sessions/{sid}/advance")
    async def post_advance(sid: str, request: Request):
        rec = store.get(sid)
        body = await _body(request)
        with rec.lock:
            _check_version(rec, body)
            until_raw = body.get("until")
            if until_raw is None:
                try:
                    until = rec.session.next_driving_hour()
                    if until <= rec.session.state.clock:
                        from .engine import HOUR
                        until = rec.session.next_driving_hour(
                            rec.session.state.clock + HOUR
                        )
                except EngineError as exc:
                    raise _envelope(exc) from exc
            else:
                try:
                    until = datetime.fromisoformat(until_raw)
                except (TypeError, ValueError) as exc:
                    raise _validation(f"bad 'until' timestamp: {until_raw!r}") from exc
            try:
                logs = rec.session.advance_idle(until)
            except EngineError as exc:
                raise _envelope(exc) from exc
            store._append_event(
                rec,
                {"command": "advance", "until": until.isoformat(),
                 "result": {"slices": len(logs)}},
                replayed=False,
            )
            return _json({
                "state": state_snapshot(rec),
                "slices": [s.as_dict() for s in logs],
            })

    @app.post("/sessions/{sid}/plan")
    async def post_plan(sid: str, request: Request):
        rec = store.get(sid)
        body = await _body(request)
        with rec.lock:
            _check_version(rec, body)
            overrides = body.get("override_kmh")
            try:
                if overrides is not None:
                    if not isinstance(overrides, list):
                        raise _validation("'override_kmh' must be a list of speeds")
                    speeds = [float(v) for v in overrides]
                    plan = evaluate_daily_speeds(rec.session.clone(), speeds)
                else:
                    cfg = _parse_planner_config(body.get("planner"))
                    plan = plan_daily_speeds(rec.session.clone(), cfg)
            except (PlannerError, EngineError, WeatherError, ValueError) as exc:
                raise _envelope(exc) from exc
            event = {"command": "plan", "planner": body.get("planner") or {},
                     "result": plan.as_dict()}
            if overrides is not None:
                event["override_kmh"] = [float(v) for v in overrides]
            store._append_event(rec, event, replayed=False)
            return _json({"state": state_snapshot(rec), "plan": plan.as_dict()})

    @app.post("/sessions/{sid}/simulate")
    async def post_simulate(sid: str, request: Request):
        rec = store.get(sid)
        body = await _body(request)
        strategy = body.get("strategy", "DAILY_AVERAGE")
        params = _parse_strategy_params(body.get("params"))
        planner_cfg = _parse_planner_config(body.get("planner"))
        max_days = int(body.get("max_days", DEFAULT_MAX_DAYS))
        try:
            log = run_strategy(rec.session, str(strategy), params, planner_cfg, max_days)
        except (EngineError, PlannerError, WeatherError, InfeasibleSpeedError,
                ValueError) as exc:
            raise _envelope(exc) from exc
        return _json(log.as_dict())

    @app.get("/sessions/{sid}/forecast")
    async def get_forecast(sid: str, horizon: int | None = None,
                           assumed_speed: float = 60.0):
        rec = store.get(sid)
        s = rec.session
        if horizon is None:
            # default: remaining driving hours of the current day
            end_today = datetime.combine(s.state.clock.date(), s.config.driving_end)
            horizon = max(int((end_today - s.state.clock).total_seconds() // 3600), 1)
        try:
            entries, exhausted = forecast_along(
                s.route, s.weather, s.state.odometer, assumed_speed, horizon,
                start_time=s.state.clock,
            )
        except WeatherError as exc:
            raise _envelope(exc) from exc
        return _json({
            "horizon_h": horizon,
            "assumed_speed_kmh": assumed_speed,
            "span_exhausted": exhausted,
            "entries": [
                {
                    "time": t.isoformat(),
                    "zone": zone,
                    "ghi_wm2": sample.ghi,
                    "temp_c": sample.temperature,
                    "wind_dir_deg": sample.wind_direction,
                    "wind_ms": sample.wind_speed,
                }
                for t, zone, sample in entries
            ],
        })

    @app.get("/sessions/{sid}/log")
    async def get_log(sid: str, offset: int = 0, limit: int = 1000):
        rec = store.get(sid)
        page = rec.events[max(offset, 0): max(offset, 0) + max(limit, 0)]
        return _json({
            "session_id": rec.session_id,
            "version": rec.version,
            "offset": max(offset, 0),
            "events": page,
        })

    @app.get("/sessions/{sid}/route")
    async def get_route(sid: str):
        rec = store.get(sid)
        route = rec.session.route
        return _json({
            "route_id": rec.route_id,
            "total_length_km": route.total_length / 1000.0,
            "polyline": [[n.latitude, n.longitude] for n in route.nodes],
            "elevation": [
                [c / 1000.0, n.altitude]
                for c, n in zip(route.cumulative_distance, route.nodes)
            ],
        })

    return app


def main(listen: str = "127.0.0.1:8000", data_dir: str = "./solarsim-data") -> None:
    """Blocking entry point used by `solarsim serve`."""
    import uvicorn

    host, _, port = listen.partition(":")
    uvicorn.run(create_app(data_dir), host=host or "127.0.0.1",
                port=int(port or 8000), log_level="warning")
