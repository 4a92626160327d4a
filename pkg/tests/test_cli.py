"""Command-line interface: reports, exit codes, service output parity."""

import csv
import io
import json
from datetime import datetime, timedelta

import pytest
from click.testing import CliRunner
from fastapi.testclient import TestClient

from solarsim import fixtures
from solarsim.cli import main
from solarsim.service import canonical_json, create_app

VEHICLE_TOML = """
panel_area = 4.0
panel_efficiency = 0.25
system_efficiency = 0.9
mass = 300
drag_coefficient = 0.12
frontal_area = 1.0
rolling_resistance = 0.008
battery_capacity = 3000
constant_power_loss = 20
"""


@pytest.fixture()
def toy_files(tmp_path):
    """A small on-disk scenario (route ~389 km) for fast CLI runs."""
    route = tmp_path / "route.json"
    route.write_text(json.dumps([
        {"lat": -12.0 - i * 0.5, "lon": 131.0, "alt_m": 0.0, "zone": "z1"}
        for i in range(8)
    ]))
    weather = tmp_path / "weather.jsonl"
    start = datetime(2023, 10, 22)
    weather.write_text("".join(
        json.dumps({"zone": "z1", "time": (start + timedelta(hours=h)).isoformat(),
                    "ghi_wm2": 700.0, "temp_c": 25.0, "wind_dir_deg": 0.0,
                    "wind_ms": 0.0}) + "\n"
        for h in range(48)
    ))
    vehicle = tmp_path / "vehicle.toml"
    vehicle.write_text(VEHICLE_TOML)
    return {
        "route": str(route), "weather": str(weather), "vehicle": str(vehicle),
    }


def common_args(files, soc=0.8):
    return [
        "--route", files["route"], "--weather", files["weather"],
        "--vehicle", files["vehicle"], "--start-time", "2023-10-22T08:00:00",
        "--soc-start", str(soc),
    ]


def test_run_single_strategy_table(toy_files):
    r = CliRunner().invoke(main, ["run", *common_args(toy_files),
                                  "--strategy", "min", "--min-speed", "60"])
    assert r.exit_code == 0, r.output
    lines = r.output.splitlines()
    assert lines[0].startswith("Strategy")
    assert "Total" in lines[0]
    assert lines[1].startswith("MIN_SPEED")
    assert lines[1].split()[-1] == "389"


def test_run_table_all_strategies(toy_files):
    r = CliRunner().invoke(main, ["run", *common_args(toy_files),
                                  "--min-speed", "55", "--max-speed", "90",
                                  "--beam-width", "4"])
    assert r.exit_code == 0, r.output
    out = r.output
    for name in ("MIN_SPEED", "MAX_SPEED", "AVERAGE_SPEED", "DAILY_AVERAGE",
                 "SOC_MAINTAIN"):
        assert name in out
    # The per-day summary block for the planned strategy is present.
    for row in ("GHI", "Temperature", "Distance", "Drag", "Rolling",
                "Gravitational", "Consumption", "Generation"):
        assert f"\n{row}" in out


def test_run_csv_has_step_columns(toy_files):
    r = CliRunner().invoke(main, ["run", *common_args(toy_files),
                                  "--strategy", "min", "--min-speed", "60",
                                  "--format", "csv"])
    assert r.exit_code == 0, r.output
    rows = list(csv.DictReader(io.StringIO(r.output)))
    assert rows[0]["commanded_speed_kmh"] == "60.0"
    assert float(rows[0]["distance_m"]) == pytest.approx(60_000.0, rel=1e-6)
    assert "battery_wh" in rows[0]


def test_run_json_round_trips(toy_files):
    r = CliRunner().invoke(main, ["run", *common_args(toy_files),
                                  "--strategy", "min", "--min-speed", "60",
                                  "--format", "json"])
    assert r.exit_code == 0
    payload = json.loads(r.output)
    assert payload["finished"] is True
    assert payload["arrival_day"] == 1


def test_run_infeasible_exits_one(toy_files, tmp_path):
    dark = tmp_path / "dark.jsonl"
    start = datetime(2023, 10, 22)
    dark.write_text("".join(
        json.dumps({"zone": "z1", "time": (start + timedelta(hours=h)).isoformat(),
                    "ghi_wm2": 0.0, "temp_c": 25.0, "wind_dir_deg": 0.0,
                    "wind_ms": 0.0}) + "\n"
        for h in range(48)
    ))
    files = dict(toy_files, weather=str(dark))
    r = CliRunner().invoke(main, ["run", *common_args(files, soc=0.1),
                                  "--strategy", "min", "--min-speed", "60",
                                  "--max-days", "2"])
    assert r.exit_code == 1


def test_run_bad_input_exits_two(toy_files, tmp_path):
    broken = tmp_path / "broken.json"
    broken.write_text("[{]")
    files = dict(toy_files, route=str(broken))
    r = CliRunner().invoke(main, ["run", *common_args(files), "--strategy", "min"])
    assert r.exit_code == 2  # ClickException usage/input failure


def test_plan_table_and_json(toy_files):
    args = ["plan", *common_args(toy_files), "--beam-width", "4",
            "--grid-step", "10"]
    table = CliRunner().invoke(main, args)
    assert table.exit_code == 0, table.output
    assert table.output.splitlines()[0].startswith("Day")
    assert "Arrival: day" in table.output
    as_json = CliRunner().invoke(main, [*args, "--format", "json"])
    plan = json.loads(as_json.output)
    assert plan["feasible"] is True
    assert len(plan["daily_kmh"]) == len(plan["predicted_km"])


def test_validate_ok_and_invalid(toy_files, tmp_path):
    ok = CliRunner().invoke(main, [
        "validate", "--route", toy_files["route"],
        "--weather", toy_files["weather"], "--vehicle", toy_files["vehicle"],
    ])
    assert ok.exit_code == 0, ok.output
    assert ok.output.count("OK") == 3

    bad = tmp_path / "bad.jsonl"
    bad.write_text("nope\n")
    r = CliRunner().invoke(main, ["validate", "--weather", str(bad)])
    assert r.exit_code == 2
    assert "INVALID" in r.output


def test_deterministic_output_across_runs(toy_files):
    args = ["run", *common_args(toy_files), "--strategy", "min",
            "--min-speed", "60", "--format", "json"]
    a = CliRunner().invoke(main, args)
    b = CliRunner().invoke(main, args)
    assert a.output == b.output


def test_run_json_matches_service_simulate_byte_for_byte(tmp_path):
    """The CLI report and the service response are the same bytes."""
    out_file = tmp_path / "journey.json"
    r = CliRunner().invoke(main, [
        "run", "--strategy", "min", "--format", "json", "--out", str(out_file),
    ])
    assert r.exit_code == 0, r.output

    client = TestClient(create_app(tmp_path / "data"))
    rid = client.post(
        "/routes", content=fixtures.path(fixtures.ROUTE).read_bytes()
    ).json()["route_id"]
    wid = client.post(
        "/weather", content=fixtures.path(fixtures.WEATHER).read_bytes()
    ).json()["weather_id"]
    from solarsim.energy import load_vehicle_spec

    spec = load_vehicle_spec(fixtures.path(fixtures.VEHICLE))
    vehicle = {k: getattr(spec, k) for k in (
        "panel_area", "panel_efficiency", "system_efficiency", "mass",
        "drag_coefficient", "frontal_area", "rolling_resistance",
        "battery_capacity", "constant_power_loss", "panel_temp_coefficient",
    )}
    sid = client.post("/sessions", json={
        "route_id": rid, "weather_id": wid, "vehicle": vehicle,
        "config": {
            "start_time": fixtures.START_TIME.isoformat(),
            "soc_start": fixtures.SOC_START_FRACTION * spec.battery_capacity,
        },
    }).json()["session_id"]
    resp = client.post(f"/sessions/{sid}/simulate", json={
        "strategy": "MIN_SPEED",
        "params": {"min_speed": fixtures.MIN_SPEED_KMH},
        "max_days": 14,
    })
    assert resp.status_code == 200
    assert resp.content == out_file.read_bytes()
    # And the bytes really are the canonical encoding.
    assert resp.content.decode() == canonical_json(json.loads(resp.content))
