/** Dashboard↔service contract.
 *
 * Boots the real Python service, drives one session through the
 * dashboard's controller (create → plan → 5 steps → replan) and a second
 * session through raw HTTP calls with the same inputs, then asserts the
 * two recorded event logs are identical — i.e. the UI layer adds no
 * requests, drops none, and performs no client-side simulation.
 */

import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { spawn, type ChildProcess } from "node:child_process";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { DashboardController } from "../src/controller.js";
import type { CreateSessionRequest } from "../src/types.js";

const PORT = 8930 + Math.floor(Math.random() * 100);
const BASE = `http://127.0.0.1:${PORT}`;

const VEHICLE = {
  panel_area: 4.0,
  panel_efficiency: 0.25,
  system_efficiency: 0.9,
  mass: 300.0,
  drag_coefficient: 0.12,
  frontal_area: 1.0,
  rolling_resistance: 0.008,
  battery_capacity: 3000.0,
  constant_power_loss: 20.0,
  panel_temp_coefficient: 0.0016,
};

const ROUTE_NODES = Array.from({ length: 14 }, (_, i) => ({
  lat: -12.0 - i * 0.5,
  lon: 131.0,
  alt_m: 0.0,
  zone: "z1",
}));

const WEATHER = Array.from({ length: 72 }, (_, h) => {
  const t = new Date(Date.UTC(2023, 9, 22, h));
  return {
    zone: "z1",
    time: t.toISOString().slice(0, 19),
    ghi_wm2: 700.0,
    temp_c: 25.0,
    wind_dir_deg: 0.0,
    wind_ms: 0.0,
  };
});

const STEP_SPEEDS = [60, 65, 55, 70, 62];
const PLANNER = { beam_width: 8, speed_grid_step: 10.0 };

let service: ChildProcess;
let dataDir: string;

async function waitForService(): Promise<void> {
  for (let i = 0; i < 100; i++) {
    try {
      const resp = await fetch(`${BASE}/sessions/s-999999/state`);
      if (resp.status === 404) return;
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 100));
  }
  throw new Error("service did not come up");
}

async function post(path: string, body: unknown): Promise<Record<string, unknown>> {
  const resp = await fetch(BASE + path, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(body),
  });
  if (!resp.ok) throw new Error(`${path}: ${resp.status} ${await resp.text()}`);
  return (await resp.json()) as Record<string, unknown>;
}

beforeAll(async () => {
  dataDir = mkdtempSync(join(tmpdir(), "solarsim-contract-"));
  service = spawn(
    "python3",
    ["-c",
     `from solarsim.service import main; main("127.0.0.1:${PORT}", ${JSON.stringify(dataDir)})`],
    { stdio: "ignore" },
  );
  await waitForService();
}, 30_000);

afterAll(() => {
  service?.kill();
  rmSync(dataDir, { recursive: true, force: true });
});

function sessionRequest(routeId: string, weatherId: string): CreateSessionRequest {
  return {
    route_id: routeId,
    weather_id: weatherId,
    vehicle: VEHICLE,
    config: { start_time: "2023-10-22T08:00:00", soc_start: 2500.0 },
  };
}

describe("dashboard contract", () => {
  it("scripted UI session produces the same event log as direct API calls", async () => {
    const api = new ApiClient(BASE);
    const { route_id } = await api.ingestRoute(ROUTE_NODES);
    const { weather_id } = await api.ingestWeather(WEATHER);

    // -- dashboard path: every action through the controller ---------------
    const controller = new DashboardController(api);
    await controller.createSession(sessionRequest(route_id, weather_id));
    await controller.requestPlan(PLANNER);
    for (const speed of STEP_SPEEDS) {
      const view = await controller.submitStep(speed);
      expect(view).not.toBeNull();
    }
    await controller.requestPlan(PLANNER); // replan after driving
    const uiLog = await api.log(controller.sessionId);

    // -- direct path: the same sequence as raw requests --------------------
    const created = await post("/sessions", sessionRequest(route_id, weather_id));
    const directSid = created.session_id as string;
    await post(`/sessions/${directSid}/plan`, { planner: PLANNER });
    for (const speed of STEP_SPEEDS) {
      await post(`/sessions/${directSid}/step`, { speed_kmh: speed });
    }
    await post(`/sessions/${directSid}/plan`, { planner: PLANNER });
    const directLog = await api.log(directSid);

    // create + plan + steps + replan
    expect(uiLog.events.length).toBe(3 + STEP_SPEEDS.length);
    expect(uiLog.events).toStrictEqual(directLog.events);
  }, 60_000);

  it("dashboard state is the committed service snapshot, verbatim", async () => {
    const api = new ApiClient(BASE);
    const { route_id } = await api.ingestRoute(ROUTE_NODES);
    const { weather_id } = await api.ingestWeather(WEATHER);
    const controller = new DashboardController(api);
    await controller.createSession(sessionRequest(route_id, weather_id));
    await controller.submitStep(64);
    const { state } = await api.state(controller.sessionId);
    expect(controller.current.state).toStrictEqual(state);
    expect(controller.current.lastStep?.commanded_speed_kmh).toBe(64);
  }, 30_000);

  it("double-submit loses the version race and the UI re-syncs", async () => {
    const api = new ApiClient(BASE);
    const { route_id } = await api.ingestRoute(ROUTE_NODES);
    const { weather_id } = await api.ingestWeather(WEATHER);
    const controller = new DashboardController(api);
    await controller.createSession(sessionRequest(route_id, weather_id));
    // Another writer moves the session forward; our token is now stale.
    await post(`/sessions/${controller.sessionId}/step`, { speed_kmh: 50 });
    const result = await controller.submitStep(60);
    expect(result).toBeNull(); // rejected, not re-applied
    expect(controller.current.state.version).toBe(2); // create + the other step
    const log = await api.log(controller.sessionId);
    expect(log.events.filter((e) => e.command === "step").length).toBe(1);
  }, 30_000);
});
