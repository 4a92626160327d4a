/** Thin typed client over the session service's HTTP+JSON API.
 *
 * Every method maps 1:1 onto one endpoint; no request is ever synthesized
 * from client-side state beyond the version token the caller supplies.
 */

import type {
  CreateSessionRequest,
  ErrorEnvelope,
  EventLog,
  Forecast,
  Plan,
  PlannerConfigInput,
  RouteView,
  StateSnapshot,
  StepResult,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly envelope: ErrorEnvelope,
  ) {
    super(`${envelope.code}: ${envelope.message}`);
    this.name = "ApiError";
  }
}

async function parseError(resp: Response): Promise<never> {
  let envelope: ErrorEnvelope;
  try {
    envelope = (await resp.json()) as ErrorEnvelope;
  } catch {
    envelope = { code: "http_error", message: resp.statusText, details: {} };
  }
  throw new ApiError(resp.status, envelope);
}

export class ApiClient {
  constructor(readonly baseUrl: string) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const resp = await fetch(this.baseUrl + path, {
      method,
      headers: body === undefined ? undefined : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!resp.ok) await parseError(resp);
    return (await resp.json()) as T;
  }

  ingestRoute(nodes: unknown[]): Promise<{ route_id: string; total_length_km: number }> {
    return this.request("POST", "/routes", nodes);
  }

  ingestWeather(records: unknown[]): Promise<{ weather_id: string }> {
    return this.request("POST", "/weather", records);
  }

  createSession(req: CreateSessionRequest): Promise<{ session_id: string; state: StateSnapshot }> {
    return this.request("POST", "/sessions", req);
  }

  state(sid: string): Promise<{ state: StateSnapshot }> {
    return this.request("GET", `/sessions/${sid}/state`);
  }

  step(sid: string, speedKmh: number, version?: number): Promise<{ state: StateSnapshot; step: StepResult }> {
    const body: Record<string, unknown> = { speed_kmh: speedKmh };
    if (version !== undefined) body.version = version;
    return this.request("POST", `/sessions/${sid}/step`, body);
  }

  advance(sid: string, until?: string, version?: number): Promise<{ state: StateSnapshot; slices: StepResult[] }> {
    const body: Record<string, unknown> = {};
    if (until !== undefined) body.until = until;
    if (version !== undefined) body.version = version;
    return this.request("POST", `/sessions/${sid}/advance`, body);
  }

  plan(
    sid: string,
    planner?: PlannerConfigInput,
    version?: number,
    overrideKmh?: number[],
  ): Promise<{ state: StateSnapshot; plan: Plan }> {
    const body: Record<string, unknown> = {};
    if (planner !== undefined) body.planner = planner;
    if (version !== undefined) body.version = version;
    if (overrideKmh !== undefined) body.override_kmh = overrideKmh;
    return this.request("POST", `/sessions/${sid}/plan`, body);
  }

  forecast(sid: string, horizon?: number): Promise<Forecast> {
    const query = horizon === undefined ? "" : `?horizon=${horizon}`;
    return this.request("GET", `/sessions/${sid}/forecast${query}`);
  }

  log(sid: string, offset = 0, limit = 1000): Promise<EventLog> {
    return this.request("GET", `/sessions/${sid}/log?offset=${offset}&limit=${limit}`);
  }

  route(sid: string): Promise<RouteView> {
    return this.request("GET", `/sessions/${sid}/route`);
  }
}
