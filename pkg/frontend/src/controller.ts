/** DOM-free session controller: the dashboard's single source of truth.
 *
 * Every UI action (speed submit, advance, plan, replan) funnels through a
 * method here, which issues exactly one service request carrying the
 * current version token and then replaces the local view with the
 * committed server snapshot. The views render this state and nothing else,
 * so the event log the service records is exactly the user's action
 * sequence — the property the contract test pins down.
 */

import { ApiClient, ApiError } from "./api.js";
import type {
  CreateSessionRequest,
  Forecast,
  Plan,
  PlannerConfigInput,
  RouteView,
  StateSnapshot,
  StepResult,
} from "./types.js";

export interface SessionView {
  state: StateSnapshot;
  lastStep: StepResult | null;
  /** committed per-hour step results, oldest first (drives the breakdown chart) */
  steps: StepResult[];
  plan: Plan | null;
  previousPlan: Plan | null;
  forecast: Forecast | null;
  route: RouteView | null;
}

export type ViewListener = (view: SessionView) => void;

export class DashboardController {
  private sid: string | null = null;
  private view: SessionView | null = null;
  private listeners: ViewListener[] = [];
  private mutating = false;

  constructor(readonly api: ApiClient) {}

  get sessionId(): string {
    if (this.sid === null) throw new Error("no active session");
    return this.sid;
  }

  get current(): SessionView {
    if (this.view === null) throw new Error("no active session");
    return this.view;
  }

  onChange(listener: ViewListener): void {
    this.listeners.push(listener);
  }

  private commit(partial: Partial<SessionView> & { state: StateSnapshot }): SessionView {
    const base: SessionView = this.view ?? {
      state: partial.state,
      lastStep: null,
      steps: [],
      plan: null,
      previousPlan: null,
      forecast: null,
      route: null,
    };
    this.view = { ...base, ...partial };
    for (const fn of this.listeners) fn(this.view);
    return this.view;
  }

  async createSession(req: CreateSessionRequest): Promise<SessionView> {
    const { session_id, state } = await this.api.createSession(req);
    this.sid = session_id;
    this.view = null;
    return this.commit({ state });
  }

  /** Attach to an existing session (page reload with ?session=). */
  async attach(sid: string): Promise<SessionView> {
    const { state } = await this.api.state(sid);
    this.sid = sid;
    this.view = null;
    const view = this.commit({ state });
    await this.loadRoute();
    return view;
  }

  /** Re-fetch the committed snapshot (polling tick / stale-version recovery). */
  async refresh(): Promise<SessionView> {
    const { state } = await this.api.state(this.sessionId);
    return this.commit({ state });
  }

  async loadRoute(): Promise<SessionView> {
    const route = await this.api.route(this.sessionId);
    return this.commit({ state: this.current.state, route });
  }

  async loadForecast(horizon?: number): Promise<SessionView> {
    const forecast = await this.api.forecast(this.sessionId, horizon);
    return this.commit({ state: this.current.state, forecast });
  }

  /**
   * Run one mutation with the current version token. A concurrent duplicate
   * (double-click, second tab) loses the token race: the service answers
   * 409 stale_version and we re-sync instead of re-applying.
   */
  private async mutate<T extends { state: StateSnapshot }>(
    send: (version: number) => Promise<T>,
  ): Promise<T | null> {
    if (this.mutating) return null; // one in-flight mutation at a time
    this.mutating = true;
    try {
      return await send(this.current.state.version);
    } catch (err) {
      if (err instanceof ApiError && err.envelope.code === "stale_version") {
        await this.refresh();
        return null;
      }
      throw err;
    } finally {
      this.mutating = false;
    }
  }

  /** Commit one driving hour at the entered speed. */
  async submitStep(speedKmh: number): Promise<SessionView | null> {
    const result = await this.mutate((version) =>
      this.api.step(this.sessionId, speedKmh, version),
    );
    if (result === null) return null;
    return this.commit({
      state: result.state,
      lastStep: result.step,
      steps: [...this.current.steps, result.step],
    });
  }

  /** Outside the driving window: idle/charge forward to the next drive hour. */
  async advanceToNextDrivingHour(): Promise<SessionView | null> {
    const result = await this.mutate((version) =>
      this.api.advance(this.sessionId, undefined, version),
    );
    if (result === null) return null;
    return this.commit({ state: result.state });
  }

  /** Ask the planner for daily speeds; keeps the prior plan for the diff view. */
  async requestPlan(planner?: PlannerConfigInput): Promise<SessionView | null> {
    const result = await this.mutate((version) =>
      this.api.plan(this.sessionId, planner, version),
    );
    if (result === null) return null;
    return this.commit({
      state: result.state,
      previousPlan: this.current.plan,
      plan: result.plan,
    });
  }

  /** What-if: have the service predict a user-edited daily speed sequence. */
  async evaluateOverride(speedsKmh: number[]): Promise<SessionView | null> {
    const result = await this.mutate((version) =>
      this.api.plan(this.sessionId, undefined, version, speedsKmh),
    );
    if (result === null) return null;
    return this.commit({
      state: result.state,
      previousPlan: this.current.plan,
      plan: result.plan,
    });
  }
}

/** 2-second polling loop; pauses are the caller's job (clearInterval). */
export function startPolling(
  controller: DashboardController,
  intervalMs = 2000,
  onError: (err: unknown) => void = () => {},
): () => void {
  const timer = setInterval(() => {
    controller.refresh().catch(onError);
  }, intervalMs);
  return () => clearInterval(timer);
}
