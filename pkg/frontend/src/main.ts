/** Dashboard bootstrap: wires the controller to the DOM.
 *
 * Configuration via query string:
 *   ?service=http://host:port   service base URL (default: same origin)
 *   ?session=s-000001           attach to an existing session
 */

import { ApiClient, ApiError } from "./api.js";
import { DashboardController, startPolling } from "./controller.js";
import {
  fmt,
  renderBreakdown,
  renderElevation,
  renderForecast,
  renderGauges,
  renderMap,
  renderPlanEditor,
} from "./views.js";

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node;
}

function showBanner(message: string, retry?: () => void): void {
  const banner = el("banner");
  banner.textContent = message;
  banner.hidden = false;
  if (retry) {
    const button = document.createElement("button");
    button.textContent = "Retry";
    button.addEventListener("click", () => {
      banner.hidden = true;
      retry();
    });
    banner.append(" ", button);
  }
}

function hideBanner(): void {
  el("banner").hidden = true;
}

async function start(): Promise<void> {
  const params = new URLSearchParams(location.search);
  const base = params.get("service") ?? "";
  const sessionId = params.get("session");
  const controller = new DashboardController(new ApiClient(base));

  const speedInput = el("speed-input") as HTMLInputElement;
  const stepButton = el("step-button") as HTMLButtonElement;
  const advanceButton = el("advance-button") as HTMLButtonElement;
  const planButton = el("plan-button") as HTMLButtonElement;
  const inlineError = el("inline-error");

  controller.onChange((view) => {
    hideBanner();
    const { state } = view;
    el("clock").textContent = `${state.clock.replace("T", " ")} (day ${state.day})`;
    el("odometer").textContent =
      `${fmt(state.odometer_km)} / ${fmt(state.route_length_km)} km ` +
      `(${fmt(state.remaining_km)} km to go)`;
    renderGauges(el("soc-gauge"), el("speed-gauge"), view);
    renderBreakdown(el("breakdown"), view);
    renderMap(el("map"), view);
    renderElevation(el("elevation"), view);
    renderForecast(el("forecast"), view);
    renderPlanEditor(el("plan-editor"), view, {
      onReplan(overrides) {
        const action = overrides.size > 0 && view.plan
          ? controller.evaluateOverride(
              view.plan.daily_kmh.map((v, i) => overrides.get(i) ?? v),
            )
          : controller.requestPlan();
        action.catch(handleActionError);
      },
    });
    const [speedMin, speedMax] = state.speed_limits;
    speedInput.min = String(speedMin);
    speedInput.max = String(speedMax);
    const done = state.finished;
    stepButton.disabled = done;
    advanceButton.disabled = done;
    planButton.disabled = done;
    speedInput.disabled = done;
    el("arrival").textContent = done
      ? `Arrived: ${state.arrival_time?.replace("T", " ") ?? ""}`
      : "";
  });

  function handleActionError(err: unknown): void {
    if (err instanceof ApiError) {
      if (err.envelope.code === "window_violation") {
        const next = err.envelope.details["next_driving_hour"];
        inlineError.textContent =
          `Outside the driving window; next driving hour is ${next ?? "unknown"}. ` +
          "Use Advance.";
        return;
      }
      inlineError.textContent = err.envelope.message;
      return;
    }
    showBanner("Service unreachable.", () => controller.refresh().catch(handleActionError));
  }

  stepButton.addEventListener("click", () => {
    inlineError.textContent = "";
    controller.submitStep(Number(speedInput.value)).catch(handleActionError);
  });
  advanceButton.addEventListener("click", () => {
    inlineError.textContent = "";
    controller.advanceToNextDrivingHour().catch(handleActionError);
  });
  planButton.addEventListener("click", () => {
    inlineError.textContent = "";
    controller.requestPlan().catch(handleActionError);
  });

  if (!sessionId) {
    showBanner("Add ?session=<id> (and optionally ?service=<base-url>) to attach.");
    return;
  }
  try {
    await controller.attach(sessionId);
    await controller.loadForecast();
  } catch (err) {
    showBanner(
      err instanceof ApiError ? err.message : "Service unreachable.",
      () => void start(),
    );
    return;
  }
  startPolling(controller, 2000, () => showBanner("Service unreachable; retrying…"));
}

void start();
