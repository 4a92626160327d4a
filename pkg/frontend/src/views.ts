/** SVG/DOM renderers. Pure presentation: inputs are service payloads held
 * in the SessionView; the only arithmetic here is pixel mapping.
 */

import type { SessionView } from "./controller.js";
import type { Plan, StepResult } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

function svg(tag: string, attrs: Record<string, string | number>): SVGElement {
  const el = document.createElementNS(SVG_NS, tag);
  for (const [k, v] of Object.entries(attrs)) el.setAttribute(k, String(v));
  return el;
}

function clear(el: Element): void {
  while (el.firstChild) el.removeChild(el.firstChild);
}

export function fmt(value: number, digits = 1): string {
  return value.toLocaleString("en-US", {
    minimumFractionDigits: digits,
    maximumFractionDigits: digits,
  });
}

// -- gauges ------------------------------------------------------------------

/** Semi-circular gauge: fraction in [0,1] plus a center label. */
function renderGauge(root: Element, fraction: number, label: string, sub: string): void {
  clear(root);
  const el = svg("svg", { viewBox: "0 0 100 60", class: "gauge" });
  const clamped = Math.max(0, Math.min(1, fraction));
  const angle = Math.PI * (1 - clamped);
  const x = 50 + 40 * Math.cos(angle);
  const y = 55 - 40 * Math.sin(angle);
  const large = clamped > 0.5 ? 1 : 0;
  el.append(
    svg("path", {
      d: "M 10 55 A 40 40 0 0 1 90 55",
      fill: "none", stroke: "#2a2f3a", "stroke-width": 8, "stroke-linecap": "round",
    }),
    svg("path", {
      d: `M 10 55 A 40 40 0 ${large} 1 ${fmt(x, 2)} ${fmt(y, 2)}`,
      fill: "none",
      stroke: clamped < 0.2 ? "#e05d44" : "#4fc08d",
      "stroke-width": 8, "stroke-linecap": "round",
    }),
  );
  const text = svg("text", { x: 50, y: 42, "text-anchor": "middle", class: "gauge-label" });
  text.textContent = label;
  const subText = svg("text", { x: 50, y: 54, "text-anchor": "middle", class: "gauge-sub" });
  subText.textContent = sub;
  el.append(text, subText);
  root.append(el);
}

export function renderGauges(socEl: Element, speedEl: Element, view: SessionView): void {
  const { state, lastStep } = view;
  renderGauge(socEl, state.soc, `${fmt(state.soc * 100, 1)}%`,
    `${fmt(state.battery_wh, 0)} / ${fmt(state.battery_capacity_wh, 0)} Wh`);
  const [, speedMax] = state.speed_limits;
  const speed = lastStep?.commanded_speed_kmh ?? 0;
  renderGauge(speedEl, speed / speedMax, `${fmt(speed, 0)} km/h`, "last commanded");
}

// -- per-hour energy breakdown ----------------------------------------------

const BREAKDOWN_SERIES: { key: keyof StepResult; label: string; color: string }[] = [
  { key: "drag_wh", label: "drag", color: "#e0a030" },
  { key: "rolling_wh", label: "rolling", color: "#b86860" },
  { key: "gravitational_wh", label: "gravitational", color: "#9070c0" },
  { key: "system_wh", label: "system", color: "#607890" },
];

/** Stacked consumption bars (down) vs charge bars (up) per committed hour. */
export function renderBreakdown(root: Element, view: SessionView): void {
  clear(root);
  const steps = view.steps;
  if (steps.length === 0) {
    root.append(Object.assign(document.createElement("p"), {
      className: "placeholder", textContent: "No hours driven yet.",
    }));
    return;
  }
  const width = Math.max(320, steps.length * 28 + 60);
  const height = 180;
  const mid = 110;
  const maxWh = Math.max(
    1,
    ...steps.map((s) => Math.max(s.consumption_wh, s.charge_wh)),
  );
  const scale = 80 / maxWh;
  const el = svg("svg", { viewBox: `0 0 ${width} ${height}`, class: "chart" });
  el.append(svg("line", { x1: 30, y1: mid, x2: width - 4, y2: mid, stroke: "#3a4050" }));
  steps.forEach((s, i) => {
    const x = 34 + i * 28;
    let y = mid;
    for (const series of BREAKDOWN_SERIES) {
      const h = (s[series.key] as number) * scale;
      if (h > 0.01) {
        const bar = svg("rect", {
          x, y, width: 18, height: h, fill: series.color,
        });
        bar.append(svgTitle(`${series.label}: ${fmt(s[series.key] as number)} Wh`));
        el.append(bar);
        y += h;
      }
    }
    const chargeH = s.charge_wh * scale;
    if (chargeH > 0.01) {
      const bar = svg("rect", {
        x, y: mid - chargeH, width: 18, height: chargeH,
        fill: "#4fc08d", opacity: 0.85,
      });
      bar.append(svgTitle(`charge: ${fmt(s.charge_wh)} Wh`));
      el.append(bar);
    }
    if (s.events.includes("DEPLETED_MIDHOUR")) {
      const badge = svg("text", {
        x: x + 9, y: mid + 92, "text-anchor": "middle", class: "badge-depleted",
      });
      badge.textContent = "⚡";
      badge.append(svgTitle("DEPLETED_MIDHOUR: battery hit zero; halted to charge"));
      el.append(badge);
    }
    const tick = svg("text", {
      x: x + 9, y: height - 4, "text-anchor": "middle", class: "tick",
    });
    tick.textContent = s.hour.slice(11, 16);
    el.append(tick);
  });
  root.append(el);
}

function svgTitle(text: string): SVGElement {
  const t = document.createElementNS(SVG_NS, "title");
  t.textContent = text;
  return t;
}

// -- route map & elevation ---------------------------------------------------

/** Fraction of the route completed, taken from the service's odometer. */
function drivenFraction(view: SessionView): number {
  const { odometer_km, route_length_km } = view.state;
  return route_length_km > 0 ? Math.min(1, odometer_km / route_length_km) : 0;
}

/** Interpolated [lat, lon] at the current odometer, for the marker only. */
function positionOnPolyline(view: SessionView): [number, number] | null {
  const route = view.route;
  if (!route || route.polyline.length === 0) return null;
  const targetKm = view.state.odometer_km;
  const elev = route.elevation;
  for (let i = 1; i < elev.length; i++) {
    const [kmPrev] = elev[i - 1]!;
    const [km] = elev[i]!;
    if (targetKm <= km) {
      const t = km > kmPrev ? (targetKm - kmPrev) / (km - kmPrev) : 0;
      const [lat0, lon0] = route.polyline[i - 1]!;
      const [lat1, lon1] = route.polyline[i]!;
      return [lat0 + t * (lat1 - lat0), lon0 + t * (lon1 - lon0)];
    }
  }
  return route.polyline[route.polyline.length - 1] ?? null;
}

export function renderMap(root: Element, view: SessionView): void {
  clear(root);
  const route = view.route;
  if (!route || route.polyline.length < 2) return;
  const lats = route.polyline.map((p) => p[0]);
  const lons = route.polyline.map((p) => p[1]);
  const latMin = Math.min(...lats), latMax = Math.max(...lats);
  const lonMin = Math.min(...lons), lonMax = Math.max(...lons);
  const pad = 0.05;
  const latSpan = Math.max(latMax - latMin, 1e-6) * (1 + pad * 2);
  const lonSpan = Math.max(lonMax - lonMin, 1e-6) * (1 + pad * 2);
  const w = 220, h = 260;
  const toXY = ([lat, lon]: [number, number]): [number, number] => [
    ((lon - lonMin + lonSpan * pad) / lonSpan) * w,
    h - ((lat - latMin + latSpan * pad) / latSpan) * h,
  ];
  const el = svg("svg", { viewBox: `0 0 ${w} ${h}`, class: "map" });
  const points = route.polyline.map((p) => toXY(p).map((v) => fmt(v, 1)).join(",")).join(" ");
  el.append(svg("polyline", {
    points, fill: "none", stroke: "#5a88c8", "stroke-width": 2,
  }));
  const pos = positionOnPolyline(view);
  if (pos) {
    const [x, y] = toXY(pos);
    el.append(svg("circle", { cx: x, cy: y, r: 5, fill: "#e0a030", stroke: "#fff" }));
  }
  root.append(el);
}

export function renderElevation(root: Element, view: SessionView): void {
  clear(root);
  const route = view.route;
  if (!route || route.elevation.length < 2) return;
  const w = 320, h = 90;
  const totalKm = route.total_length_km;
  const alts = route.elevation.map((e) => e[1]);
  const altMin = Math.min(...alts), altMax = Math.max(...alts);
  const altSpan = Math.max(altMax - altMin, 1);
  const toXY = ([km, alt]: [number, number]): [number, number] => [
    (km / totalKm) * w,
    h - 8 - ((alt - altMin) / altSpan) * (h - 20),
  ];
  const el = svg("svg", { viewBox: `0 0 ${w} ${h}`, class: "chart" });
  const path = route.elevation.map((e, i) => {
    const [x, y] = toXY(e);
    return `${i === 0 ? "M" : "L"} ${fmt(x, 1)} ${fmt(y, 1)}`;
  }).join(" ");
  // driven portion shaded under the profile
  const splitX = drivenFraction(view) * w;
  el.append(
    svg("rect", { x: 0, y: 0, width: fmt(splitX, 1), height: h, fill: "#4fc08d", opacity: 0.15 }),
    svg("path", { d: path, fill: "none", stroke: "#8a93a5", "stroke-width": 1.5 }),
    svg("line", { x1: fmt(splitX, 1), y1: 0, x2: fmt(splitX, 1), y2: h, stroke: "#e0a030" }),
  );
  root.append(el);
}

// -- forecast ----------------------------------------------------------------

export function renderForecast(root: Element, view: SessionView): void {
  clear(root);
  const forecast = view.forecast;
  if (!forecast) return;
  const table = document.createElement("table");
  table.className = "forecast";
  table.innerHTML =
    "<thead><tr><th>Hour</th><th>Zone</th><th>GHI W/m²</th><th>Temp °C</th><th>Wind</th></tr></thead>";
  const body = document.createElement("tbody");
  for (const e of forecast.entries) {
    const row = document.createElement("tr");
    row.innerHTML =
      `<td>${e.time.slice(11, 16)}</td><td>${e.zone}</td>` +
      `<td>${fmt(e.ghi_wm2, 0)}</td><td>${fmt(e.temp_c, 1)}</td>` +
      `<td>${fmt(e.wind_ms, 1)} m/s @ ${fmt(e.wind_dir_deg, 0)}°</td>`;
    body.append(row);
  }
  table.append(body);
  root.append(table);
}

// -- plan editor -------------------------------------------------------------

export interface PlanEditorHandlers {
  onReplan(overrides: Map<number, number>): void;
}

/** Planner table with per-day override inputs and old-vs-new highlighting. */
export function renderPlanEditor(
  root: Element,
  view: SessionView,
  handlers: PlanEditorHandlers,
): void {
  clear(root);
  const plan = view.plan;
  if (!plan) {
    root.append(Object.assign(document.createElement("p"), {
      className: "placeholder", textContent: "No plan requested yet.",
    }));
    return;
  }
  const table = document.createElement("table");
  table.className = "plan";
  table.innerHTML =
    "<thead><tr><th>Day</th><th>Planned km/h</th><th>Predicted km</th><th>Override</th></tr></thead>";
  const body = document.createElement("tbody");
  const overrides = new Map<number, number>();
  plan.daily_kmh.forEach((kmh, i) => {
    const day = plan.first_day + i;
    const row = document.createElement("tr");
    if (planChanged(plan, view.previousPlan, i)) row.className = "changed";
    const input = document.createElement("input");
    input.type = "number";
    input.step = "1";
    input.value = String(kmh);
    input.addEventListener("change", () => {
      const v = Number(input.value);
      if (Number.isFinite(v)) overrides.set(i, v);
      else overrides.delete(i);
    });
    row.innerHTML =
      `<td>${day}</td><td>${fmt(kmh, 0)}</td>` +
      `<td>${fmt(plan.predicted_km[i] ?? 0, 0)}</td>`;
    const cell = document.createElement("td");
    cell.append(input);
    row.append(cell);
    body.append(row);
  });
  table.append(body);
  const summary = document.createElement("p");
  summary.className = "plan-summary";
  summary.textContent = plan.feasible
    ? `Predicted arrival: day ${plan.arrival_day} at ${plan.arrival_time ?? "?"} ` +
      `(min battery ${fmt(plan.min_soc_wh, 0)} Wh)`
    : "No feasible plan for the remaining horizon.";
  const button = document.createElement("button");
  button.textContent = "Replan";
  button.addEventListener("click", () => handlers.onReplan(overrides));
  root.append(table, summary, button);
}

function planChanged(plan: Plan, previous: Plan | null, index: number): boolean {
  if (!previous) return false;
  const day = plan.first_day + index;
  const prevIndex = day - previous.first_day;
  const prev = previous.daily_kmh[prevIndex];
  return prev !== undefined && prev !== plan.daily_kmh[index];
}
