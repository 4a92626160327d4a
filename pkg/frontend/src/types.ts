/** Wire types mirroring the service's JSON payloads, field for field.
 *
 * The dashboard never computes physics: every number it renders comes out
 * of one of these shapes unchanged (at most unit-formatted).
 */

export interface StateSnapshot {
  session_id: string;
  version: number;
  route_id: string;
  weather_id: string;
  clock: string;
  day: number;
  odometer_m: number;
  odometer_km: number;
  route_length_km: number;
  remaining_km: number;
  battery_wh: number;
  battery_capacity_wh: number;
  soc: number;
  finished: boolean;
  arrival_time: string | null;
  next_driving_hour: string | null;
  driving_window: [string, string];
  charging_window: [string, string];
  speed_limits: [number, number];
}

export interface StepResult {
  hour: string;
  commanded_speed_kmh: number;
  distance_m: number;
  driven_duration_h: number;
  events: string[];
  odometer_m: number;
  battery_wh: number;
  drag_wh: number;
  rolling_wh: number;
  gravitational_wh: number;
  system_wh: number;
  consumption_wh: number;
  charge_wh: number;
  spilled_wh: number;
}

export interface Plan {
  daily_kmh: number[];
  predicted_km: number[];
  arrival_day: number | null;
  arrival_time: string | null;
  min_soc_wh: number;
  feasible: boolean;
  first_day: number;
}

export interface ForecastEntry {
  time: string;
  zone: string;
  ghi_wm2: number;
  temp_c: number;
  wind_dir_deg: number;
  wind_ms: number;
}

export interface Forecast {
  horizon_h: number;
  assumed_speed_kmh: number;
  span_exhausted: boolean;
  entries: ForecastEntry[];
}

export interface RouteView {
  route_id: string;
  total_length_km: number;
  /** [lat, lon] per node */
  polyline: [number, number][];
  /** [cumulative km, altitude m] per node */
  elevation: [number, number][];
}

export interface LogEvent {
  seq: number;
  command: "create" | "step" | "advance" | "plan";
  [key: string]: unknown;
}

export interface EventLog {
  session_id: string;
  version: number;
  offset: number;
  events: LogEvent[];
}

export interface ErrorEnvelope {
  code: string;
  message: string;
  details: Record<string, unknown>;
}

export interface VehicleSpecInput {
  panel_area: number;
  panel_efficiency: number;
  system_efficiency: number;
  mass: number;
  drag_coefficient: number;
  frontal_area: number;
  rolling_resistance: number;
  battery_capacity: number;
  constant_power_loss: number;
  panel_temp_coefficient?: number;
}

export interface SessionConfigInput {
  start_time: string;
  soc_start: number;
  [key: string]: unknown;
}

export interface CreateSessionRequest {
  route_id: string;
  weather_id: string;
  vehicle: VehicleSpecInput;
  config: SessionConfigInput;
}

export interface PlannerConfigInput {
  beam_width?: number;
  speed_grid_step?: number;
  horizon_days?: number;
  refine_radius?: number;
  use_filter?: boolean;
}
