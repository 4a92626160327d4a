"""Hourly energy balance of a solar vehicle as pure functions.

All energies are in watt-hours; joules are accepted/produced only at the
explicit conversion boundary (J_PER_WH). Consumption splits into drag,
rolling, gravitational and constant system loss; generation depends on
irradiance, panel geometry and (optionally) panel temperature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

J_PER_WH = 3600.0

#: Reference cell temperature for the panel efficiency derating, degrees C.
PANEL_REFERENCE_TEMP_C = 25.0


@dataclass(frozen=True)
class PhysicsConstants:
    air_density: float = 1.225  # kg/m^3
    gravity: float = 9.81  # m/s^2

    def __post_init__(self) -> None:
        if self.air_density <= 0 or self.gravity <= 0:
            raise ValueError("air_density and gravity must be positive")


@dataclass(frozen=True)
class VehicleSpec:
    """Vehicle and powertrain parameters affecting the energy balance."""

    panel_area: float  # m^2
    panel_efficiency: float  # fraction in (0, 1]
    system_efficiency: float  # fraction in (0, 1]
    mass: float  # kg
    drag_coefficient: float
    frontal_area: float  # m^2
    rolling_resistance: float
    battery_capacity: float  # Wh
    constant_power_loss: float  # W
    panel_temp_coefficient: float = 0.0016  # fraction per degree C

    def __post_init__(self) -> None:
        positive = (
            ("panel_area", self.panel_area),
            ("panel_efficiency", self.panel_efficiency),
            ("system_efficiency", self.system_efficiency),
            ("mass", self.mass),
            ("drag_coefficient", self.drag_coefficient),
            ("frontal_area", self.frontal_area),
            ("rolling_resistance", self.rolling_resistance),
            ("battery_capacity", self.battery_capacity),
            ("constant_power_loss", self.constant_power_loss),
        )
        for name, value in positive:
            if not value > 0:
                raise ValueError(f"{name} must be positive, got {value}")
        for name, value in (
            ("panel_efficiency", self.panel_efficiency),
            ("system_efficiency", self.system_efficiency),
        ):
            if value > 1.0:
                raise ValueError(f"{name} must be in (0, 1], got {value}")
        if self.panel_temp_coefficient < 0:
            raise ValueError("panel_temp_coefficient must be >= 0")


@dataclass
class EnergyBreakdown:
    """Per-step energy accounting, Wh. `gravitational` is signed."""

    drag: float = 0.0
    rolling: float = 0.0
    gravitational: float = 0.0
    system: float = 0.0
    charge: float = 0.0
    spilled: float = 0.0

    @property
    def consumption_total(self) -> float:
        return self.drag + self.rolling + self.gravitational + self.system

    def add(self, other: "EnergyBreakdown") -> None:
        self.drag += other.drag
        self.rolling += other.rolling
        self.gravitational += other.gravitational
        self.system += other.system
        self.charge += other.charge
        self.spilled += other.spilled

    def as_dict(self) -> dict:
        return {
            "drag_wh": self.drag,
            "rolling_wh": self.rolling,
            "gravitational_wh": self.gravitational,
            "system_wh": self.system,
            "consumption_wh": self.consumption_total,
            "charge_wh": self.charge,
            "spilled_wh": self.spilled,
        }


def headwind_component(wind_speed: float, wind_from_deg: float, heading_deg: float) -> float:
    """Signed along-track wind, m/s. Positive opposes the vehicle.

    `wind_from_deg` is meteorological (direction the wind blows FROM), so a
    wind from dead ahead is a pure headwind.
    """
    if wind_speed < 0:
        raise ValueError("wind_speed must be >= 0")
    return wind_speed * math.cos(math.radians(wind_from_deg - heading_deg))


def effective_panel_efficiency(spec: VehicleSpec, ambient_temp_c: float) -> float:
    """Panel efficiency derated linearly with temperature above 25 C.

    With a zero coefficient this is exactly the nominal efficiency; the
    result is clamped at zero for absurdly hot inputs.
    """
    eta = spec.panel_efficiency * (
        1.0 - spec.panel_temp_coefficient * (ambient_temp_c - PANEL_REFERENCE_TEMP_C)
    )
    return max(eta, 0.0)


def charge_power(spec: VehicleSpec, ghi_wm2: float, ambient_temp_c: float = PANEL_REFERENCE_TEMP_C) -> float:
    """Instantaneous array output, W."""
    if ghi_wm2 < 0:
        raise ValueError("ghi must be >= 0")
    return (
        spec.system_efficiency
        * effective_panel_efficiency(spec, ambient_temp_c)
        * ghi_wm2
        * spec.panel_area
    )


def charge_energy(
    spec: VehicleSpec,
    ghi_wm2: float,
    duration_h: float,
    ambient_temp_c: float = PANEL_REFERENCE_TEMP_C,
) -> float:
    """Solar energy harvested over `duration_h` hours, Wh."""
    if duration_h < 0:
        raise ValueError("duration must be >= 0")
    return charge_power(spec, ghi_wm2, ambient_temp_c) * duration_h


def drag_energy(
    spec: VehicleSpec,
    constants: PhysicsConstants,
    speed_ms: float,
    headwind_ms: float,
    distance_m: float,
) -> float:
    """Aerodynamic loss over `distance_m`, Wh.

    Uses the literal (v + v_w)^2 airspeed square, including the tailwind
    regime where v + v_w < 0.
    """
    if speed_ms < 0 or distance_m < 0:
        raise ValueError("speed and distance must be >= 0")
    airspeed = speed_ms + headwind_ms
    joules = (
        0.5
        * spec.drag_coefficient
        * constants.air_density
        * spec.frontal_area
        * airspeed
        * airspeed
        * distance_m
    )
    return joules / J_PER_WH


def rolling_energy(
    spec: VehicleSpec,
    constants: PhysicsConstants,
    incline_rad: float,
    distance_m: float,
) -> float:
    """Rolling resistance loss over `distance_m`, Wh."""
    if distance_m < 0:
        raise ValueError("distance must be >= 0")
    if not abs(incline_rad) < math.pi / 2:
        raise ValueError("incline must satisfy |incline| < pi/2")
    joules = (
        spec.mass
        * constants.gravity
        * spec.rolling_resistance
        * math.cos(incline_rad)
        * distance_m
    )
    return joules / J_PER_WH


def gravitational_energy(
    spec: VehicleSpec,
    constants: PhysicsConstants,
    elevation_change_m: float,
) -> float:
    """Potential-energy change, Wh; negative on net descent."""
    return spec.mass * constants.gravity * elevation_change_m / J_PER_WH


def system_energy(spec: VehicleSpec, duration_h: float) -> float:
    """Constant electronics draw over `duration_h` hours, Wh."""
    if duration_h < 0:
        raise ValueError("duration must be >= 0")
    return spec.constant_power_loss * duration_h


def consumption(
    spec: VehicleSpec,
    constants: PhysicsConstants,
    speed_ms: float,
    headwind_ms: float,
    incline_rad: float,
    elevation_change_m: float,
    distance_m: float,
    duration_h: float,
) -> EnergyBreakdown:
    """Full consumption breakdown for one motion interval (charge = 0)."""
    return EnergyBreakdown(
        drag=drag_energy(spec, constants, speed_ms, headwind_ms, distance_m),
        rolling=rolling_energy(spec, constants, incline_rad, distance_m),
        gravitational=gravitational_energy(spec, constants, elevation_change_m),
        system=system_energy(spec, duration_h),
    )


def air_density_ideal_gas(ambient_temp_c: float) -> float:
    """Dry-air density at sea-level pressure from the ideal gas law, kg/m^3."""
    return 101325.0 / (287.05 * (ambient_temp_c + 273.15))


_SPEC_FIELDS = {
    "panel_area",
    "panel_efficiency",
    "system_efficiency",
    "mass",
    "drag_coefficient",
    "frontal_area",
    "rolling_resistance",
    "battery_capacity",
    "constant_power_loss",
    "panel_temp_coefficient",
}


def load_vehicle_spec(path) -> VehicleSpec:
    """Read a flat `key = value` vehicle file (TOML-style, SI units)."""
    values: dict[str, float] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
            key, _, value = line.partition("=")
            key = key.strip()
            if key not in _SPEC_FIELDS:
                raise ValueError(f"{path}:{lineno}: unknown vehicle field {key!r}")
            try:
                values[key] = float(value.strip())
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: bad number for {key!r}") from exc
    missing = _SPEC_FIELDS - {"panel_temp_coefficient"} - set(values)
    if missing:
        raise ValueError(f"{path}: missing vehicle fields: {sorted(missing)}")
    return VehicleSpec(**values)
