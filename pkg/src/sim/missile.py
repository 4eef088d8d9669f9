"""Constant-speed missile with per-channel PN / APN guidance.

Guidance is split into a horizontal channel (bearing of the target, measured
clockwise like a heading) and a vertical channel (elevation of the target in
the vertical plane containing the line of sight). Each channel uses a signed
chord LOS rate taken from consecutive in-plane unit vectors.
"""

import math
from dataclasses import dataclass, replace
from enum import StrEnum

import numpy as np

from src.errors import ConfigError, SimulationError
from src.sim.geometry import Vec3, closing_velocity, heading_vector, wrap_two_pi

G0 = 9.81


class GuidanceLaw(StrEnum):
    PN = "pn"
    APN = "apn"


class Outcome(StrEnum):
    ONGOING = "ongoing"
    HIT = "hit"
    EXPIRED = "expired"


@dataclass(frozen=True, slots=True)
class GuidanceConfig:
    law: GuidanceLaw = GuidanceLaw.PN
    nav_coefficient: float = 4.0
    n_prime: float = 0.0
    max_overload: float = 45.0
    lethal_radius: float = 10.0

    def __post_init__(self) -> None:
        if self.nav_coefficient <= 0 or self.max_overload <= 0 or self.lethal_radius <= 0:
            raise ConfigError(f"guidance parameters must be positive: {self}")
        if self.n_prime < 0:
            raise ConfigError(f"n_prime must be non-negative: {self.n_prime}")


@dataclass(frozen=True, slots=True)
class MissileState:
    position: Vec3
    speed: float
    heading: float
    pitch: float
    elapsed: float = 0.0

    @property
    def velocity(self) -> Vec3:
        return self.speed * heading_vector(self.heading, self.pitch)


@dataclass(frozen=True, slots=True)
class GuidanceMemory:
    """Previous-step seeker samples needed by the chord rates and the APN term."""

    horizontal_los: tuple[float, float] | None = None
    vertical_los: tuple[float, float] | None = None
    aircraft_velocity: Vec3 | None = None


@dataclass(frozen=True, slots=True)
class GuidanceCommand:
    horizontal_accel: float
    vertical_accel: float
    overload: float
    memory: GuidanceMemory


def launch(
    aircraft_pos: Vec3,
    aircraft_heading: float,
    range_m: float,
    azimuth: float,
    elevation: float,
    speed: float,
) -> MissileState:
    """Place a missile at (range, azimuth, elevation) from the aircraft, nose on target."""
    # azimuth is measured from the tail toward the right wing, i.e. anticlockwise in bearing
    bearing = aircraft_heading + math.pi - azimuth
    offset = range_m * heading_vector(bearing, elevation)
    return MissileState(
        position=aircraft_pos + offset,
        speed=speed,
        heading=wrap_two_pi(bearing + math.pi),
        pitch=-elevation,
    )


def _signed_chord(prev: tuple[float, float] | None, curr: tuple[float, float], dt: float) -> float:
    if prev is None:
        return 0.0
    chord = math.hypot(curr[0] - prev[0], curr[1] - prev[1]) / dt
    return math.copysign(chord, prev[0] * curr[1] - prev[1] * curr[0]) if chord else 0.0


def channel_los_rates(
    delta_pos: Vec3, memory: GuidanceMemory, dt: float
) -> tuple[float, float, tuple[float, float], tuple[float, float]]:
    """Horizontal and vertical signed LOS rates of ``delta_pos`` (target minus missile).

    The horizontal rate is positive for clockwise bearing motion, matching the
    heading convention; the vertical rate is positive when elevation grows.
    """
    dx, dy, dz = (float(c) for c in delta_pos)
    rho = math.hypot(dx, dy)
    distance = math.hypot(rho, dz)
    if distance == 0.0:
        raise SimulationError("missile and aircraft coincide")
    # (north, east) ordering makes the 2-D cross product positive for clockwise motion
    horizontal = (dy / rho, dx / rho) if rho > 0.0 else (memory.horizontal_los or (1.0, 0.0))
    vertical = (rho / distance, dz / distance)
    return (
        _signed_chord(memory.horizontal_los, horizontal, dt),
        _signed_chord(memory.vertical_los, vertical, dt),
        horizontal,
        vertical,
    )


def pn_channel_accels(
    horizontal_rate: float, vertical_rate: float, nav_coefficient: float, closing_speed: float
) -> tuple[float, float]:
    return (
        nav_coefficient * closing_speed * horizontal_rate,
        nav_coefficient * closing_speed * vertical_rate,
    )


def apn_channel_accels(
    horizontal_rate: float,
    vertical_rate: float,
    nav_coefficient: float,
    n_prime: float,
    closing_speed: float,
    aircraft_accel_perp: tuple[float, float],
) -> tuple[float, float]:
    a_h, a_v = pn_channel_accels(horizontal_rate, vertical_rate, nav_coefficient, closing_speed)
    return a_h + n_prime * aircraft_accel_perp[0], a_v + n_prime * aircraft_accel_perp[1]


def perpendicular_components(delta_pos: Vec3, accel: Vec3) -> tuple[float, float]:
    """Components of ``accel`` along increasing bearing and increasing elevation of the LOS."""
    dx, dy, dz = (float(c) for c in delta_pos)
    rho = math.hypot(dx, dy)
    distance = math.hypot(rho, dz)
    if rho == 0.0 or distance == 0.0:
        return 0.0, float(accel[2])
    along_bearing = np.array([dy / rho, -dx / rho, 0.0])
    sin_e, cos_e = dz / distance, rho / distance
    along_elevation = np.array([-sin_e * dx / rho, -sin_e * dy / rho, cos_e])
    return float(np.dot(accel, along_bearing)), float(np.dot(accel, along_elevation))


def truncate_overload(
    a_h: float, a_v: float, max_overload: float, g0: float = G0
) -> tuple[float, float]:
    """Scale both channels by the same factor so the total stays within ``max_overload``."""
    n = math.hypot(a_h, a_v) / g0
    if n <= max_overload:
        return a_h, a_v
    scale = max_overload / n
    return a_h * scale, a_v * scale


def guidance_command(
    missile: MissileState,
    aircraft_pos: Vec3,
    aircraft_vel: Vec3,
    memory: GuidanceMemory,
    config: GuidanceConfig,
    dt: float,
    g0: float = G0,
) -> GuidanceCommand:
    delta = aircraft_pos - missile.position
    rate_h, rate_v, los_h, los_v = channel_los_rates(delta, memory, dt)
    v_c = closing_velocity(delta, aircraft_vel - missile.velocity)
    if config.law is GuidanceLaw.APN:
        if memory.aircraft_velocity is None:
            perp = (0.0, 0.0)
        else:
            aircraft_accel = (aircraft_vel - memory.aircraft_velocity) / dt
            perp = perpendicular_components(delta, aircraft_accel)
        a_h, a_v = apn_channel_accels(
            rate_h, rate_v, config.nav_coefficient, config.n_prime, v_c, perp
        )
    else:
        a_h, a_v = pn_channel_accels(rate_h, rate_v, config.nav_coefficient, v_c)
    a_h, a_v = truncate_overload(a_h, a_v, config.max_overload, g0)
    return GuidanceCommand(
        horizontal_accel=a_h,
        vertical_accel=a_v,
        overload=math.hypot(a_h, a_v) / g0,
        memory=GuidanceMemory(
            horizontal_los=los_h, vertical_los=los_v, aircraft_velocity=aircraft_vel.copy()
        ),
    )


def step_missile(
    state: MissileState,
    accels: tuple[float, float],
    dt: float,
    cos_floor: float = 0.05,
) -> MissileState:
    a_h, a_v = accels
    if not (math.isfinite(a_h) and math.isfinite(a_v)) or not np.all(np.isfinite(state.position)):
        raise SimulationError(f"non-finite missile input: accels={accels}")
    if state.speed > 0.0:
        heading_rate = a_h / (state.speed * max(cos_floor, math.cos(state.pitch)))
        pitch_rate = a_v / state.speed
    else:
        heading_rate = pitch_rate = 0.0
    heading = wrap_two_pi(state.heading + heading_rate * dt)
    pitch = min(math.pi / 2, max(-math.pi / 2, state.pitch + pitch_rate * dt))
    return replace(
        state,
        position=state.position + state.speed * dt * heading_vector(heading, pitch),
        heading=heading,
        pitch=pitch,
        elapsed=state.elapsed + dt,
    )


def check_outcome(
    aircraft_pos: Vec3,
    missile: MissileState,
    *,
    lethal_radius: float = 10.0,
    effective_time: float = 25.0,
    closest_range: float | None = None,
) -> Outcome:
    """Hit wins over expiry when both hold on the same step."""
    distance = float(np.linalg.norm(missile.position - aircraft_pos))
    if closest_range is not None:
        distance = min(distance, closest_range)
    if distance < lethal_radius:
        return Outcome.HIT
    # tolerate float accumulation of elapsed += dt
    if missile.elapsed >= effective_time - 1e-9:
        return Outcome.EXPIRED
    return Outcome.ONGOING
