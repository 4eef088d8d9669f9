"""ENU-frame relative kinematics between the aircraft and the missile.

x points east, y north, z up. Headings are measured clockwise from north, so a
heading ``psi`` points along ``(sin psi, cos psi, 0)``. ``delta_pos`` is always
missile minus aircraft.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt

from src.errors import GeometryError

logger = logging.getLogger(__name__)

Vec3 = npt.NDArray[np.float64]

UP: Vec3 = np.array([0.0, 0.0, 1.0])
UNIT_TOLERANCE = 1e-9
SMOOTHING_GAIN = 0.25


def vec3(x: float, y: float, z: float) -> Vec3:
    return np.array([x, y, z], dtype=np.float64)


def heading_vector(heading: float, pitch: float = 0.0) -> Vec3:
    """Unit vector of a body flying at ``heading`` with flight-path angle ``pitch``."""
    cp = math.cos(pitch)
    return vec3(cp * math.sin(heading), cp * math.cos(heading), math.sin(pitch))


def wrap_pi(angle: float) -> float:
    """Wrap into (-pi, pi]."""
    wrapped = math.remainder(angle, 2.0 * math.pi)
    return math.pi if wrapped == -math.pi else wrapped


def wrap_two_pi(angle: float) -> float:
    """Wrap into [0, 2 pi)."""
    wrapped = angle % (2.0 * math.pi)
    return 0.0 if wrapped == 2.0 * math.pi else wrapped


def azimuth_of(aircraft_heading: float, delta_pos: Vec3) -> float:
    """Signed horizontal angle of the missile from the aircraft's reversed heading.

    Positive when the missile is on the aircraft's right. Dead astern is 0 and
    dead ahead is +pi.
    """
    horizontal = math.hypot(delta_pos[0], delta_pos[1])
    if horizontal < 1e-12:
        logger.warning("azimuth undefined for a purely vertical line of sight, using 0")
        return 0.0
    sin_h, cos_h = math.sin(aircraft_heading), math.cos(aircraft_heading)
    # reversed heading (-sin, -cos) and right wing (cos, -sin)
    aft = -delta_pos[0] * sin_h - delta_pos[1] * cos_h
    right = delta_pos[0] * cos_h - delta_pos[1] * sin_h
    return wrap_pi(math.atan2(right, aft))


def elevation_of(delta_pos: Vec3) -> float:
    distance = float(np.linalg.norm(delta_pos))
    if distance == 0.0:
        raise GeometryError("coincident positions")
    return math.asin(max(-1.0, min(1.0, delta_pos[2] / distance)))


def side_sign(delta_pos: Vec3, aircraft_vel: Vec3) -> int:
    """Sign of ``(delta_pos x aircraft_vel) . up``; +1 means the missile is on the right."""
    z = delta_pos[0] * aircraft_vel[1] - delta_pos[1] * aircraft_vel[0]
    return int(np.sign(z))


def turn_sign(sign: int) -> int:
    """Collapse the collinear case onto a right turn."""
    return -1 if sign < 0 else 1


def _check_unit(name: str, u: Vec3) -> None:
    norm = float(np.linalg.norm(u))
    if not (1.0 - UNIT_TOLERANCE <= norm <= 1.0 + UNIT_TOLERANCE):
        raise GeometryError(f"{name} is not a unit vector (norm {norm!r})")


def los_rates(prev_unit: Vec3, curr_unit: Vec3, dt: float) -> tuple[float, float]:
    """Chord-length LOS rate and its signed version about the up axis."""
    if dt <= 0.0:
        raise GeometryError(f"dt must be positive, got {dt}")
    _check_unit("prev_unit", prev_unit)
    _check_unit("curr_unit", curr_unit)
    rate = float(np.linalg.norm(curr_unit - prev_unit)) / dt
    turn = prev_unit[0] * curr_unit[1] - prev_unit[1] * curr_unit[0]
    return rate, float(np.sign(turn)) * rate


@dataclass
class LosSmoother:
    """First-order low-pass filter for the signed LOS rate, one per episode."""

    previous_smoothed: float = 0.0
    initialized: bool = False

    def reset(self) -> None:
        self.previous_smoothed = 0.0
        self.initialized = False


def smooth_los_rate(smoother: LosSmoother, raw: float) -> float:
    if not smoother.initialized:
        smoother.previous_smoothed = raw
        smoother.initialized = True
        return raw
    out = SMOOTHING_GAIN * raw + (1.0 - SMOOTHING_GAIN) * smoother.previous_smoothed
    smoother.previous_smoothed = out
    return out


def closing_velocity(delta_pos: Vec3, delta_vel: Vec3) -> float:
    """Rate of range decrease; positive while the missile is closing."""
    distance = float(np.linalg.norm(delta_pos))
    if distance == 0.0:
        raise GeometryError("closing velocity undefined at zero range")
    return -float(np.dot(delta_pos, delta_vel)) / distance


def segment_min_range(delta_start: Vec3, delta_end: Vec3) -> float:
    """Closest approach along straight-line relative motion between two samples."""
    step = delta_end - delta_start
    length_sq = float(np.dot(step, step))
    if length_sq == 0.0:
        return float(np.linalg.norm(delta_end))
    s = min(1.0, max(0.0, -float(np.dot(delta_start, step)) / length_sq))
    return float(np.linalg.norm(delta_start + s * step))


@dataclass(frozen=True, slots=True)
class RelativeGeometry:
    range: float
    azimuth: float
    elevation: float
    side_sign: int
    los_rate: float
    signed_los_rate: float
    closing_velocity: float
    los_unit: Vec3 = field(repr=False)
    smoothed_los_rate: float = 0.0


def relative_geometry(
    aircraft_pos: Vec3,
    aircraft_vel: Vec3,
    aircraft_heading: float,
    missile_pos: Vec3,
    missile_vel: Vec3,
    *,
    prev_unit: Vec3 | None = None,
    dt: float = 1.0 / 200.0,
    smoother: LosSmoother | None = None,
) -> RelativeGeometry:
    """Measure everything the rewards, switch logic and logs need for one step.

    Without ``prev_unit`` (first sample of an episode) both LOS rates are zero.
    """
    delta_pos = missile_pos - aircraft_pos
    distance = float(np.linalg.norm(delta_pos))
    if distance == 0.0:
        raise GeometryError("coincident positions")
    unit = delta_pos / distance
    rate, signed = (0.0, 0.0) if prev_unit is None else los_rates(prev_unit, unit, dt)
    # no rate on the first sample; the filter seeds on the next one
    smoothed = signed
    if smoother is not None and prev_unit is not None:
        smoothed = smooth_los_rate(smoother, signed)
    return RelativeGeometry(
        range=distance,
        azimuth=azimuth_of(aircraft_heading, delta_pos),
        elevation=elevation_of(delta_pos),
        side_sign=side_sign(delta_pos, aircraft_vel),
        los_rate=rate,
        signed_los_rate=signed,
        closing_velocity=closing_velocity(delta_pos, missile_vel - aircraft_vel),
        los_unit=unit,
        smoothed_los_rate=smoothed,
    )
