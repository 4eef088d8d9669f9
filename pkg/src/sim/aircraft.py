"""Point-mass fixed-wing model driven by four normalised control inputs.

Attitude is kinematic: the aileron commands roll rate, the elevator commands
flight-path rate and the rudder adds a small heading rate on top of the
coordinated turn. Pitch is the flight-path angle; there is no angle-of-attack
or stall model.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from src.config import AircraftParams
from src.errors import SimulationError
from src.sim.geometry import Vec3, heading_vector, vec3, wrap_pi, wrap_two_pi


@dataclass(frozen=True, slots=True)
class ControlAction:
    elevator: float = 0.0
    aileron: float = 0.0
    rudder: float = 0.0
    throttle: float = 0.0

    def clamped(self) -> "ControlAction":
        _require_finite("control action", self.elevator, self.aileron, self.rudder, self.throttle)
        return ControlAction(
            elevator=min(1.0, max(-1.0, self.elevator)),
            aileron=min(1.0, max(-1.0, self.aileron)),
            rudder=min(1.0, max(-1.0, self.rudder)),
            throttle=min(1.0, max(0.0, self.throttle)),
        )

    def as_array(self) -> np.ndarray:
        return np.array([self.elevator, self.aileron, self.rudder, self.throttle])

    @classmethod
    def from_array(cls, values: np.ndarray) -> "ControlAction":
        e, a, r, t = (float(v) for v in values)
        return cls(elevator=e, aileron=a, rudder=r, throttle=t).clamped()


@dataclass(frozen=True, slots=True)
class AircraftState:
    position: Vec3
    speed: float
    roll: float = 0.0
    pitch: float = 0.0
    heading: float = 0.0
    ground_impact: bool = False

    @property
    def velocity(self) -> Vec3:
        return self.speed * heading_vector(self.heading, self.pitch)

    @property
    def altitude(self) -> float:
        return float(self.position[2])


@dataclass(frozen=True, slots=True)
class TurnRates:
    heading_rate: float
    pitch_rate: float
    roll_rate: float


def initial_state(
    altitude: float,
    speed: float,
    heading: float,
    *,
    roll: float = 0.0,
    pitch: float = 0.0,
) -> AircraftState:
    """Aircraft at ``[0, 0, altitude]``."""
    return AircraftState(
        position=vec3(0.0, 0.0, altitude),
        speed=speed,
        roll=wrap_pi(roll),
        pitch=pitch,
        heading=wrap_two_pi(heading),
    )


def load_factor(state: AircraftState, rates: TurnRates, g0: float = 9.81) -> float:
    if state.speed <= 0.0:
        raise SimulationError("load factor undefined for non-positive speed")
    cos_p = math.cos(state.pitch)
    lateral = state.speed * rates.heading_rate * cos_p / g0
    normal = state.speed * rates.pitch_rate / g0 + cos_p
    return math.hypot(lateral, normal)


def turn_rates(state: AircraftState, action: ControlAction, params: AircraftParams) -> TurnRates:
    """Attitude rates for ``action``, limited so the load factor stays within ``n_max``."""
    cos_p = math.cos(state.pitch)
    heading_rate = (
        params.g0 * math.tan(state.roll) * cos_p / state.speed + params.r_max * action.rudder
    )
    pitch_rate = params.q_max * action.elevator
    rates = TurnRates(heading_rate, pitch_rate, params.p_max * action.aileron)
    n = load_factor(state, rates, params.g0)
    if n <= params.n_max:
        return rates
    # scale both acceleration channels back onto the n_max circle
    scale = params.n_max / n
    normal = (state.speed * pitch_rate / params.g0 + cos_p) * scale
    return TurnRates(
        heading_rate=heading_rate * scale,
        pitch_rate=(normal - cos_p) * params.g0 / state.speed,
        roll_rate=rates.roll_rate,
    )


def trim_throttle(speed: float, params: AircraftParams) -> float:
    """Throttle that holds ``speed`` in straight and level flight."""
    drag = params.k0 * speed**2 + params.k1 / speed**2
    return min(1.0, max(0.0, drag / params.thrust_max))


def _require_finite(label: str, *values: float) -> None:
    if not all(math.isfinite(v) for v in values):
        raise SimulationError(f"non-finite {label}: {values}")


def step_aircraft(
    state: AircraftState,
    action: ControlAction,
    params: AircraftParams,
    dt: float,
) -> AircraftState:
    """Advance one semi-implicit Euler step."""
    _require_finite("aircraft state", *state.position, state.speed, state.roll, state.pitch)
    _require_finite(
        "control action", action.elevator, action.aileron, action.rudder, action.throttle
    )
    action = action.clamped()
    rates = turn_rates(state, action, params)
    n = load_factor(state, rates, params.g0)

    drag = params.k0 * state.speed**2 + params.k1 * n**2 / state.speed**2
    accel = (params.thrust_max * action.throttle - drag) / params.mass - params.g0 * math.sin(
        state.pitch
    )
    speed = min(params.v_max, max(params.v_min, state.speed + accel * dt))
    roll = wrap_pi(state.roll + rates.roll_rate * dt)
    pitch = min(math.pi / 2, max(-math.pi / 2, state.pitch + rates.pitch_rate * dt))
    heading = wrap_two_pi(state.heading + rates.heading_rate * dt)
    position = state.position + speed * dt * heading_vector(heading, pitch)
    _require_finite("aircraft update", *position, speed, roll, pitch, heading)

    return replace(
        state,
        position=position,
        speed=speed,
        roll=roll,
        pitch=pitch,
        heading=heading,
        ground_impact=state.ground_impact or bool(position[2] < 0.0),
    )
