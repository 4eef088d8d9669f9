"""12-value normalised observation shared by the learner and the strategies."""

import math

import numpy as np
import numpy.typing as npt

from src.sim.aircraft import AircraftState
from src.sim.missile import MissileState

Observation = npt.NDArray[np.float64]

OBS_NAMES: tuple[str, ...] = (
    "vx",
    "vy",
    "vz",
    "pitch",
    "roll",
    "heading",
    "dx",
    "dy",
    "dz",
    "dvx",
    "dvy",
    "dvz",
)
OBS_DIM = len(OBS_NAMES)

OBS_LOW = np.array(
    [-470.0] * 3
    + [-math.pi / 2, -math.pi, 0.0]
    + [-15_000.0] * 3
    + [-1870.0] * 3
)
OBS_HIGH = np.array(
    [470.0] * 3
    + [math.pi / 2, math.pi, 2 * math.pi]
    + [15_000.0] * 3
    + [1870.0] * 3
)


def raw_observation(aircraft: AircraftState, missile: MissileState) -> Observation:
    return np.concatenate(
        [
            aircraft.velocity,
            [aircraft.pitch, aircraft.roll, aircraft.heading],
            missile.position - aircraft.position,
            missile.velocity - aircraft.velocity,
        ]
    )


def scale_observation(raw: Observation) -> Observation:
    """Clamp into the bounding box, then map it affinely onto ``[-1, 1]``."""
    clamped = np.clip(raw, OBS_LOW, OBS_HIGH)
    return 2.0 * (clamped - OBS_LOW) / (OBS_HIGH - OBS_LOW) - 1.0


def unscale_observation(scaled: Observation) -> Observation:
    return OBS_LOW + (np.asarray(scaled) + 1.0) * (OBS_HIGH - OBS_LOW) / 2.0


def encode_observation(aircraft: AircraftState, missile: MissileState) -> Observation:
    return scale_observation(raw_observation(aircraft, missile))
