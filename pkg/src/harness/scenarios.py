"""Initial-condition sampling for training episodes and evaluation sweeps."""

import hashlib
import math
from pathlib import Path
from typing import Any

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from src.config import Interval, ScenarioBounds
from src.errors import ConfigError
from src.sim.aircraft import AircraftState, initial_state
from src.sim.missile import GuidanceConfig, GuidanceLaw, MissileState, launch


class ScenarioSpec(BaseModel):
    """Fully resolved initial conditions of one engagement (angles in radians)."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    altitude: float
    aircraft_speed: float = Field(gt=0)
    heading: float
    roll: float = 0.0
    pitch: float = 0.0
    azimuth: float
    elevation: float
    range: float = Field(gt=0)
    missile_speed: float = Field(ge=0)
    max_overload: float = Field(gt=0)
    law: GuidanceLaw = GuidanceLaw.PN
    nav_coefficient: float = Field(gt=0)
    n_prime: float = Field(0.0, ge=0)
    seed: int | None = None

    def fingerprint(self) -> str:
        return hashlib.sha256(self.model_dump_json(exclude={"seed"}).encode()).hexdigest()

    def guidance(self, lethal_radius: float = 10.0) -> GuidanceConfig:
        return GuidanceConfig(
            law=self.law,
            nav_coefficient=self.nav_coefficient,
            n_prime=self.n_prime if self.law is GuidanceLaw.APN else 0.0,
            max_overload=self.max_overload,
            lethal_radius=lethal_radius,
        )

    def initial_aircraft(self) -> AircraftState:
        return initial_state(
            self.altitude, self.aircraft_speed, self.heading, roll=self.roll, pitch=self.pitch
        )

    def initial_missile(self, aircraft: AircraftState) -> MissileState:
        return launch(
            aircraft.position,
            aircraft.heading,
            self.range,
            self.azimuth,
            self.elevation,
            self.missile_speed,
        )

    @classmethod
    def from_yaml(cls, path: Path) -> "ScenarioSpec":
        """Read a scenario file whose angles are given in degrees (``heading_deg`` etc.)."""
        if not path.is_file():
            raise ConfigError(f"scenario file not found: {path}")
        try:
            data = yaml.safe_load(path.read_text()) or {}
        except yaml.YAMLError as e:
            raise ConfigError(f"cannot parse {path}: {e}") from e
        if not isinstance(data, dict):
            raise ConfigError(f"{path} must contain a mapping at top level")
        for name in ("heading", "roll", "pitch", "azimuth", "elevation"):
            if f"{name}_deg" in data:
                data[name] = math.radians(float(data.pop(f"{name}_deg")))
        try:
            return cls(**data)
        except ValidationError as e:
            raise ConfigError(f"invalid scenario {path}: {e}") from e


class IntervalWeights(BaseModel):
    """Pick an interval with probability proportional to its weight, then draw uniformly in it."""

    model_config = ConfigDict(frozen=True)

    intervals: list[Interval]
    weights: list[float]

    @model_validator(mode="after")
    def _check(self) -> "IntervalWeights":
        if len(self.intervals) != len(self.weights) or not self.intervals:
            raise ValueError("intervals and weights must be non-empty and equally long")
        if any(w <= 0 for w in self.weights):
            raise ValueError("weights must be positive")
        return self

    def probabilities(self) -> np.ndarray:
        w = np.asarray(self.weights, dtype=np.float64)
        return w / w.sum()

    def sample(self, rng: np.random.Generator) -> float:
        lo, hi = self.intervals[int(rng.choice(len(self.intervals), p=self.probabilities()))]
        return float(rng.uniform(lo, hi))


AIRCRAFT_SPEED_WEIGHTS = IntervalWeights(
    intervals=[(280.0, 320.0), (320.0, 360.0), (360.0, 400.0), (400.0, 440.0), (440.0, 470.0)],
    weights=[16, 8, 4, 2, 1],
)
RANGE_WEIGHTS = IntervalWeights(
    intervals=[(5000.0, 7000.0), (7000.0, 9000.0), (9000.0, 11000.0), (11000.0, 13000.0),
               (13000.0, 15000.0)],
    weights=[1, 2, 4, 8, 16],
)
LARGE_AZIMUTH_WEIGHTS = IntervalWeights(
    intervals=[(30.0, 60.0), (60.0, 90.0), (90.0, 120.0), (120.0, 150.0), (150.0, 180.0),
               (-180.0, -150.0), (-150.0, -120.0), (-120.0, -90.0), (-90.0, -60.0),
               (-60.0, -30.0)],
    weights=[1, 2, 4, 8, 16, 16, 8, 4, 2, 1],
)


def _draw(
    rng: np.random.Generator,
    name: str,
    bounds: ScenarioBounds,
    weights: dict[str, IntervalWeights],
) -> float:
    if name in weights:
        return weights[name].sample(rng)
    lo, hi = getattr(bounds, name)
    return float(rng.uniform(lo, hi))


def sample_scenario(
    rng: np.random.Generator,
    bounds: ScenarioBounds,
    weights: dict[str, IntervalWeights] | None = None,
    *,
    seed: int | None = None,
) -> ScenarioSpec:
    """Draw one scenario; the draw order is fixed so a seed always gives the same spec.

    ``weights`` is keyed by the ``ScenarioBounds`` field it replaces (for example
    ``"range"`` or ``"azimuth_deg"``), in the same units as that field.
    """
    weights = weights or {}
    draws: dict[str, Any] = {
        name: _draw(rng, name, bounds, weights)
        for name in (
            "altitude",
            "aircraft_speed",
            "heading_deg",
            "azimuth_deg",
            "elevation_deg",
            "range",
            "missile_speed",
            "max_overload",
            "nav_coefficient",
        )
    }
    law = GuidanceLaw(bounds.law)
    n_prime = 0.0
    if law is GuidanceLaw.APN:
        n_prime = draws["nav_coefficient"] * _draw(rng, "n_prime_ratio", bounds, weights)
    return ScenarioSpec(
        altitude=draws["altitude"],
        aircraft_speed=draws["aircraft_speed"],
        heading=math.radians(draws["heading_deg"]) % (2 * math.pi),
        azimuth=math.radians(draws["azimuth_deg"]),
        elevation=math.radians(draws["elevation_deg"]),
        range=draws["range"],
        missile_speed=draws["missile_speed"],
        max_overload=draws["max_overload"],
        law=law,
        nav_coefficient=draws["nav_coefficient"],
        n_prime=n_prime,
        seed=seed,
    )


def scenario_seed(master_seed: int, *indices: int) -> int:
    """Seed for one scenario, derived from the master seed and its grid coordinates."""
    return int(np.random.SeedSequence([master_seed, *indices]).generate_state(1)[0])


def seeded_scenario(
    seed: int,
    bounds: ScenarioBounds,
    weights: dict[str, IntervalWeights] | None = None,
) -> ScenarioSpec:
    return sample_scenario(np.random.default_rng(seed), bounds, weights, seed=seed)
