"""Shared fixtures: small settings, state builders and tiny networks."""

import json
import math
from collections.abc import Callable
from pathlib import Path
from typing import Any

import pytest

from src.config import Settings
from src.harness.scenarios import ScenarioSpec
from src.models.networks import ActorCritic, build_actor_critic
from src.sim.aircraft import AircraftState
from src.sim.geometry import RelativeGeometry, vec3

GOLDEN_DIR = Path(__file__).parent / "golden"


@pytest.fixture
def settings() -> Settings:
    return Settings()


@pytest.fixture
def fast_settings(tmp_path) -> Settings:
    """Short episodes, a one-cell grid and a tiny network so harness tests run in seconds."""
    return Settings(
        train={
            "batch_size": 64,
            "minibatch_size": 32,
            "epochs": 2,
            "hidden_sizes": (8, 8),
            "episodes": 3,
            "log_every": 1,
        },
        sim={"train_max_steps": 40, "test_max_steps": 120},
        sweep={
            "aircraft_speed_edges": (280.0, 470.0),
            "missile_speed_edges": (800.0, 1400.0),
            "range_edges": (9000.0, 15000.0),
            "azimuth_edges_deg": (-180.0, 0.0, 180.0),
            "tests_per_cell": 2,
        },
        output_dir=tmp_path / "runs",
    )


@pytest.fixture
def aircraft() -> Callable[..., AircraftState]:
    def make(
        roll_deg: float = 0.0, pitch_deg: float = 0.0, speed: float = 350.0
    ) -> AircraftState:
        return AircraftState(
            position=vec3(0.0, 0.0, 5000.0),
            speed=speed,
            roll=math.radians(roll_deg),
            pitch=math.radians(pitch_deg),
        )

    return make


@pytest.fixture
def geometry() -> Callable[..., RelativeGeometry]:
    def make(
        range_m: float = 10_000.0,
        azimuth: float = 0.0,
        side: int = 1,
        los_rate: float = 0.0,
        smoothed: float = 0.0,
    ) -> RelativeGeometry:
        return RelativeGeometry(
            range=range_m,
            azimuth=azimuth,
            elevation=0.0,
            side_sign=side,
            los_rate=abs(los_rate),
            signed_los_rate=los_rate,
            closing_velocity=0.0,
            los_unit=vec3(1.0, 0.0, 0.0),
            smoothed_los_rate=smoothed,
        )

    return make


@pytest.fixture
def scenario() -> Callable[..., ScenarioSpec]:
    def make(**overrides: float) -> ScenarioSpec:
        values = {
            "altitude": 5000.0,
            "aircraft_speed": 300.0,
            "heading": 0.0,
            "azimuth": math.pi,
            "elevation": 0.0,
            "range": 8000.0,
            "missile_speed": 1000.0,
            "max_overload": 45.0,
            "nav_coefficient": 4.0,
        }
        return ScenarioSpec(**(values | overrides))

    return make


@pytest.fixture
def tiny_net() -> ActorCritic:
    return build_actor_critic(0, hidden_sizes=(8, 8))


@pytest.fixture
def golden() -> Callable[[str, dict[str, Any]], dict[str, Any]]:
    """Load a frozen regression fixture, recording it on the very first run.

    A missing file is written from ``payload`` and the test is skipped; commit
    the file and later runs compare against it.
    """

    def load(name: str, payload: dict[str, Any]) -> dict[str, Any]:
        path = GOLDEN_DIR / name
        if not path.is_file():
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
            pytest.skip(f"recorded {path.name}; commit it to freeze the values")
        return json.loads(path.read_text())

    return load
