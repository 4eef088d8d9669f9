"""Configuration management using Pydantic settings.

Every tunable constant of the workbench lives here. Values follow the source
experiments; angles are given in degrees in files and exposed in radians via
``*_rad`` properties.
"""

import hashlib
import logging
import math
from pathlib import Path
from typing import Any, Literal

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from src.errors import ConfigError

logger = logging.getLogger(__name__)

Interval = tuple[float, float]


def _check_interval(name: str, interval: Interval) -> None:
    lo, hi = interval
    if not math.isfinite(lo) or not math.isfinite(hi) or lo > hi:
        raise ValueError(f"{name}: invalid interval {interval}")


class _Section(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class AircraftParams(_Section):
    """Calibration constants of the point-mass aircraft model."""

    p_max: float = Field(3.14, gt=0, description="max roll rate, rad/s")
    q_max: float = Field(0.52, gt=0, description="max flight-path rate, rad/s")
    r_max: float = Field(0.10, gt=0, description="max rudder heading rate, rad/s")
    n_max: float = Field(9.0, gt=0, description="max load factor, g")
    thrust_max: float = Field(130_000.0, gt=0, description="N")
    mass: float = Field(12_000.0, gt=0, description="kg")
    k0: float = Field(0.5844, gt=0, description="parasitic drag, N s^2/m^2")
    k1: float = Field(2.0e8, gt=0, description="induced drag, N m^2/s^2 per g^2")
    g0: float = Field(9.81, gt=0)
    v_min: float = Field(150.0, gt=0)
    v_max: float = Field(510.0, gt=0)

    @model_validator(mode="after")
    def _speed_order(self) -> "AircraftParams":
        if self.v_min >= self.v_max:
            raise ValueError("v_min must be below v_max")
        return self


class GuidanceDefaults(_Section):
    lethal_radius: float = Field(10.0, gt=0)
    cos_floor: float = Field(0.05, gt=0, lt=1)
    g0: float = Field(9.81, gt=0)


class RewardSettings(_Section):
    """Generic reward parameters, defaulted to the experimental instantiation."""

    tau: float = Field(0.2, gt=0)
    roll_weight: float = 0.5
    pitch_weight: float = 0.5
    target_roll_deg: float = 85.0
    los_weight: float = 0.6
    los_scale: float = Field(0.1, gt=0)
    azimuth_weight: float = 1.0
    reference_speed: float = 350.0
    small_velocity_weight: float = 0.2
    small_velocity_scale: float = Field(80.0, gt=0)
    large_velocity_weight: float = 0.3
    large_velocity_scale: float = Field(60.0, gt=0)
    penalty: float = -20.0
    roll_limit_deg: float = 135.0
    pitch_limit_deg: float = 22.5
    azimuth_limit_deg: float = 30.0
    speed_min: float = 240.0
    speed_max: float = 510.0
    large_switch_range: float = 8500.0
    close_roll_limit_deg: float = 30.0
    close_roll_reward: float = 0.5
    baseline_los_gain: float = 2.4
    baseline_los_floor: float = Field(1e-6, gt=0)
    baseline_overload_gain: float = -0.01
    baseline_hit_gain: float = -200.0
    baseline_miss_gain: float = 400.0
    baseline_miss_bonus: float = 4000.0
    lethal_radius: float = 10.0

    @property
    def target_roll_rad(self) -> float:
        return math.radians(self.target_roll_deg)

    @property
    def roll_limit_rad(self) -> float:
        return math.radians(self.roll_limit_deg)

    @property
    def pitch_limit_rad(self) -> float:
        return math.radians(self.pitch_limit_deg)

    @property
    def azimuth_limit_rad(self) -> float:
        return math.radians(self.azimuth_limit_deg)

    @property
    def close_roll_limit_rad(self) -> float:
        return math.radians(self.close_roll_limit_deg)


class TrainConfig(_Section):
    gamma: float = Field(0.99, gt=0, le=1)
    learning_rate: float = Field(3e-4, ge=0)
    batch_size: int = Field(1024, gt=0)
    minibatch_size: int = Field(256, gt=0)
    max_episode_steps: int = Field(7500, gt=0)
    gae_lambda: float = Field(0.95, ge=0, le=1)
    clip_eps: float = Field(0.2, gt=0)
    epochs: int = Field(10, gt=0)
    entropy_coef: float = Field(0.0, ge=0)
    value_coef: float = Field(0.5, ge=0)
    max_grad_norm: float = Field(0.5, gt=0)
    log_std_init: float = -0.5
    hidden_sizes: tuple[int, ...] = (256, 256)
    episodes: int = Field(3000, gt=0)
    seed: int = 0
    log_every: int = Field(10, gt=0)


class ScenarioBounds(_Section):
    """Initial-condition box of the scenario generator."""

    altitude: Interval = (3000.0, 9000.0)
    aircraft_speed: Interval = (280.0, 470.0)
    heading_deg: Interval = (0.0, 360.0)
    azimuth_deg: Interval = (-180.0, 180.0)
    elevation_deg: Interval = (-15.0, 15.0)
    range: Interval = (5000.0, 15000.0)
    missile_speed: Interval = (800.0, 1400.0)
    max_overload: Interval = (40.0, 50.0)
    nav_coefficient: Interval = (3.0, 5.0)
    n_prime_ratio: Interval = (0.5, 1.0)
    law: Literal["pn", "apn"] = "pn"

    @model_validator(mode="after")
    def _intervals(self) -> "ScenarioBounds":
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
            "n_prime_ratio",
        ):
            _check_interval(name, getattr(self, name))
        return self


class SweepSettings(_Section):
    """Desk-scale default grid; the full grids are built by ``SweepGrid`` factories."""

    aircraft_speed_edges: tuple[float, ...] = (280.0, 360.0, 470.0)
    missile_speed_edges: tuple[float, ...] = (800.0, 1100.0, 1400.0)
    range_edges: tuple[float, ...] = (5000.0, 8000.0, 11000.0, 15000.0)
    azimuth_edges_deg: tuple[float, ...] = (-180.0, -90.0, 0.0, 90.0, 180.0)
    tests_per_cell: int = Field(2, gt=0)
    paired: bool = True
    jobs: int = Field(1, gt=0)
    master_seed: int = 0


class SimSettings(_Section):
    dt: float = Field(1.0 / 200.0, gt=0)
    test_max_steps: int = Field(5000, gt=0)
    train_max_steps: int = Field(7500, gt=0)
    min_altitude: float = 1000.0
    effective_time: float = Field(25.0, gt=0)
    action_repeat: int = Field(1, gt=0)


class Settings(BaseSettings):
    """Application settings."""

    model_config = SettingsConfigDict(
        env_prefix="EVASION_",
        env_nested_delimiter="__",
        extra="forbid",
    )

    aircraft: AircraftParams = AircraftParams()
    guidance: GuidanceDefaults = GuidanceDefaults()
    rewards: RewardSettings = RewardSettings()
    train: TrainConfig = TrainConfig()
    scenario: ScenarioBounds = ScenarioBounds()
    sweep: SweepSettings = SweepSettings()
    sim: SimSettings = SimSettings()
    output_dir: Path = Path("runs")
    log_level: str = "INFO"

    def fingerprint(self) -> str:
        """SHA-256 of the canonical JSON dump, stored in checkpoints."""
        return hashlib.sha256(self.model_dump_json().encode("utf-8")).hexdigest()

    def dump_yaml(self, path: Path) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(yaml.safe_dump(self.model_dump(mode="json"), sort_keys=True))


def _deep_merge(base: dict[str, Any], extra: dict[str, Any]) -> dict[str, Any]:
    merged = dict(base)
    for key, value in extra.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def load_settings(path: Path | None = None, overrides: dict[str, Any] | None = None) -> Settings:
    """Build settings from an optional YAML file plus flag overrides (flags win)."""
    data: dict[str, Any] = {}
    if path is not None:
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        try:
            loaded = yaml.safe_load(path.read_text()) or {}
        except yaml.YAMLError as e:
            raise ConfigError(f"cannot parse {path}: {e}") from e
        if not isinstance(loaded, dict):
            raise ConfigError(f"{path} must contain a mapping at top level")
        data = loaded
        logger.info(f"Loaded config file {path}")
    if overrides:
        data = _deep_merge(data, overrides)
    try:
        return Settings(**data)
    except ValidationError as e:
        raise ConfigError(str(e)) from e
