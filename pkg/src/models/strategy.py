"""Evasion strategies: the multi-stage policy switcher and its comparators."""

import logging
import math
from dataclasses import dataclass, field
from enum import StrEnum
from pathlib import Path
from typing import Protocol

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from src.data.observation import Observation
from src.errors import CheckpointError
from src.models.checkpoint import load_checkpoint
from src.models.networks import ActorCritic, deterministic_action
from src.sim.aircraft import AircraftState, ControlAction
from src.sim.geometry import RelativeGeometry, turn_sign, wrap_pi

logger = logging.getLogger(__name__)


class Stage(StrEnum):
    LARGE_AZIMUTH = "large-azimuth"
    SMALL_AZIMUTH = "small-azimuth"
    SHORT_DISTANCE = "short-distance"


class SwitchThresholds(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    enter_short_range: float = Field(8000.0, gt=0)
    split_azimuth_deg: float = Field(30.0, gt=0)
    large_exit_azimuth_deg: float = Field(15.0, gt=0)

    @model_validator(mode="after")
    def _ordered(self) -> "SwitchThresholds":
        if self.large_exit_azimuth_deg >= self.split_azimuth_deg:
            raise ValueError("large_exit_azimuth_deg must be below split_azimuth_deg")
        return self


DEFAULT_THRESHOLDS = SwitchThresholds()


def select_stage(
    prev: Stage | None,
    range_m: float,
    azimuth: float,
    thresholds: SwitchThresholds = DEFAULT_THRESHOLDS,
) -> Stage:
    """Next stage from the previous one, the range and the azimuth magnitude.

    Short distance is absorbing. Between the two azimuth stages there is a
    hysteresis band: large hands over to small only below the exit threshold,
    small hands back to large only above the split threshold.
    """
    if prev is Stage.SHORT_DISTANCE or range_m <= thresholds.enter_short_range:
        return Stage.SHORT_DISTANCE
    magnitude = abs(azimuth)
    split = math.radians(thresholds.split_azimuth_deg)
    if prev is Stage.LARGE_AZIMUTH:
        exit_ = math.radians(thresholds.large_exit_azimuth_deg)
        return Stage.SMALL_AZIMUTH if magnitude < exit_ else Stage.LARGE_AZIMUTH
    return Stage.SMALL_AZIMUTH if magnitude <= split else Stage.LARGE_AZIMUTH


@dataclass(frozen=True)
class Decision:
    action: ControlAction
    stage: str


class Strategy(Protocol):
    name: str

    def reset(self) -> None: ...

    def decide(
        self, obs: Observation, rel: RelativeGeometry, aircraft: AircraftState
    ) -> Decision: ...


@dataclass
class PolicyStrategy:
    """A single trained policy flown deterministically for the whole episode."""

    name: str
    net: ActorCritic

    def reset(self) -> None:
        pass

    def decide(self, obs: Observation, rel: RelativeGeometry, aircraft: AircraftState) -> Decision:
        return Decision(deterministic_action(self.net, obs), self.name)


@dataclass
class StrategyBundle:
    large: ActorCritic
    small: ActorCritic
    short: ActorCritic
    thresholds: SwitchThresholds = DEFAULT_THRESHOLDS

    def network(self, stage: Stage) -> ActorCritic:
        match stage:
            case Stage.LARGE_AZIMUTH:
                return self.large
            case Stage.SMALL_AZIMUTH:
                return self.small
            case Stage.SHORT_DISTANCE:
                return self.short


def act(bundle: StrategyBundle, stage: Stage, obs: Observation) -> ControlAction:
    return deterministic_action(bundle.network(stage), obs)


@dataclass
class MultiStageStrategy:
    bundle: StrategyBundle
    name: str = "multi-stage"
    stage: Stage | None = None
    stage_history: list[Stage] = field(default_factory=list)

    def reset(self) -> None:
        self.stage = None
        self.stage_history.clear()

    def decide(self, obs: Observation, rel: RelativeGeometry, aircraft: AircraftState) -> Decision:
        stage = select_stage(self.stage, rel.range, rel.azimuth, self.bundle.thresholds)
        if stage is not self.stage:
            logger.debug(f"Stage {self.stage} -> {stage} at range {rel.range:.0f} m")
            self.stage_history.append(stage)
        self.stage = stage
        return Decision(act(self.bundle, stage, obs), str(stage))


@dataclass
class ScriptedSteepTurn:
    """Bank-angle controller holding a steep turn toward the missile's side."""

    name: str = "scripted-turn"
    target_roll_deg: float = 85.0
    roll_gain: float = 2.0
    pitch_gain: float = 3.0

    def reset(self) -> None:
        pass

    def decide(self, obs: Observation, rel: RelativeGeometry, aircraft: AircraftState) -> Decision:
        target = turn_sign(rel.side_sign) * math.radians(self.target_roll_deg)
        aileron = float(np.clip(self.roll_gain * wrap_pi(target - aircraft.roll), -1.0, 1.0))
        elevator = float(np.clip(-self.pitch_gain * aircraft.pitch, -1.0, 1.0))
        return Decision(ControlAction(elevator=elevator, aileron=aileron, throttle=1.0), self.name)


@dataclass
class NoOpStrategy:
    """Neutral controls: wings level, no thrust."""

    name: str = "no-op"

    def reset(self) -> None:
        pass

    def decide(self, obs: Observation, rel: RelativeGeometry, aircraft: AircraftState) -> Decision:
        return Decision(ControlAction(), self.name)


class BundleManifest(BaseModel):
    """Checkpoint paths of a strategy bundle; relative paths resolve against the manifest."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    large: Path
    small: Path
    short: Path
    steep_turn: Path | None = None
    baseline: Path | None = None
    thresholds: SwitchThresholds = DEFAULT_THRESHOLDS

    def resolved(self, base: Path) -> "BundleManifest":
        update = {
            name: base / path
            for name in ("large", "small", "short", "steep_turn", "baseline")
            if (path := getattr(self, name)) is not None and not path.is_absolute()
        }
        return self.model_copy(update=update)

    def dump(self, path: Path) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(yaml.safe_dump(self.model_dump(mode="json"), sort_keys=False))


def load_manifest(path: Path) -> BundleManifest:
    if not path.is_file():
        raise CheckpointError(f"bundle manifest not found: {path}")
    try:
        data = yaml.safe_load(path.read_text())
        return BundleManifest.model_validate(data).resolved(path.parent)
    except (yaml.YAMLError, ValidationError) as e:
        raise CheckpointError(f"malformed bundle manifest {path}: {e}") from e


def load_bundle(manifest: BundleManifest) -> StrategyBundle:
    return StrategyBundle(
        large=load_checkpoint(manifest.large)[0],
        small=load_checkpoint(manifest.small)[0],
        short=load_checkpoint(manifest.short)[0],
        thresholds=manifest.thresholds,
    )


def load_policy_strategy(path: Path | None, name: str) -> PolicyStrategy:
    if path is None:
        raise CheckpointError(f"no checkpoint configured for the {name} strategy")
    net, doc = load_checkpoint(path)
    logger.info(f"Loaded {name} strategy from {path} (task {doc.task}, seed {doc.seed})")
    return PolicyStrategy(name=name, net=net)


def steep_turn_strategy(path: Path | None) -> PolicyStrategy:
    return load_policy_strategy(path, "steep-turn")


def baseline_rl_strategy(path: Path | None) -> PolicyStrategy:
    return load_policy_strategy(path, "baseline")
