"""Training tasks: which reward, which initial conditions and when an episode ends."""

from dataclasses import dataclass, field
from enum import StrEnum

from src.config import RewardSettings, ScenarioBounds, Settings
from src.harness.scenarios import (
    AIRCRAFT_SPEED_WEIGHTS,
    LARGE_AZIMUTH_WEIGHTS,
    RANGE_WEIGHTS,
    IntervalWeights,
)
from src.sim import rewards
from src.sim.aircraft import AircraftState
from src.sim.geometry import RelativeGeometry
from src.sim.rewards import RewardBreakdown


class Task(StrEnum):
    STEEP_TURN = "steep-turn"
    SHORT_DISTANCE = "short-distance"
    SMALL_AZIMUTH = "small-azimuth"
    LARGE_AZIMUTH = "large-azimuth"
    BASELINE = "baseline"


SHORT_RANGE: tuple[float, float] = (5000.0, 12000.0)
TRAINING_RANGE_FLOOR = 5000.0
LARGE_AZIMUTH_EXIT_DEG = 15.0


@dataclass(frozen=True)
class TerminationRules:
    """Episode end conditions besides a hit and the altitude floor."""

    max_steps: int
    apply_expiry: bool = True
    range_floor: float | None = None
    azimuth_exit_deg: float | None = None


@dataclass(frozen=True)
class RewardContext:
    aircraft: AircraftState
    rel: RelativeGeometry
    missile_overload: float


@dataclass(frozen=True)
class TaskSpec:
    task: Task
    bounds: ScenarioBounds
    rules: TerminationRules
    weights: dict[str, IntervalWeights] = field(default_factory=dict)
    terminal_reward: bool = False

    def step_reward(self, ctx: RewardContext, cfg: RewardSettings) -> RewardBreakdown:
        match self.task:
            case Task.STEEP_TURN:
                return rewards.reward_steep_turn(ctx.aircraft, ctx.rel, cfg)
            case Task.SHORT_DISTANCE:
                return rewards.reward_short_distance(
                    ctx.aircraft, ctx.rel, ctx.rel.smoothed_los_rate, cfg
                )
            case Task.SMALL_AZIMUTH:
                return rewards.reward_small_azimuth(ctx.aircraft, ctx.rel, cfg)
            case Task.LARGE_AZIMUTH:
                return rewards.reward_large_azimuth(ctx.aircraft, ctx.rel, cfg)
            case Task.BASELINE:
                return rewards.reward_baseline_step(
                    ctx.aircraft, ctx.rel, ctx.missile_overload, cfg
                )


def task_spec(task: Task, settings: Settings) -> TaskSpec:
    """Training setup for ``task``.

    Steep-turn and short-distance episodes start 5-12 km out and end on a hit or
    at the step cap. The azimuth tasks use the curriculum interval weights and
    stop once the missile closes inside 5 km; the large-azimuth task also stops
    once the tail is within 15 deg of the missile. Baseline episodes run until a
    hit or missile expiry so the terminal distance reward can be paid.
    """
    bounds = settings.scenario
    max_steps = settings.sim.train_max_steps
    match task:
        case Task.STEEP_TURN | Task.SHORT_DISTANCE:
            return TaskSpec(
                task=task,
                bounds=bounds.model_copy(update={"range": SHORT_RANGE}),
                rules=TerminationRules(max_steps=max_steps, apply_expiry=False),
            )
        case Task.SMALL_AZIMUTH:
            limit = settings.rewards.azimuth_limit_deg
            return TaskSpec(
                task=task,
                bounds=bounds.model_copy(update={"azimuth_deg": (-limit, limit)}),
                rules=TerminationRules(
                    max_steps=max_steps, apply_expiry=False, range_floor=TRAINING_RANGE_FLOOR
                ),
                weights={"aircraft_speed": AIRCRAFT_SPEED_WEIGHTS, "range": RANGE_WEIGHTS},
            )
        case Task.LARGE_AZIMUTH:
            return TaskSpec(
                task=task,
                bounds=bounds,
                rules=TerminationRules(
                    max_steps=max_steps,
                    apply_expiry=False,
                    range_floor=TRAINING_RANGE_FLOOR,
                    azimuth_exit_deg=LARGE_AZIMUTH_EXIT_DEG,
                ),
                weights={
                    "aircraft_speed": AIRCRAFT_SPEED_WEIGHTS,
                    "range": RANGE_WEIGHTS,
                    "azimuth_deg": LARGE_AZIMUTH_WEIGHTS,
                },
            )
        case Task.BASELINE:
            return TaskSpec(
                task=task,
                bounds=bounds,
                rules=TerminationRules(max_steps=max_steps, apply_expiry=True),
                terminal_reward=True,
            )


def evaluation_rules(settings: Settings) -> TerminationRules:
    """Test episodes: 25 s of missile flight survived counts as a success."""
    return TerminationRules(max_steps=settings.sim.test_max_steps, apply_expiry=True)
