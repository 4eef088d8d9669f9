"""Per-step reward evaluators for the evasion tasks.

Every evaluator is a pure function of the aircraft state and the relative
geometry and returns a ``RewardBreakdown`` so the per-term values can be
logged next to the total. Angles are in radians throughout.
"""

import math
from dataclasses import dataclass, field

from src.config import RewardSettings
from src.sim.aircraft import AircraftState
from src.sim.geometry import RelativeGeometry, turn_sign

TERM_NAMES: tuple[str, ...] = (
    "roll",
    "pitch",
    "azimuth",
    "velocity",
    "los",
    "constraint_roll",
    "constraint_pitch",
    "constraint_azimuth",
    "constraint_velocity",
    "distance_terminal",
    "overload",
)

DEFAULT_REWARDS = RewardSettings()


@dataclass(frozen=True)
class RewardBreakdown:
    terms: dict[str, float] = field(default_factory=dict)

    @property
    def total(self) -> float:
        return math.fsum(self.terms.values())

    def merged(self, other: "RewardBreakdown") -> "RewardBreakdown":
        combined = dict(self.terms)
        for name, value in other.terms.items():
            combined[name] = combined.get(name, 0.0) + value
        return RewardBreakdown(combined)

    def as_row(self) -> dict[str, float]:
        """Fixed-column view with absent terms reported as 0."""
        return {name: self.terms.get(name, 0.0) for name in TERM_NAMES}


def _decay(error: float, tau: float) -> float:
    return math.exp(-abs(error) / tau)


def _penalty(violated: bool, settings: RewardSettings) -> float:
    return settings.penalty if violated else 0.0


def _bank_toward_missile(state: AircraftState, rel: RelativeGeometry, cfg: RewardSettings) -> float:
    target = turn_sign(rel.side_sign) * cfg.target_roll_rad
    return cfg.roll_weight * _decay(state.roll - target, cfg.tau)


def _level_pitch(state: AircraftState, cfg: RewardSettings) -> float:
    return cfg.pitch_weight * _decay(state.pitch, cfg.tau)


def _speed_out_of_band(speed: float, cfg: RewardSettings) -> bool:
    return speed < cfg.speed_min or speed > cfg.speed_max


def reward_steep_turn(
    state: AircraftState, rel: RelativeGeometry, cfg: RewardSettings = DEFAULT_REWARDS
) -> RewardBreakdown:
    """Hold a steep bank toward the missile's side with a level flight path."""
    return RewardBreakdown(
        {"roll": _bank_toward_missile(state, rel, cfg), "pitch": _level_pitch(state, cfg)}
    )


def reward_short_distance(
    state: AircraftState,
    rel: RelativeGeometry,
    smoothed_los_rate: float,
    cfg: RewardSettings = DEFAULT_REWARDS,
) -> RewardBreakdown:
    steep = reward_steep_turn(state, rel, cfg)
    los = cfg.los_weight * math.tanh(turn_sign(rel.side_sign) * smoothed_los_rate / cfg.los_scale)
    return RewardBreakdown({**steep.terms, "los": los})


def reward_small_azimuth(
    state: AircraftState, rel: RelativeGeometry, cfg: RewardSettings = DEFAULT_REWARDS
) -> RewardBreakdown:
    """Keep the missile behind the tail while flying fast and level."""
    return RewardBreakdown(
        {
            "roll": cfg.roll_weight * _decay(state.roll, cfg.tau),
            "pitch": _level_pitch(state, cfg),
            "azimuth": cfg.azimuth_weight * _decay(rel.azimuth, cfg.tau),
            "velocity": cfg.small_velocity_weight
            * math.tanh((state.speed - cfg.reference_speed) / cfg.small_velocity_scale),
            "constraint_roll": _penalty(abs(state.roll) > cfg.roll_limit_rad, cfg),
            "constraint_pitch": _penalty(abs(state.pitch) > cfg.pitch_limit_rad, cfg),
            "constraint_azimuth": _penalty(abs(rel.azimuth) > cfg.azimuth_limit_rad, cfg),
            "constraint_velocity": _penalty(_speed_out_of_band(state.speed, cfg), cfg),
        }
    )


def reward_large_azimuth(
    state: AircraftState, rel: RelativeGeometry, cfg: RewardSettings = DEFAULT_REWARDS
) -> RewardBreakdown:
    """Turn the tail onto the missile while far out, then stay near wings-level."""
    if rel.range > cfg.large_switch_range:
        roll = _bank_toward_missile(state, rel, cfg)
    elif abs(state.roll) > cfg.close_roll_limit_rad:
        roll = cfg.penalty
    else:
        roll = cfg.close_roll_reward
    return RewardBreakdown(
        {
            "roll": roll,
            "pitch": _level_pitch(state, cfg),
            "velocity": cfg.large_velocity_weight
            * math.tanh((state.speed - cfg.reference_speed) / cfg.large_velocity_scale),
            "constraint_roll": _penalty(abs(state.roll) > cfg.roll_limit_rad, cfg),
            "constraint_pitch": _penalty(abs(state.pitch) > cfg.pitch_limit_rad, cfg),
            "constraint_velocity": _penalty(_speed_out_of_band(state.speed, cfg), cfg),
        }
    )


def reward_baseline_step(
    state: AircraftState,
    rel: RelativeGeometry,
    missile_overload: float,
    cfg: RewardSettings = DEFAULT_REWARDS,
) -> RewardBreakdown:
    los_rate = max(abs(rel.los_rate), cfg.baseline_los_floor)
    return RewardBreakdown(
        {
            "los": cfg.baseline_los_gain * math.log(los_rate),
            "overload": cfg.baseline_overload_gain * missile_overload**2,
            "pitch": _level_pitch(state, cfg),
            "constraint_roll": _penalty(abs(state.roll) > cfg.roll_limit_rad, cfg),
        }
    )


def reward_baseline_terminal(
    hit: bool, min_range: float, cfg: RewardSettings = DEFAULT_REWARDS
) -> RewardBreakdown:
    """Once-per-episode distance reward using the smallest range seen."""
    margin = min_range - cfg.lethal_radius
    if hit:
        value = cfg.baseline_hit_gain * margin**2
    else:
        value = cfg.baseline_miss_gain * margin + cfg.baseline_miss_bonus
    return RewardBreakdown({"distance_terminal": value})
