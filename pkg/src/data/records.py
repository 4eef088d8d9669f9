"""Episode records, their CSV export and the per-episode validation metrics."""

import math
from dataclasses import asdict, dataclass, field, fields
from enum import StrEnum
from pathlib import Path

import numpy as np
import pandas as pd

from src.config import RewardSettings

FLOAT_FORMAT = "%.9g"
_NESTED = ("rows", "reward_sums")


class EpisodeOutcome(StrEnum):
    HIT = "hit"
    SURVIVED = "survived"
    GROUND_IMPACT = "ground_impact"
    ABORTED = "aborted"


@dataclass(frozen=True, slots=True)
class StepRow:
    t: float
    aircraft_x: float
    aircraft_y: float
    aircraft_z: float
    aircraft_speed: float
    roll: float
    pitch: float
    heading: float
    missile_x: float
    missile_y: float
    missile_z: float
    missile_speed: float
    missile_heading: float
    missile_pitch: float
    stage: str
    elevator: float
    aileron: float
    rudder: float
    throttle: float
    range: float
    azimuth: float
    los_rate: float
    aircraft_overload: float
    missile_overload: float
    reward: float
    reward_terms: dict[str, float] = field(default_factory=dict)

    def as_dict(self) -> dict[str, float | str]:
        row = asdict(self)
        terms = row.pop("reward_terms")
        return row | {f"r_{name}": value for name, value in terms.items()}


@dataclass
class EpisodeRecord:
    """Result of one episode; ``rows`` is empty when per-step recording was off."""

    scenario_hash: str
    strategy: str
    outcome: EpisodeOutcome
    end_reason: str
    steps: int
    min_range: float
    max_missile_overload: float
    final_range: float
    total_reward: float = 0.0
    initial_speed: float = 0.0
    final_speed: float = 0.0
    initial_azimuth: float = 0.0
    final_azimuth: float = 0.0
    final_roll: float = 0.0
    roll_at_probe: float | None = None
    diagnostic: str | None = None
    reward_sums: dict[str, float] = field(default_factory=dict)
    rows: list[StepRow] = field(default_factory=list)

    @property
    def success(self) -> bool:
        return self.outcome is EpisodeOutcome.SURVIVED

    def summary(self) -> dict[str, object]:
        """Flat scalar view for tabular exports."""
        data = {f.name: getattr(self, f.name) for f in fields(self) if f.name not in _NESTED}
        data["outcome"] = str(self.outcome)
        return data | {f"sum_{name}": value for name, value in self.reward_sums.items()}


def trajectory_frame(record: EpisodeRecord) -> pd.DataFrame:
    frame = pd.DataFrame([row.as_dict() for row in record.rows])
    if not frame.empty:
        frame["outcome"] = ""
        frame.loc[frame.index[-1], "outcome"] = str(record.outcome)
    return frame


def write_csv(frame: pd.DataFrame, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    return path


def write_trajectory_csv(record: EpisodeRecord, path: Path) -> Path:
    return write_csv(trajectory_frame(record), path)


@dataclass(frozen=True)
class ValidationMetrics:
    roll_out_of_bounds: int
    pitch_out_of_bounds: int
    azimuth_out_of_bounds: int
    speed_out_of_bounds: int
    final_roll_deg: float
    mean_pitch_deg: float
    velocity_increase_ratio: float
    azimuth_change_deg: float


def validation_metrics(record: EpisodeRecord, cfg: RewardSettings) -> ValidationMetrics:
    """Constraint-violation counts and attitude summaries over a recorded episode."""
    if not record.rows:
        raise ValueError("validation metrics need an episode recorded with per-step rows")
    roll = np.array([r.roll for r in record.rows])
    pitch = np.array([r.pitch for r in record.rows])
    azimuth = np.array([r.azimuth for r in record.rows])
    speed = np.array([r.aircraft_speed for r in record.rows])
    return ValidationMetrics(
        roll_out_of_bounds=int(np.count_nonzero(np.abs(roll) > cfg.roll_limit_rad)),
        pitch_out_of_bounds=int(np.count_nonzero(np.abs(pitch) > cfg.pitch_limit_rad)),
        azimuth_out_of_bounds=int(np.count_nonzero(np.abs(azimuth) > cfg.azimuth_limit_rad)),
        speed_out_of_bounds=int(
            np.count_nonzero((speed < cfg.speed_min) | (speed > cfg.speed_max))
        ),
        final_roll_deg=math.degrees(record.final_roll),
        mean_pitch_deg=math.degrees(float(pitch.mean())),
        velocity_increase_ratio=record.final_speed / record.initial_speed,
        azimuth_change_deg=math.degrees(abs(record.final_azimuth) - abs(record.initial_azimuth)),
    )
