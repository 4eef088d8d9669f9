"""Gymnasium wrapper around an engagement for policy training."""

import logging
from typing import Any

import gymnasium as gym
import numpy as np
from gymnasium import spaces

from src.config import Settings
from src.data.observation import OBS_DIM, Observation, encode_observation
from src.errors import SimulationError
from src.harness.episode import Engagement
from src.harness.scenarios import ScenarioSpec, sample_scenario
from src.harness.tasks import TaskSpec
from src.models.networks import ACT_DIM, to_control

logger = logging.getLogger(__name__)


class EvasionEnv(gym.Env):
    """One training task as a Gymnasium environment.

    Actions are four values in ``[-1, 1]`` (elevator, aileron, rudder,
    throttle); the throttle is mapped onto ``[0, 1]``. Each call to ``step``
    holds the action for ``sim.action_repeat`` simulator steps and returns the
    summed reward. ``info["terms"]`` carries the per-term breakdown.
    """

    metadata = {"render_modes": []}  # noqa: RUF012

    def __init__(self, task: TaskSpec, settings: Settings) -> None:
        super().__init__()
        self.task = task
        self.settings = settings
        self.observation_space = spaces.Box(-1.0, 1.0, shape=(OBS_DIM,), dtype=np.float64)
        self.action_space = spaces.Box(-1.0, 1.0, shape=(ACT_DIM,), dtype=np.float64)
        self.engagement: Engagement | None = None

    def _observe(self) -> Observation:
        if self.engagement is None:
            raise SimulationError("environment has not been reset")
        return encode_observation(self.engagement.aircraft, self.engagement.missile)

    def reset(
        self, *, seed: int | None = None, options: dict[str, Any] | None = None
    ) -> tuple[Observation, dict[str, Any]]:
        super().reset(seed=seed)
        options = options or {}
        spec: ScenarioSpec = options.get("scenario") or sample_scenario(
            self.np_random, self.task.bounds, self.task.weights
        )
        self.engagement = Engagement(spec, self.settings, self.task.rules)
        return self._observe(), {"scenario": spec}

    def step(
        self, action: np.ndarray
    ) -> tuple[Observation, float, bool, bool, dict[str, Any]]:
        eng = self.engagement
        if eng is None or eng.done:
            raise SimulationError("step() called before reset() or after the episode ended")
        terms: dict[str, float] = {}
        reward = 0.0
        info: dict[str, Any] = {}
        try:
            control = to_control(np.clip(action, -1.0, 1.0))
            for _ in range(self.settings.sim.action_repeat):
                eng.advance(control)
                breakdown = eng.reward(self.task)
                reward += breakdown.total
                for name, value in breakdown.terms.items():
                    terms[name] = terms.get(name, 0.0) + value
                if eng.done:
                    break
        except SimulationError as e:
            eng.abort(str(e))
            info["aborted"] = str(e)
        info |= {
            "terms": terms,
            "outcome": str(eng.outcome) if eng.outcome is not None else None,
            "end_reason": eng.end_reason,
            "range": eng.rel.range,
            "min_range": eng.min_range,
            "steps": eng.steps,
        }
        truncated = eng.truncated
        terminated = eng.done and not truncated
        return self._observe(), reward, terminated, truncated, info
