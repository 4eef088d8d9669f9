"""Episode-budget PPO training loop with curriculum warm starts."""

import copy
import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, field
from pathlib import Path

import gymnasium as gym
import numpy as np
import pandas as pd
import torch

from src.config import Settings, TrainConfig
from src.errors import ConfigError, TrainingDivergedError
from src.harness.env import EvasionEnv
from src.harness.tasks import Task, task_spec
from src.models.checkpoint import load_checkpoint
from src.models.networks import ActorCritic, build_actor_critic, policy_forward, sample_action
from src.models.ppo import RolloutBatch, UpdateStats, compute_gae, make_optimizer, ppo_update
from src.sim.rewards import TERM_NAMES

logger = logging.getLogger(__name__)

# tasks that may only start from a pretrained policy
WARM_START_REQUIRED = {Task.SHORT_DISTANCE: Task.STEEP_TURN}


@dataclass
class TrainResult:
    net: ActorCritic
    curve: pd.DataFrame
    updates: list[UpdateStats] = field(default_factory=list)

    @property
    def episodes(self) -> int:
        return len(self.curve)


@dataclass
class _Rollout:
    observations: list[np.ndarray] = field(default_factory=list)
    raw_actions: list[np.ndarray] = field(default_factory=list)
    log_probs: list[float] = field(default_factory=list)
    rewards: list[float] = field(default_factory=list)
    values: list[float] = field(default_factory=list)
    advantages: list[float] = field(default_factory=list)
    returns: list[float] = field(default_factory=list)
    segment_start: int = 0

    def __len__(self) -> int:
        return len(self.rewards)

    def close_segment(self, terminal: bool, bootstrap: float, gamma: float, lam: float) -> None:
        start = self.segment_start
        if start == len(self.rewards):
            return
        values = self.values[start:] if terminal else [*self.values[start:], bootstrap]
        adv, ret = compute_gae(self.rewards[start:], values, terminal, gamma, lam)
        self.advantages.extend(adv.tolist())
        self.returns.extend(ret.tolist())
        self.segment_start = len(self.rewards)

    def batch(self) -> RolloutBatch:
        return RolloutBatch(
            observations=np.asarray(self.observations),
            raw_actions=np.asarray(self.raw_actions),
            log_probs=np.asarray(self.log_probs),
            advantages=np.asarray(self.advantages),
            returns=np.asarray(self.returns),
        )


def train(
    env_factory: Callable[[], gym.Env],
    config: TrainConfig,
    *,
    init_net: ActorCritic | None = None,
    episodes: int | None = None,
) -> TrainResult:
    """Train until ``episodes`` (default ``config.episodes``) episodes have finished.

    Every ``config.batch_size`` transitions trigger a PPO update; an episode that
    is still running at that point is bootstrapped from the critic and carried
    over into the next batch. Seeds for the environment, the network init and
    the sampling generator all derive from ``config.seed``.
    """
    budget = episodes if episodes is not None else config.episodes
    env_seed, init_seed, torch_seed = np.random.SeedSequence(config.seed).generate_state(3)
    generator = torch.Generator().manual_seed(int(torch_seed))
    if init_net is not None:
        net = copy.deepcopy(init_net)
    else:
        net = build_actor_critic(int(init_seed), config.hidden_sizes, config.log_std_init)
    optimizer = make_optimizer(net, config)

    env = env_factory()
    obs, _ = env.reset(seed=int(env_seed))
    rollout = _Rollout()
    updates: list[UpdateStats] = []
    rows: list[dict[str, float | int | str]] = []
    ep_reward, ep_steps, ep_terms = 0.0, 0, dict.fromkeys(TERM_NAMES, 0.0)

    while len(rows) < budget:
        _, log_prob, raw, value = sample_action(net, obs, generator)
        next_obs, reward, terminated, truncated, info = env.step(np.tanh(raw))
        if not math.isfinite(reward):
            raise TrainingDivergedError(
                "non-finite reward", {"episode": len(rows), "step": ep_steps, **info}
            )
        rollout.observations.append(obs)
        rollout.raw_actions.append(raw)
        rollout.log_probs.append(log_prob)
        rollout.rewards.append(reward)
        rollout.values.append(value)
        ep_reward += reward
        ep_steps += 1
        for name, term in info.get("terms", {}).items():
            ep_terms[name] = ep_terms.get(name, 0.0) + term

        if terminated or truncated:
            bootstrap = policy_forward(net, next_obs)[1] if truncated else 0.0
            rollout.close_segment(not truncated, bootstrap, config.gamma, config.gae_lambda)
            rows.append(
                {
                    "episode": len(rows),
                    "steps": ep_steps,
                    "accumulated_reward": ep_reward,
                    "outcome": info.get("outcome") or "",
                    "end_reason": info.get("end_reason", ""),
                    **{f"mean_{k}": v / ep_steps for k, v in ep_terms.items()},
                }
            )
            if len(rows) % config.log_every == 0:
                recent = [r["accumulated_reward"] for r in rows[-config.log_every :]]
                logger.info(f"Episode {len(rows)}/{budget}: mean reward {np.mean(recent):.4g}")
            ep_reward, ep_steps, ep_terms = 0.0, 0, dict.fromkeys(TERM_NAMES, 0.0)
            obs, _ = env.reset()
        else:
            obs = next_obs

        if len(rollout) >= config.batch_size:
            rollout.close_segment(
                False, policy_forward(net, obs)[1], config.gamma, config.gae_lambda
            )
            updates.append(ppo_update(net, optimizer, rollout.batch(), config, generator))
            rollout = _Rollout()

    if len(rollout):
        updates.append(ppo_update(net, optimizer, rollout.batch(), config, generator))
    env.close()
    return TrainResult(net=net, curve=pd.DataFrame(rows), updates=updates)


def train_task(
    task: Task,
    settings: Settings,
    *,
    warm_start: Path | None = None,
    episodes: int | None = None,
) -> TrainResult:
    """Train ``task`` with the environment and reward the task table binds to it."""
    if task in WARM_START_REQUIRED and warm_start is None:
        raise ConfigError(
            f"{task} training starts from a trained {WARM_START_REQUIRED[task]} policy; "
            "pass its checkpoint with --warm-start"
        )
    init_net = None
    if warm_start is not None:
        init_net, doc = load_checkpoint(warm_start)
        logger.info(f"Warm start from {warm_start} (trained on {doc.task})")
    spec = task_spec(task, settings)
    return train(
        lambda: EvasionEnv(spec, settings),
        settings.train,
        init_net=init_net,
        episodes=episodes,
    )
