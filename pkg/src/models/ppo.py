"""Generalised advantage estimation and the clipped-surrogate PPO update."""

import copy
import logging
from dataclasses import asdict, dataclass

import numpy as np
import numpy.typing as npt
import torch
from torch import nn

from src.config import TrainConfig
from src.errors import TrainingDivergedError
from src.models.networks import DTYPE, ActorCritic, squashed_log_prob

logger = logging.getLogger(__name__)

FloatArray = npt.NDArray[np.float64]


def compute_gae(
    rewards: list[float] | FloatArray,
    values: list[float] | FloatArray,
    terminal: bool,
    gamma: float,
    lam: float,
) -> tuple[FloatArray, FloatArray]:
    """Advantages and returns for one trajectory segment.

    ``values`` has one entry per reward, plus the bootstrap value ``V(s_T)``
    appended when the segment did not end in a terminal state. Advantages are
    returned raw; batch normalisation happens in ``ppo_update``.
    """
    rewards = np.asarray(rewards, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    n = len(rewards)
    expected = n if terminal else n + 1
    if len(values) != expected:
        raise ValueError(
            f"expected {expected} values for {n} rewards (terminal={terminal}), got {len(values)}"
        )
    next_values = np.zeros(n)
    next_values[:-1] = values[1:n]
    if not terminal:
        next_values[-1] = values[n]

    advantages = np.zeros(n)
    running = 0.0
    for t in reversed(range(n)):
        delta = rewards[t] + gamma * next_values[t] - values[t]
        running = delta + gamma * lam * running
        advantages[t] = running
    return advantages, advantages + values[:n]


@dataclass(frozen=True)
class RolloutBatch:
    observations: FloatArray
    raw_actions: FloatArray
    log_probs: FloatArray
    advantages: FloatArray
    returns: FloatArray

    def __len__(self) -> int:
        return len(self.log_probs)

    def tensors(self) -> dict[str, torch.Tensor]:
        return {k: torch.as_tensor(v, dtype=DTYPE) for k, v in asdict(self).items()}


@dataclass(frozen=True)
class LossTerms:
    total: torch.Tensor
    policy_loss: float
    value_loss: float
    entropy: float
    approx_kl: float
    clip_fraction: float


@dataclass(frozen=True)
class UpdateStats:
    policy_loss: float
    value_loss: float
    entropy: float
    approx_kl: float
    clip_fraction: float
    grad_norm: float
    minibatches: int


def normalize_advantages(advantages: torch.Tensor) -> torch.Tensor:
    if advantages.numel() < 2:
        return advantages
    std = advantages.std()
    if not torch.isfinite(std) or std == 0:
        return advantages - advantages.mean()
    return (advantages - advantages.mean()) / (std + 1e-8)


def ppo_loss(
    net: ActorCritic, mb: dict[str, torch.Tensor], config: TrainConfig
) -> LossTerms:
    """Clipped surrogate plus weighted value MSE on one minibatch."""
    dist, values = net.distribution(mb["observations"])
    log_probs = squashed_log_prob(dist, mb["raw_actions"])
    log_ratio = log_probs - mb["log_probs"]
    ratio = log_ratio.exp()
    adv = mb["advantages"]
    unclipped = ratio * adv
    clipped = ratio.clamp(1.0 - config.clip_eps, 1.0 + config.clip_eps) * adv
    policy_loss = -torch.min(unclipped, clipped).mean()
    value_loss = ((values - mb["returns"]) ** 2).mean()
    entropy = dist.entropy().sum(-1).mean()
    total = policy_loss + config.value_coef * value_loss - config.entropy_coef * entropy
    with torch.no_grad():
        approx_kl = float(((ratio - 1.0) - log_ratio).mean())
        clip_fraction = float(((ratio - 1.0).abs() > config.clip_eps).double().mean())
    return LossTerms(
        total=total,
        policy_loss=float(policy_loss),
        value_loss=float(value_loss),
        entropy=float(entropy),
        approx_kl=approx_kl,
        clip_fraction=clip_fraction,
    )


def make_optimizer(net: ActorCritic, config: TrainConfig) -> torch.optim.Adam:
    return torch.optim.Adam(net.parameters(), lr=config.learning_rate)


def ppo_update(
    net: ActorCritic,
    optimizer: torch.optim.Optimizer,
    batch: RolloutBatch,
    config: TrainConfig,
    generator: torch.Generator,
) -> UpdateStats:
    """Run ``config.epochs`` passes of shuffled minibatch updates over ``batch``.

    A non-finite loss restores the parameters and optimizer state from before
    the update and raises ``TrainingDivergedError``.
    """
    data = batch.tensors()
    data["advantages"] = normalize_advantages(data["advantages"])
    n = len(batch)
    mb_size = min(config.minibatch_size, n)

    net_snapshot = copy.deepcopy(net.state_dict())
    opt_snapshot = copy.deepcopy(optimizer.state_dict())
    sums = {"policy_loss": 0.0, "value_loss": 0.0, "entropy": 0.0, "approx_kl": 0.0}
    sums |= {"clip_fraction": 0.0, "grad_norm": 0.0}
    count = 0
    for epoch in range(config.epochs):
        order = torch.randperm(n, generator=generator)
        for start in range(0, n, mb_size):
            idx = order[start : start + mb_size]
            terms = ppo_loss(net, {k: v[idx] for k, v in data.items()}, config)
            if not torch.isfinite(terms.total):
                net.load_state_dict(net_snapshot)
                optimizer.load_state_dict(opt_snapshot)
                raise TrainingDivergedError(
                    "non-finite PPO loss",
                    {"epoch": epoch, "minibatch_start": start, **_terms_dict(terms)},
                )
            optimizer.zero_grad()
            terms.total.backward()
            grad_norm = float(nn.utils.clip_grad_norm_(net.parameters(), config.max_grad_norm))
            optimizer.step()
            for key, value in _terms_dict(terms).items():
                sums[key] += value
            sums["grad_norm"] += grad_norm
            count += 1

    stats = UpdateStats(**{k: v / count for k, v in sums.items()}, minibatches=count)
    logger.info(
        f"PPO update: policy_loss={stats.policy_loss:.4g} value_loss={stats.value_loss:.4g} "
        f"kl={stats.approx_kl:.3g} clip_frac={stats.clip_fraction:.3f}"
    )
    return stats


def _terms_dict(terms: LossTerms) -> dict[str, float]:
    return {
        "policy_loss": terms.policy_loss,
        "value_loss": terms.value_loss,
        "entropy": terms.entropy,
        "approx_kl": terms.approx_kl,
        "clip_fraction": terms.clip_fraction,
    }
