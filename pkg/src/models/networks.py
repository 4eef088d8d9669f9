"""Actor-critic network with a tanh-squashed Gaussian policy head.

Everything runs in float64 on the CPU: checkpoints then round-trip exactly and
finite-difference checks against autograd are meaningful.
"""

import math

import numpy as np
import torch
from torch import nn
from torch.distributions import Normal
from torch.nn import functional as F  # noqa: N812

from src.data.observation import OBS_DIM, Observation
from src.sim.aircraft import ControlAction

ACT_DIM = 4
THROTTLE = 3
DTYPE = torch.float64


def _mlp(sizes: list[int], *, squash_output: bool) -> nn.Sequential:
    layers: list[nn.Module] = []
    for i, (fan_in, fan_out) in enumerate(zip(sizes[:-1], sizes[1:], strict=True)):
        layers.append(nn.Linear(fan_in, fan_out, dtype=DTYPE))
        if i < len(sizes) - 2 or squash_output:
            layers.append(nn.Tanh())
    return nn.Sequential(*layers)


class ActorCritic(nn.Module):
    """Separate actor and critic MLPs plus a state-independent log-std.

    The actor's last linear layer produces the pre-squash mean; ``tanh`` of it is
    the deterministic action.
    """

    def __init__(
        self,
        obs_dim: int = OBS_DIM,
        act_dim: int = ACT_DIM,
        hidden_sizes: tuple[int, ...] = (256, 256),
        log_std_init: float = -0.5,
    ) -> None:
        super().__init__()
        self.obs_dim = obs_dim
        self.act_dim = act_dim
        self.hidden_sizes = tuple(hidden_sizes)
        self.actor = _mlp([obs_dim, *hidden_sizes, act_dim], squash_output=False)
        self.critic = _mlp([obs_dim, *hidden_sizes, 1], squash_output=False)
        self.log_std = nn.Parameter(torch.full((act_dim,), log_std_init, dtype=DTYPE))

    def forward(self, obs: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor]:
        """Pre-squash mean and state value."""
        return self.actor(obs), self.critic(obs).squeeze(-1)

    def distribution(self, obs: torch.Tensor) -> tuple[Normal, torch.Tensor]:
        pre_mean, value = self(obs)
        return Normal(pre_mean, self.log_std.exp().expand_as(pre_mean)), value


def build_actor_critic(
    seed: int,
    hidden_sizes: tuple[int, ...] = (256, 256),
    log_std_init: float = -0.5,
    obs_dim: int = OBS_DIM,
    act_dim: int = ACT_DIM,
) -> ActorCritic:
    """Initialise from ``seed`` without disturbing the global torch RNG."""
    with torch.random.fork_rng():
        torch.manual_seed(seed)
        return ActorCritic(obs_dim, act_dim, hidden_sizes, log_std_init)


def squashed_log_prob(dist: Normal, raw: torch.Tensor) -> torch.Tensor:
    """Log-density of ``tanh(raw)`` with the change-of-variables correction."""
    # log(1 - tanh(x)^2) written in a form that stays finite for large |x|
    correction = 2.0 * (math.log(2.0) - raw - F.softplus(-2.0 * raw))
    return (dist.log_prob(raw) - correction).sum(-1)


def to_control(squashed: np.ndarray) -> ControlAction:
    """Map a ``[-1, 1]^4`` vector onto controls; throttle goes to ``[0, 1]``."""
    values = np.asarray(squashed, dtype=np.float64).copy()
    values[THROTTLE] = 0.5 * (values[THROTTLE] + 1.0)
    return ControlAction.from_array(values)


def _as_tensor(obs: Observation) -> torch.Tensor:
    return torch.as_tensor(np.asarray(obs), dtype=DTYPE)


@torch.no_grad()
def policy_forward(net: ActorCritic, obs: Observation) -> tuple[np.ndarray, float]:
    """Deterministic action mean (throttle remapped to ``[0, 1]``) and value."""
    pre_mean, value = net(_as_tensor(obs))
    mean = torch.tanh(pre_mean).numpy().copy()
    mean[THROTTLE] = 0.5 * (mean[THROTTLE] + 1.0)
    return mean, float(value)


@torch.no_grad()
def sample_action(
    net: ActorCritic, obs: Observation, generator: torch.Generator
) -> tuple[ControlAction, float, np.ndarray, float]:
    """Draw one action.

    Returns the control, its log-probability, the pre-squash sample (kept in the
    rollout so PPO never has to invert tanh) and the critic's value.
    """
    dist, value = net.distribution(_as_tensor(obs))
    noise = torch.randn(dist.mean.shape, generator=generator, dtype=DTYPE)
    raw = dist.mean + dist.stddev * noise
    log_prob = float(squashed_log_prob(dist, raw))
    squashed = torch.tanh(raw).numpy()
    return to_control(squashed), log_prob, raw.numpy().copy(), float(value)


def deterministic_action(net: ActorCritic, obs: Observation) -> ControlAction:
    mean, _ = policy_forward(net, obs)
    return ControlAction.from_array(mean)
