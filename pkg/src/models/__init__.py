"""Actor-critic networks, PPO training, checkpoints and evasion strategies."""
