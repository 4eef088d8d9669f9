"""Missile-evasion simulation and reinforcement-learning workbench."""

__version__ = "1.0.0"
