"""Kinematics of the aircraft and the guided missile, plus the reward evaluators."""
