"""Scenario generation, engagements, training environments, sweeps and studies."""
