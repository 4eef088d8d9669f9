"""Observation encoding and episode records."""
