"""Exception hierarchy shared by the simulator, learner, harness and CLI."""

from typing import Any


class EvasionError(Exception):
    """Base class for every error raised by this package."""


class GeometryError(EvasionError):
    """Degenerate relative geometry (coincident positions, non-unit LOS vectors)."""


class SimulationError(EvasionError):
    """Non-finite values entered or left a simulation step."""


class ConfigError(EvasionError):
    """Invalid configuration, missing input path or refused command."""


class CheckpointError(EvasionError):
    """Checkpoint or bundle manifest could not be read or is malformed."""


class TrainingDivergedError(EvasionError):
    """Loss or reward became NaN during training."""

    def __init__(self, message: str, diagnostics: dict[str, Any] | None = None) -> None:
        super().__init__(message)
        self.diagnostics = diagnostics or {}
