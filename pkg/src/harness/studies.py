"""Diagnostic studies built on the sweep machinery."""

import logging
import math
from collections.abc import Sequence
from dataclasses import asdict, replace

import numpy as np
import pandas as pd

from src.config import Settings
from src.data.records import validation_metrics
from src.harness.episode import run_episode
from src.harness.scenarios import ScenarioSpec
from src.harness.sweep import SweepGrid, success_ratio_sweep
from src.harness.tasks import evaluation_rules
from src.models.strategy import Strategy

logger = logging.getLogger(__name__)


def _fixed_range_grid(grid: SweepGrid, range_m: float) -> SweepGrid:
    # range is overridden per scenario; a single nominal cell keeps the other dims
    return replace(grid, range_edges=(range_m, range_m + 1.0))


def roll_at_range_study(
    strategy: Strategy,
    settings: Settings,
    grid: SweepGrid,
    *,
    start_range: float = 12000.0,
    probe_range: float = 8000.0,
    master_seed: int = 0,
    jobs: int = 1,
) -> pd.DataFrame:
    """Aircraft roll when the missile has closed from ``start_range`` to ``probe_range``.

    Episodes that end before reaching the probe range report NaN.
    """
    result = success_ratio_sweep(
        _fixed_range_grid(grid, start_range),
        [strategy],
        settings,
        master_seed=master_seed,
        jobs=jobs,
        overrides={"range": start_range},
        probe_range=probe_range,
    )
    frame = result.episodes[["cell", "rep", "outcome", "roll_at_probe"]].copy()
    frame["roll_at_probe_deg"] = np.degrees(frame["roll_at_probe"].astype(float))
    return frame


def roll_histogram(frame: pd.DataFrame, bin_width_deg: float = 15.0) -> pd.DataFrame:
    rolls = frame["roll_at_probe_deg"].dropna().to_numpy()
    edges = np.arange(-180.0, 180.0 + bin_width_deg, bin_width_deg)
    counts, _ = np.histogram(rolls, bins=edges)
    return pd.DataFrame({"lo_deg": edges[:-1], "hi_deg": edges[1:], "count": counts})


def roll_condition_study(
    strategy: Strategy,
    settings: Settings,
    grid: SweepGrid,
    *,
    rolls_deg: Sequence[float] = (-85.0, 0.0, 85.0),
    start_range: float = 8000.0,
    master_seed: int = 0,
    jobs: int = 1,
) -> pd.DataFrame:
    """Success ratio from ``start_range`` for each initial roll, on one shared scenario set."""
    rows = []
    for roll in rolls_deg:
        result = success_ratio_sweep(
            _fixed_range_grid(grid, start_range),
            [strategy],
            settings,
            master_seed=master_seed,
            jobs=jobs,
            overrides={"range": start_range, "roll": math.radians(roll)},
        )
        stats = result.summary["strategies"][strategy.name]
        rows.append({"roll_deg": roll, "n": stats["episodes"], "ratio": stats["success_ratio"]})
        logger.info(f"Initial roll {roll:+.0f} deg: success ratio {stats['success_ratio']:.4f}")
    return pd.DataFrame(rows)


def navigation_law_study(
    strategy: Strategy,
    settings: Settings,
    grid: SweepGrid,
    *,
    master_seed: int = 0,
    jobs: int = 1,
) -> pd.DataFrame:
    """Success ratio against PN and against APN on the same scenarios.

    The APN draw of N' comes after every other dimension, so both runs share
    all remaining initial conditions.
    """
    rows = []
    for law in ("pn", "apn"):
        result = success_ratio_sweep(
            grid,
            [strategy],
            settings,
            bounds=settings.scenario.model_copy(update={"law": law}),
            master_seed=master_seed,
            jobs=jobs,
        )
        stats = result.summary["strategies"][strategy.name]
        rows.append(
            {
                "law": law,
                "n": stats["episodes"],
                "ratio": stats["success_ratio"],
                "mean_max_overload": stats["mean_max_overload"],
            }
        )
    return pd.DataFrame(rows)


def validation_study(
    strategy: Strategy, settings: Settings, specs: Sequence[ScenarioSpec]
) -> pd.DataFrame:
    """Constraint and attitude metrics of ``strategy`` over explicit scenarios."""
    rows = []
    for spec in specs:
        record = run_episode(spec, strategy, settings, evaluation_rules(settings))
        metrics = validation_metrics(record, settings.rewards)
        rows.append(
            {
                "initial_azimuth_deg": math.degrees(spec.azimuth),
                "outcome": str(record.outcome),
                **asdict(metrics),
            }
        )
    return pd.DataFrame(rows)
