"""Interval-grid success-ratio sweeps over paired, seeded scenarios."""

import hashlib
import itertools
import json
import logging
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from src.config import Interval, ScenarioBounds, Settings, SweepSettings
from src.data.records import EpisodeOutcome, EpisodeRecord, write_csv
from src.errors import ConfigError
from src.harness.episode import run_episode
from src.harness.scenarios import ScenarioSpec, scenario_seed, seeded_scenario
from src.harness.tasks import TerminationRules, evaluation_rules
from src.models.strategy import Strategy
from src.utils.logging import configure_logging

logger = logging.getLogger(__name__)

BEYOND_RANGE = 8000.0


def _stepped(lo: float, hi: float, step: float) -> tuple[float, ...]:
    edges = list(np.arange(lo, hi, step, dtype=np.float64))
    return (*(float(e) for e in edges), float(hi))


def _intervals(name: str, edges: Sequence[float]) -> list[Interval]:
    if len(edges) < 2 or any(b <= a for a, b in itertools.pairwise(edges)):
        raise ConfigError(f"{name}: edges must be at least two strictly increasing values")
    return list(itertools.pairwise(edges))


@dataclass(frozen=True)
class Cell:
    index: int
    aircraft_speed: Interval
    missile_speed: Interval
    range: Interval
    azimuth_deg: Interval

    def bounds(self, base: ScenarioBounds) -> ScenarioBounds:
        return base.model_copy(
            update={
                "aircraft_speed": self.aircraft_speed,
                "missile_speed": self.missile_speed,
                "range": self.range,
                "azimuth_deg": self.azimuth_deg,
            }
        )

    def coordinates(self) -> dict[str, float]:
        return {
            "aircraft_speed_lo": self.aircraft_speed[0],
            "aircraft_speed_hi": self.aircraft_speed[1],
            "missile_speed_lo": self.missile_speed[0],
            "missile_speed_hi": self.missile_speed[1],
            "range_lo": self.range[0],
            "range_hi": self.range[1],
            "azimuth_lo_deg": self.azimuth_deg[0],
            "azimuth_hi_deg": self.azimuth_deg[1],
        }


@dataclass(frozen=True)
class SweepGrid:
    aircraft_speed_edges: tuple[float, ...]
    missile_speed_edges: tuple[float, ...]
    range_edges: tuple[float, ...]
    azimuth_edges_deg: tuple[float, ...]
    tests_per_cell: int

    def __post_init__(self) -> None:
        if self.tests_per_cell < 1:
            raise ConfigError("tests_per_cell must be at least 1")

    @classmethod
    def from_settings(cls, sweep: SweepSettings) -> "SweepGrid":
        """Desk-scale grid from the configuration."""
        return cls(
            aircraft_speed_edges=sweep.aircraft_speed_edges,
            missile_speed_edges=sweep.missile_speed_edges,
            range_edges=sweep.range_edges,
            azimuth_edges_deg=sweep.azimuth_edges_deg,
            tests_per_cell=sweep.tests_per_cell,
        )

    @classmethod
    def full(cls, tests_per_cell: int = 20, max_range: float = 15000.0) -> "SweepGrid":
        """40 m/s, 100 m/s, 1 km and 30 deg steps over the whole envelope."""
        return cls(
            aircraft_speed_edges=_stepped(280.0, 470.0, 40.0),
            missile_speed_edges=_stepped(800.0, 1400.0, 100.0),
            range_edges=_stepped(5000.0, max_range, 1000.0),
            azimuth_edges_deg=_stepped(-180.0, 180.0, 30.0),
            tests_per_cell=tests_per_cell,
        )

    def cells(self) -> list[Cell]:
        product = itertools.product(
            _intervals("aircraft_speed", self.aircraft_speed_edges),
            _intervals("missile_speed", self.missile_speed_edges),
            _intervals("range", self.range_edges),
            _intervals("azimuth", self.azimuth_edges_deg),
        )
        return [Cell(i, *dims) for i, dims in enumerate(product)]


@dataclass(frozen=True)
class SweepResult:
    cells: pd.DataFrame
    episodes: pd.DataFrame
    summary: dict[str, Any]

    def ratio(self, strategy: str) -> float:
        return float(self.summary["strategies"][strategy]["success_ratio"])


# per-process state installed by the pool initializer
_worker: dict[str, Any] = {}


def _init_worker(
    strategies: dict[str, Strategy],
    settings: Settings,
    rules: TerminationRules,
    probe_range: float | None,
) -> None:
    configure_logging(settings.log_level)
    _install(strategies, settings, rules, probe_range)


def _install(
    strategies: dict[str, Strategy],
    settings: Settings,
    rules: TerminationRules,
    probe_range: float | None,
) -> None:
    _worker.update(strategies=strategies, settings=settings, rules=rules, probe_range=probe_range)


def _run_job(job: tuple[int, str, ScenarioSpec]) -> tuple[int, EpisodeRecord]:
    job_id, name, spec = job
    record = run_episode(
        spec,
        _worker["strategies"][name],
        _worker["settings"],
        _worker["rules"],
        record_rows=False,
        probe_range=_worker["probe_range"],
    )
    return job_id, record


def build_scenarios(
    grid: SweepGrid,
    bounds: ScenarioBounds,
    *,
    master_seed: int,
    strategy_index: int | None = None,
    overrides: dict[str, Any] | None = None,
) -> list[tuple[Cell, int, ScenarioSpec]]:
    """Scenario list of one strategy.

    Seeds depend only on the master seed, the cell and the repetition (plus the
    strategy when unpaired), never on execution order or worker assignment.
    """
    scenarios = []
    for cell in grid.cells():
        cell_bounds = cell.bounds(bounds)
        for rep in range(grid.tests_per_cell):
            extra = () if strategy_index is None else (strategy_index,)
            seed = scenario_seed(master_seed, cell.index, rep, *extra)
            spec = seeded_scenario(seed, cell_bounds)
            if overrides:
                spec = spec.model_copy(update=overrides)
            scenarios.append((cell, rep, spec))
    return scenarios


def _hash_sequence(specs: Sequence[ScenarioSpec]) -> str:
    digest = hashlib.sha256()
    for spec in specs:
        digest.update(spec.fingerprint().encode())
    return digest.hexdigest()


def _execute(
    jobs: list[tuple[int, str, ScenarioSpec]],
    strategies: dict[str, Strategy],
    settings: Settings,
    rules: TerminationRules,
    probe_range: float | None,
    n_jobs: int,
) -> list[EpisodeRecord]:
    results: dict[int, EpisodeRecord] = {}
    if n_jobs <= 1:
        _install(strategies, settings, rules, probe_range)
        for job in jobs:
            job_id, record = _run_job(job)
            results[job_id] = record
    else:
        init_args = (strategies, settings, rules, probe_range)
        with ProcessPoolExecutor(
            max_workers=n_jobs, initializer=_init_worker, initargs=init_args
        ) as ex:
            futures = [ex.submit(_run_job, job) for job in jobs]
            for done, future in enumerate(as_completed(futures), start=1):
                job_id, record = future.result()
                results[job_id] = record
                if done % 100 == 0:
                    logger.debug(f"{done}/{len(jobs)} episodes complete")
    return [results[i] for i in range(len(jobs))]


def _cell_rows(
    name: str, cells: list[Cell], entries: list[tuple[Cell, int, EpisodeRecord]]
) -> list[dict[str, Any]]:
    by_cell: dict[int, list[tuple[int, EpisodeRecord]]] = {c.index: [] for c in cells}
    for cell, rep, record in entries:
        by_cell[cell.index].append((rep, record))
    rows = []
    for cell in cells:
        records = [r for _, r in sorted(by_cell[cell.index], key=lambda x: x[0])]
        n = len(records)
        successes = sum(r.success for r in records)
        aborted = sum(r.outcome is EpisodeOutcome.ABORTED for r in records)
        overloads = np.array([r.max_missile_overload for r in records])
        rows.append(
            {
                "strategy": name,
                "cell": cell.index,
                **cell.coordinates(),
                "n": n,
                "successes": successes,
                "failures": n - successes - aborted,
                "aborted": aborted,
                "ratio": successes / n,
                "mean_max_overload": float(overloads.mean()),
                "max_max_overload": float(overloads.max()),
                "representative_overload": float(overloads[0]),
            }
        )
        logger.debug(f"{name} cell {cell.index}: {successes}/{n}")
    return rows


def _strategy_summary(frame: pd.DataFrame, episodes: pd.DataFrame) -> dict[str, float]:
    beyond = frame[frame["range_lo"] >= BEYOND_RANGE]
    beyond_n = int(beyond["n"].sum())
    return {
        "episodes": int(frame["n"].sum()),
        "success_ratio": float(frame["successes"].sum() / frame["n"].sum()),
        "beyond_8000_ratio": (
            float(beyond["successes"].sum() / beyond_n) if beyond_n else float("nan")
        ),
        "mean_max_overload": float(episodes["max_missile_overload"].mean()),
        "representative_overload_mean": float(frame["representative_overload"].mean()),
        "aborted": int(frame["aborted"].sum()),
    }


def success_ratio_sweep(
    grid: SweepGrid,
    strategies: Sequence[Strategy],
    settings: Settings,
    *,
    bounds: ScenarioBounds | None = None,
    paired: bool = True,
    master_seed: int = 0,
    jobs: int = 1,
    rules: TerminationRules | None = None,
    overrides: dict[str, Any] | None = None,
    probe_range: float | None = None,
) -> SweepResult:
    """Run every strategy on ``grid.tests_per_cell`` scenarios per cell.

    With ``paired`` every strategy faces the same scenario sequence, which the
    summary confirms by hash.
    """
    bounds = bounds or settings.scenario
    rules = rules or evaluation_rules(settings)
    named = {s.name: s for s in strategies}
    if len(named) != len(strategies):
        raise ConfigError("strategy names must be unique within a sweep")
    cells = grid.cells()

    plan: list[tuple[str, Cell, int, ScenarioSpec]] = []
    hashes: dict[str, str] = {}
    for i, name in enumerate(named):
        scenarios = build_scenarios(
            grid,
            bounds,
            master_seed=master_seed,
            strategy_index=None if paired else i,
            overrides=overrides,
        )
        hashes[name] = _hash_sequence([spec for _, _, spec in scenarios])
        plan.extend((name, cell, rep, spec) for cell, rep, spec in scenarios)

    logger.info(
        f"Sweep: {len(cells)} cells x {grid.tests_per_cell} tests x {len(named)} strategies "
        f"({len(plan)} episodes, jobs={jobs}, paired={paired})"
    )
    records = _execute(
        [(i, name, spec) for i, (name, _, _, spec) in enumerate(plan)],
        named,
        settings,
        rules,
        probe_range,
        jobs,
    )

    cell_rows: list[dict[str, Any]] = []
    episode_rows: list[dict[str, Any]] = []
    for name in named:
        entries = [
            (cell, rep, record)
            for (n, cell, rep, _), record in zip(plan, records, strict=True)
            if n == name
        ]
        cell_rows.extend(_cell_rows(name, cells, entries))
        episode_rows.extend(
            {"cell": cell.index, "rep": rep, **record.summary()} for cell, rep, record in entries
        )
        logger.info(f"Strategy {name} done")

    cell_frame = pd.DataFrame(cell_rows)
    episode_frame = pd.DataFrame(episode_rows)
    summary = {
        "strategies": {
            name: _strategy_summary(
                cell_frame[cell_frame["strategy"] == name],
                episode_frame[episode_frame["strategy"] == name],
            )
            for name in named
        },
        "scenario_hashes": hashes,
        "paired": paired,
        "paired_verified": paired and len(set(hashes.values())) == 1,
        "tests_per_cell": grid.tests_per_cell,
        "cells": len(cells),
        "master_seed": master_seed,
    }
    for name, stats in summary["strategies"].items():
        logger.info(f"{name}: success ratio {stats['success_ratio']:.4f}")
    return SweepResult(cells=cell_frame, episodes=episode_frame, summary=summary)


def write_sweep(result: SweepResult, out_dir: Path, settings: Settings) -> dict[str, Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {
        "cells": write_csv(result.cells, out_dir / "sweep.csv"),
        "episodes": write_csv(result.episodes, out_dir / "episodes.csv"),
        "summary": out_dir / "summary.json",
    }
    document = {**result.summary, "config": settings.model_dump(mode="json")}
    paths["summary"].write_text(json.dumps(document, indent=2, sort_keys=True) + "\n")
    return paths
