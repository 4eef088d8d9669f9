"""Command-line entry point: train policies, assemble bundles, evaluate, replay and study.

Exit codes: 0 on success, 1 for configuration or checkpoint problems, 2 when a
run aborts for any other package error.
"""

import argparse
import json
import logging
import sys
from collections.abc import Callable, Sequence
from pathlib import Path
from typing import Any

from src.config import Settings, load_settings
from src.data.records import write_csv, write_trajectory_csv
from src.errors import CheckpointError, ConfigError, EvasionError
from src.harness import studies
from src.harness.episode import run_episode
from src.harness.scenarios import ScenarioSpec, scenario_seed, seeded_scenario
from src.harness.sweep import SweepGrid, success_ratio_sweep, write_sweep
from src.harness.tasks import Task, evaluation_rules, task_spec
from src.models.checkpoint import load_checkpoint, save_checkpoint
from src.models.strategy import (
    BundleManifest,
    MultiStageStrategy,
    NoOpStrategy,
    ScriptedSteepTurn,
    Strategy,
    baseline_rl_strategy,
    load_bundle,
    load_manifest,
    load_policy_strategy,
    steep_turn_strategy,
)
from src.models.trainer import train_task
from src.utils.logging import configure_logging

logger = logging.getLogger(__name__)

STRATEGY_CHOICES = ("multi-stage", "steep-turn", "baseline", "policy", "scripted-turn", "no-op")
STUDY_CHOICES = ("roll-at-range", "roll-condition", "nav-law", "validation")

Command = Callable[[argparse.Namespace, Settings], int]


def _overrides(args: argparse.Namespace) -> dict[str, Any]:
    """Flag values as a nested settings mapping; unset flags are left out."""
    out: dict[str, Any] = {}

    def put(section: str, key: str, value: object) -> None:
        if value is not None:
            out.setdefault(section, {})[key] = value

    seed = getattr(args, "seed", None)
    put("train", "seed", seed)
    put("sweep", "master_seed", seed)
    put("train", "episodes", getattr(args, "episodes", None))
    put("sweep", "jobs", getattr(args, "jobs", None))
    put("sweep", "paired", getattr(args, "paired", None))
    put("sweep", "tests_per_cell", getattr(args, "tests_per_cell", None))
    put("scenario", "law", getattr(args, "law", None))
    put("sim", "action_repeat", getattr(args, "action_repeat", None))
    if args.out is not None:
        out["output_dir"] = str(args.out)
    if args.verbose:
        out["log_level"] = "DEBUG"
    elif args.log_level is not None:
        out["log_level"] = args.log_level
    return out


def _grid(args: argparse.Namespace, settings: Settings) -> SweepGrid:
    if args.grid == "full":
        return SweepGrid.full(tests_per_cell=settings.sweep.tests_per_cell)
    return SweepGrid.from_settings(settings.sweep)


def _strategies(args: argparse.Namespace) -> list[Strategy]:
    manifest = load_manifest(args.bundle) if args.bundle is not None else None
    names: list[str] = args.strategy or []
    if not names:
        if manifest is not None:
            names = ["multi-stage"]
            if manifest.steep_turn is not None:
                names.append("steep-turn")
            if manifest.baseline is not None:
                names.append("baseline")
        elif args.checkpoint is not None:
            names = ["policy"]
        else:
            raise ConfigError("give --bundle or --checkpoint (or pick --strategy scripted-turn)")

    strategies: list[Strategy] = []
    for name in names:
        match name:
            case "multi-stage":
                if manifest is None:
                    raise ConfigError("the multi-stage strategy needs --bundle")
                strategies.append(MultiStageStrategy(load_bundle(manifest)))
            case "steep-turn":
                path = manifest.steep_turn if manifest else args.checkpoint
                strategies.append(steep_turn_strategy(path))
            case "baseline":
                path = manifest.baseline if manifest else args.checkpoint
                strategies.append(baseline_rl_strategy(path))
            case "policy":
                strategies.append(load_policy_strategy(args.checkpoint, "policy"))
            case "scripted-turn":
                strategies.append(ScriptedSteepTurn())
            case "no-op":
                strategies.append(NoOpStrategy())
    return strategies


def _single_strategy(args: argparse.Namespace) -> Strategy:
    strategies = _strategies(args)
    if len(strategies) != 1:
        names = ", ".join(s.name for s in strategies)
        raise ConfigError(f"expected one strategy, got: {names}; pick one with --strategy")
    return strategies[0]


def cmd_train(args: argparse.Namespace, settings: Settings) -> int:
    task = Task(args.task)
    result = train_task(task, settings, warm_start=args.warm_start)
    out = settings.output_dir
    save_checkpoint(
        out / f"{task}.json",
        result.net,
        task=str(task),
        seed=settings.train.seed,
        config_hash=settings.fingerprint(),
        episodes=result.episodes,
    )
    write_csv(result.curve, out / "curve.csv")
    print(f"{task}: {result.episodes} episodes, {len(result.updates)} updates -> {out}")
    return 0


def cmd_eval(args: argparse.Namespace, settings: Settings) -> int:
    result = success_ratio_sweep(
        _grid(args, settings),
        _strategies(args),
        settings,
        paired=settings.sweep.paired,
        master_seed=settings.sweep.master_seed,
        jobs=settings.sweep.jobs,
    )
    write_sweep(result, settings.output_dir, settings)
    for name, stats in result.summary["strategies"].items():
        print(f"{name}: {stats['success_ratio']:.4f} over {stats['episodes']} episodes")
    if settings.sweep.paired and not result.summary["paired_verified"]:
        raise EvasionError("paired sweep produced differing scenario sequences")
    return 0


def cmd_replay(args: argparse.Namespace, settings: Settings) -> int:
    if args.scenario:
        spec = ScenarioSpec.from_yaml(args.scenario[0])
    elif args.scenario_seed is not None:
        spec = seeded_scenario(args.scenario_seed, settings.scenario)
    else:
        raise ConfigError("replay needs --scenario-seed or --scenario")
    strategy = _single_strategy(args)
    task = task_spec(Task(args.task), settings) if args.task else None
    record = run_episode(spec, strategy, settings, evaluation_rules(settings), task=task)
    out = settings.output_dir
    write_trajectory_csv(record, out / "trajectory.csv")
    (out / "scenario.json").write_text(spec.model_dump_json(indent=2) + "\n")
    (out / "record.json").write_text(json.dumps(record.summary(), indent=2, default=str) + "\n")
    print(
        f"{strategy.name}: {record.outcome} after {record.steps} steps, "
        f"min range {record.min_range:.2f} m"
    )
    return 0


def _validation_specs(args: argparse.Namespace, settings: Settings) -> list[ScenarioSpec]:
    if args.scenario:
        return [ScenarioSpec.from_yaml(p) for p in args.scenario]
    seed = settings.sweep.master_seed
    return [seeded_scenario(scenario_seed(seed, i), settings.scenario) for i in range(args.count)]


def cmd_study(args: argparse.Namespace, settings: Settings) -> int:
    strategy = _single_strategy(args)
    out = settings.output_dir
    seed, jobs = settings.sweep.master_seed, settings.sweep.jobs
    match args.kind:
        case "roll-at-range":
            frame = studies.roll_at_range_study(
                strategy, settings, _grid(args, settings), master_seed=seed, jobs=jobs
            )
            write_csv(frame, out / "roll_at_probe.csv")
            write_csv(studies.roll_histogram(frame), out / "roll_histogram.csv")
        case "roll-condition":
            frame = studies.roll_condition_study(
                strategy, settings, _grid(args, settings), master_seed=seed, jobs=jobs
            )
            write_csv(frame, out / "roll_condition.csv")
        case "nav-law":
            frame = studies.navigation_law_study(
                strategy, settings, _grid(args, settings), master_seed=seed, jobs=jobs
            )
            write_csv(frame, out / "nav_law.csv")
        case _:
            frame = studies.validation_study(strategy, settings, _validation_specs(args, settings))
            write_csv(frame, out / "validation.csv")
    print(frame.to_string(index=False))
    return 0


def cmd_bundle(args: argparse.Namespace, settings: Settings) -> int:
    paths = {
        "large": args.large,
        "small": args.small,
        "short": args.short,
        "steep_turn": args.steep_turn,
        "baseline": args.baseline,
    }
    for name, path in paths.items():
        if path is not None:
            _, doc = load_checkpoint(path)
            logger.info(f"{name}: {path} (task {doc.task}, {doc.episodes} episodes)")
    manifest = BundleManifest(
        **{name: path.resolve() for name, path in paths.items() if path is not None}
    )
    target = settings.output_dir / "bundle.yaml"
    manifest.dump(target)
    print(f"bundle manifest -> {target}")
    return 0


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=None, help="YAML settings file")
    common.add_argument("--out", type=Path, default=None, help="output directory")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR"], default=None)
    common.add_argument("--verbose", "-v", action="store_true", help="shorthand for DEBUG logging")
    return common


def _add_strategy_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--bundle", type=Path, default=None, help="bundle manifest YAML")
    p.add_argument("--checkpoint", type=Path, default=None, help="single policy checkpoint")
    p.add_argument(
        "--strategy",
        action="append",
        choices=STRATEGY_CHOICES,
        default=None,
        help="strategy to fly (repeatable); defaults follow --bundle / --checkpoint",
    )
    p.add_argument("--law", choices=["pn", "apn"], default=None, help="force the guidance law")


def _add_sweep_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--grid", choices=["desk", "full"], default="desk")
    p.add_argument("--tests-per-cell", type=int, default=None)
    p.add_argument("--jobs", type=int, default=None, help="worker processes")


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(prog="evasion", description="Missile-evasion workbench")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", parents=[common], help="train one policy")
    p.add_argument("task", choices=[t.value for t in Task])
    p.add_argument("--episodes", type=int, default=None)
    p.add_argument("--warm-start", type=Path, default=None, help="checkpoint to start from")
    p.add_argument("--action-repeat", type=int, default=None)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", parents=[common], help="success-ratio sweep")
    _add_strategy_flags(p)
    _add_sweep_flags(p)
    p.add_argument("--paired", action=argparse.BooleanOptionalAction, default=None)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("replay", parents=[common], help="record one episode")
    _add_strategy_flags(p)
    p.add_argument("--scenario-seed", type=int, default=None)
    p.add_argument("--scenario", type=Path, action="append", default=None, help="scenario YAML")
    p.add_argument(
        "--task",
        choices=[t.value for t in Task],
        default=None,
        help="also log this task's reward terms",
    )
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("study", parents=[common], help="diagnostic studies")
    p.add_argument("kind", choices=STUDY_CHOICES)
    _add_strategy_flags(p)
    _add_sweep_flags(p)
    p.add_argument(
        "--scenario",
        type=Path,
        action="append",
        default=None,
        help="scenario YAML for the validation study (repeatable)",
    )
    p.add_argument("--count", type=int, default=20, help="seeded validation scenarios")
    p.set_defaults(func=cmd_study)

    p = sub.add_parser("bundle", parents=[common], help="write a bundle manifest")
    p.add_argument("--large", type=Path, required=True)
    p.add_argument("--small", type=Path, required=True)
    p.add_argument("--short", type=Path, required=True)
    p.add_argument("--steep-turn", type=Path, default=None)
    p.add_argument("--baseline", type=Path, default=None)
    p.set_defaults(func=cmd_bundle)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging("DEBUG" if args.verbose else (args.log_level or "INFO"))
    command: Command = args.func
    try:
        settings = load_settings(args.config, _overrides(args))
        configure_logging(settings.log_level)
        settings.dump_yaml(settings.output_dir / "config.yaml")
        return command(args, settings)
    except (ConfigError, CheckpointError) as e:
        logger.error(f"{args.command}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return 1
    except EvasionError as e:
        logger.error(f"{args.command} aborted: {e}")
        print(f"aborted: {e}", file=sys.stderr)
        return 2
    except Exception as e:
        logger.exception(f"{args.command} failed")
        print(f"aborted: {type(e).__name__}: {e}", file=sys.stderr)
        return 2


def run() -> None:
    sys.exit(main())
