import json

import pytest
import yaml

from src.cli import build_parser, main
from src.models.checkpoint import save_checkpoint
from src.models.networks import build_actor_critic

TINY = {
    "train": {
        "batch_size": 64,
        "minibatch_size": 32,
        "epochs": 2,
        "hidden_sizes": [8, 8],
        "episodes": 2,
        "log_every": 1,
    },
    "sim": {"train_max_steps": 30, "test_max_steps": 60},
    "sweep": {
        "aircraft_speed_edges": [280.0, 470.0],
        "missile_speed_edges": [800.0, 1400.0],
        "range_edges": [9000.0, 15000.0],
        "azimuth_edges_deg": [-180.0, 180.0],
        "tests_per_cell": 2,
    },
}


@pytest.fixture
def config(tmp_path):
    path = tmp_path / "tiny.yaml"
    path.write_text(yaml.safe_dump(TINY))
    return path


def _run(config, out, *args: str) -> int:
    command, *rest = args
    return main([command, "--config", str(config), "--out", str(out), *rest])


def test_train_writes_checkpoint_curve_and_config(config, tmp_path):
    out = tmp_path / "train"
    assert _run(config, out, "train", "steep-turn", "--seed", "1") == 0
    assert (out / "steep-turn.json").is_file()
    assert (out / "curve.csv").is_file()
    assert yaml.safe_load((out / "config.yaml").read_text())["train"]["seed"] == 1


def test_training_is_reproducible_from_the_command_line(config, tmp_path):
    for name in ("a", "b"):
        assert _run(config, tmp_path / name, "train", "steep-turn", "--seed", "7") == 0
    a, b = tmp_path / "a", tmp_path / "b"
    assert (a / "curve.csv").read_bytes() == (b / "curve.csv").read_bytes()
    tensors = [json.loads((d / "steep-turn.json").read_text())["tensors"] for d in (a, b)]
    assert tensors[0] == tensors[1]


def test_short_distance_without_warm_start_is_refused(config, tmp_path, capsys):
    assert _run(config, tmp_path / "out", "train", "short-distance") == 1
    assert "warm-start" in capsys.readouterr().err


def test_unexpected_runtime_errors_exit_with_two(config, tmp_path, capsys, mocker):
    mocker.patch("src.cli.train_task", side_effect=ValueError("length mismatch"))
    assert _run(config, tmp_path / "out", "train", "steep-turn") == 2
    assert "ValueError: length mismatch" in capsys.readouterr().err


def test_eval_with_scripted_comparators(config, tmp_path, capsys):
    out = tmp_path / "eval"
    code = _run(config, out, "eval", "--strategy", "scripted-turn", "--strategy", "no-op")
    assert code == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["paired_verified"]
    assert set(summary["strategies"]) == {"scripted-turn", "no-op"}
    assert "no-op: 1.0000" in capsys.readouterr().out


def test_eval_needs_a_strategy(config, tmp_path):
    assert _run(config, tmp_path / "out", "eval") == 1


def test_missing_bundle(config, tmp_path):
    assert _run(config, tmp_path / "out", "eval", "--bundle", str(tmp_path / "nope.yaml")) == 1


def test_missing_config_file(tmp_path):
    assert main(["eval", "--config", str(tmp_path / "nope.yaml"), "--strategy", "no-op"]) == 1


def test_bundle_then_evaluate(config, tmp_path):
    paths = {}
    for seed, name in enumerate(("large", "small", "short")):
        paths[name] = tmp_path / "ckpt" / f"{name}.json"
        save_checkpoint(
            paths[name],
            build_actor_critic(seed, hidden_sizes=(8, 8)),
            task=name,
            seed=seed,
            config_hash="x",
        )
    bundle_dir = tmp_path / "bundle"
    flags = [f"--{name}={path}" for name, path in paths.items()]
    assert _run(config, bundle_dir, "bundle", *flags) == 0
    manifest = bundle_dir / "bundle.yaml"
    assert manifest.is_file()

    out = tmp_path / "eval"
    assert _run(config, out, "eval", "--bundle", str(manifest)) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert set(summary["strategies"]) == {"multi-stage"}


def test_bundle_rejects_a_missing_checkpoint(config, tmp_path):
    args = ["bundle", "--large=a.json", "--small=b.json", "--short=c.json"]
    assert _run(config, tmp_path / "out", *args) == 1


def test_replay_is_deterministic(config, tmp_path):
    for name in ("a", "b"):
        args = ["replay", "--strategy", "no-op", "--scenario-seed", "4", "--task", "steep-turn"]
        assert _run(config, tmp_path / name, *args) == 0
    first = (tmp_path / "a" / "trajectory.csv").read_bytes()
    assert first == (tmp_path / "b" / "trajectory.csv").read_bytes()
    assert b"r_roll" in first
    record = json.loads((tmp_path / "a" / "record.json").read_text())
    assert record["strategy"] == "no-op"


def test_replay_needs_a_scenario(config, tmp_path):
    assert _run(config, tmp_path / "out", "replay", "--strategy", "no-op") == 1


def test_replay_rejects_two_strategies(config, tmp_path):
    args = ["replay", "--strategy", "no-op", "--strategy", "scripted-turn", "--scenario-seed", "1"]
    assert _run(config, tmp_path / "out", *args) == 1


def test_validation_study(config, tmp_path):
    out = tmp_path / "study"
    args = ["study", "validation", "--strategy", "scripted-turn", "--count", "2"]
    assert _run(config, out, *args) == 0
    assert len((out / "validation.csv").read_text().splitlines()) == 3


def test_parser_rejects_unknown_tasks():
    with pytest.raises(SystemExit):
        build_parser().parse_args(["train", "dogfight"])
