import pytest

from src.harness.scenarios import AIRCRAFT_SPEED_WEIGHTS, LARGE_AZIMUTH_WEIGHTS
from src.harness.tasks import (
    RewardContext,
    Task,
    evaluation_rules,
    task_spec,
)
from src.sim import rewards


@pytest.mark.parametrize("task", [Task.STEEP_TURN, Task.SHORT_DISTANCE])
def test_turn_tasks_start_between_5_and_12_km(settings, task):
    spec = task_spec(task, settings)
    assert spec.bounds.range == (5000.0, 12000.0)
    assert not spec.rules.apply_expiry
    assert spec.rules.range_floor is None
    assert spec.rules.max_steps == 7500
    assert not spec.terminal_reward


def test_small_azimuth_task(settings):
    spec = task_spec(Task.SMALL_AZIMUTH, settings)
    assert spec.bounds.azimuth_deg == (-30.0, 30.0)
    assert spec.rules.range_floor == 5000.0
    assert spec.rules.azimuth_exit_deg is None
    assert spec.weights["aircraft_speed"] is AIRCRAFT_SPEED_WEIGHTS


def test_large_azimuth_task(settings):
    spec = task_spec(Task.LARGE_AZIMUTH, settings)
    assert spec.rules.azimuth_exit_deg == 15.0
    assert spec.rules.range_floor == 5000.0
    assert spec.weights["azimuth_deg"] is LARGE_AZIMUTH_WEIGHTS


def test_baseline_task_pays_a_terminal_reward(settings):
    spec = task_spec(Task.BASELINE, settings)
    assert spec.terminal_reward
    assert spec.rules.apply_expiry


def test_evaluation_rules(settings):
    rules = evaluation_rules(settings)
    assert rules.max_steps == 5000
    assert rules.apply_expiry


@pytest.mark.parametrize(
    ("task", "evaluator"),
    [
        (Task.STEEP_TURN, rewards.reward_steep_turn),
        (Task.SMALL_AZIMUTH, rewards.reward_small_azimuth),
        (Task.LARGE_AZIMUTH, rewards.reward_large_azimuth),
    ],
)
def test_step_reward_dispatch(settings, aircraft, geometry, task, evaluator):
    ctx = RewardContext(aircraft(roll_deg=20.0), geometry(9000.0, 0.3, -1), 0.0)
    expected = evaluator(ctx.aircraft, ctx.rel, settings.rewards)
    assert task_spec(task, settings).step_reward(ctx, settings.rewards) == expected


def test_short_distance_reward_uses_the_smoothed_rate(settings, aircraft, geometry):
    ctx = RewardContext(aircraft(), geometry(side=1, smoothed=0.1), 0.0)
    breakdown = task_spec(Task.SHORT_DISTANCE, settings).step_reward(ctx, settings.rewards)
    assert breakdown.terms["los"] == pytest.approx(0.45695, abs=1e-5)


def test_baseline_reward_uses_the_missile_overload(settings, aircraft, geometry):
    ctx = RewardContext(aircraft(), geometry(los_rate=1.0), 10.0)
    breakdown = task_spec(Task.BASELINE, settings).step_reward(ctx, settings.rewards)
    assert breakdown.terms["overload"] == pytest.approx(-1.0)
