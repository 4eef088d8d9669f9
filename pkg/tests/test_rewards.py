import math

import pytest

from src.config import RewardSettings
from src.sim.rewards import (
    TERM_NAMES,
    RewardBreakdown,
    reward_baseline_step,
    reward_baseline_terminal,
    reward_large_azimuth,
    reward_short_distance,
    reward_small_azimuth,
    reward_steep_turn,
)

TOL = 1e-9


class TestSteepTurn:
    def test_bank_toward_the_missile_side(self, aircraft, geometry):
        assert reward_steep_turn(aircraft(roll_deg=85.0), geometry(side=1)).total == pytest.approx(
            1.0, abs=TOL
        )
        assert reward_steep_turn(
            aircraft(roll_deg=-85.0), geometry(side=-1)
        ).total == pytest.approx(1.0, abs=TOL)

    def test_wings_level(self, aircraft, geometry):
        expected = 0.5 + 0.5 * math.exp(-math.radians(85.0) / 0.2)
        total = reward_steep_turn(aircraft(), geometry(side=1)).total
        assert total == pytest.approx(expected, abs=TOL)
        assert total == pytest.approx(0.50030, abs=1e-5)

    def test_collinear_missile_banks_right(self, aircraft, geometry):
        assert reward_steep_turn(aircraft(roll_deg=85.0), geometry(side=0)).total == pytest.approx(
            1.0, abs=TOL
        )

    def test_terms_are_bounded_by_their_weights(self, aircraft, geometry):
        for roll in range(-180, 181, 15):
            for pitch in range(-80, 81, 20):
                terms = reward_steep_turn(aircraft(roll, pitch), geometry(side=1)).terms
                assert 0.0 < terms["roll"] <= 0.5
                assert 0.0 < terms["pitch"] <= 0.5


class TestShortDistance:
    def test_zero_los_rate_equals_steep_turn(self, aircraft, geometry):
        state, rel = aircraft(roll_deg=40.0, pitch_deg=3.0), geometry(side=-1)
        assert reward_short_distance(state, rel, 0.0).total == reward_steep_turn(state, rel).total

    @pytest.mark.parametrize(("rate", "expected"), [(0.1, 0.45695), (-0.1, -0.45695)])
    def test_los_term(self, aircraft, geometry, rate, expected):
        terms = reward_short_distance(aircraft(), geometry(side=1), rate).terms
        assert terms["los"] == pytest.approx(0.6 * math.tanh(math.copysign(1.0, rate)), abs=TOL)
        assert terms["los"] == pytest.approx(expected, abs=1e-5)

    def test_difference_depends_only_on_side_and_rate(self, aircraft, geometry):
        rel = geometry(side=-1)
        diffs = {
            round(
                reward_short_distance(aircraft(r, p), rel, 0.05).total
                - reward_steep_turn(aircraft(r, p), rel).total,
                12,
            )
            for r, p in [(0.0, 0.0), (60.0, 10.0), (-85.0, -4.0)]
        }
        assert len(diffs) == 1


class TestSmallAzimuth:
    def test_ideal_state(self, aircraft, geometry):
        assert reward_small_azimuth(aircraft(), geometry(azimuth=0.0)).total == pytest.approx(
            2.0, abs=TOL
        )

    def test_azimuth_off_the_tail(self, aircraft, geometry):
        breakdown = reward_small_azimuth(aircraft(), geometry(azimuth=0.2))
        assert breakdown.terms["azimuth"] == pytest.approx(math.exp(-1.0), abs=TOL)
        assert breakdown.total == pytest.approx(1.36788, abs=1e-5)

    def test_slow_flight_is_penalised(self, aircraft, geometry):
        breakdown = reward_small_azimuth(aircraft(speed=230.0), geometry())
        assert breakdown.terms["constraint_velocity"] == -20.0
        assert breakdown.total == pytest.approx(2.0 + 0.2 * math.tanh(-1.5) - 20.0, abs=TOL)
        assert breakdown.total == pytest.approx(-18.18103, abs=1e-5)

    @pytest.mark.parametrize(
        ("field", "limit_deg"), [("roll", 135.0), ("pitch", 22.5), ("azimuth", 30.0)]
    )
    def test_constraint_thresholds_are_strict(self, aircraft, geometry, field, limit_deg):
        def breakdown(angle_deg: float) -> RewardBreakdown:
            if field == "azimuth":
                return reward_small_azimuth(aircraft(), geometry(azimuth=math.radians(angle_deg)))
            state = aircraft(**{f"{field}_deg": angle_deg})
            return reward_small_azimuth(state, geometry())

        name = f"constraint_{field}"
        assert breakdown(limit_deg - 1e-6).terms[name] == 0.0
        assert breakdown(limit_deg + 1e-6).terms[name] == -20.0

    def test_speed_band_edges_are_inside(self, aircraft, geometry):
        for speed in (240.0, 510.0):
            terms = reward_small_azimuth(aircraft(speed=speed), geometry()).terms
            assert terms["constraint_velocity"] == 0.0


class TestLargeAzimuth:
    def test_far_branch_targets_the_steep_bank(self, aircraft, geometry):
        total = reward_large_azimuth(aircraft(roll_deg=-85.0), geometry(9000.0, side=-1)).total
        assert total == pytest.approx(1.0, abs=TOL)

    def test_close_branch_rewards_near_wings_level(self, aircraft, geometry):
        total = reward_large_azimuth(aircraft(roll_deg=10.0), geometry(8000.0)).total
        assert total == pytest.approx(1.0, abs=TOL)

    def test_close_branch_penalises_steep_bank(self, aircraft, geometry):
        total = reward_large_azimuth(aircraft(roll_deg=40.0), geometry(8000.0)).total
        assert total == pytest.approx(-19.5, abs=TOL)

    def test_switch_range_belongs_to_the_close_branch(self, aircraft, geometry):
        state = aircraft(roll_deg=85.0)
        at_switch = reward_large_azimuth(state, geometry(8500.0, side=1)).terms["roll"]
        beyond = reward_large_azimuth(state, geometry(8500.0 + 1e-6, side=1)).terms["roll"]
        assert at_switch == -20.0
        assert beyond == pytest.approx(0.5, abs=TOL)

    def test_close_roll_breakpoint(self, aircraft, geometry):
        rel = geometry(8000.0)
        assert reward_large_azimuth(aircraft(roll_deg=30.0 - 1e-6), rel).terms["roll"] == 0.5
        assert reward_large_azimuth(aircraft(roll_deg=30.0 + 1e-6), rel).terms["roll"] == -20.0


class TestBaseline:
    def test_survivor_terminal_reward(self):
        assert reward_baseline_terminal(False, 20.37).total == pytest.approx(8148.0, abs=1e-6)

    def test_hit_at_the_lethal_radius_is_zero(self):
        assert reward_baseline_terminal(True, 10.0).total == 0.0

    def test_hit_terminal_is_quadratic(self):
        assert reward_baseline_terminal(True, 4.0).total == pytest.approx(-200.0 * 36.0)

    def test_step_with_unit_los_rate(self, aircraft, geometry):
        assert reward_baseline_step(aircraft(), geometry(los_rate=1.0), 0.0).total == (
            pytest.approx(0.5, abs=TOL)
        )

    def test_zero_los_rate_uses_the_floor(self, aircraft, geometry):
        terms = reward_baseline_step(aircraft(), geometry(los_rate=0.0), 0.0).terms
        assert terms["los"] == pytest.approx(2.4 * math.log(1e-6))

    def test_overload_and_roll_penalties(self, aircraft, geometry):
        terms = reward_baseline_step(aircraft(roll_deg=140.0), geometry(los_rate=1.0), 10.0).terms
        assert terms["overload"] == pytest.approx(-1.0)
        assert terms["constraint_roll"] == -20.0


def test_breakdown_total_and_row():
    breakdown = RewardBreakdown({"roll": 0.25, "pitch": 0.5}).merged(
        RewardBreakdown({"roll": 0.25, "distance_terminal": 3.0})
    )
    assert breakdown.total == pytest.approx(4.0, abs=1e-12)
    row = breakdown.as_row()
    assert tuple(row) == TERM_NAMES
    assert row["azimuth"] == 0.0
    assert row["roll"] == 0.5


def test_generic_parameters_come_from_settings(aircraft, geometry):
    cfg = RewardSettings(target_roll_deg=60.0, roll_weight=1.0)
    terms = reward_steep_turn(aircraft(roll_deg=60.0), geometry(side=1), cfg).terms
    assert terms["roll"] == pytest.approx(1.0)


def test_evaluators_are_deterministic(aircraft, geometry):
    state, rel = aircraft(12.0, -3.0, 333.0), geometry(7000.0, 0.4, -1, 0.02)
    assert reward_large_azimuth(state, rel) == reward_large_azimuth(state, rel)
    assert reward_small_azimuth(state, rel) == reward_small_azimuth(state, rel)
