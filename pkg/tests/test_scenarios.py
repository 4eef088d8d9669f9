import math

import numpy as np
import pytest
from pydantic import ValidationError

from src.config import ScenarioBounds
from src.errors import ConfigError
from src.harness.scenarios import (
    AIRCRAFT_SPEED_WEIGHTS,
    LARGE_AZIMUTH_WEIGHTS,
    RANGE_WEIGHTS,
    IntervalWeights,
    ScenarioSpec,
    sample_scenario,
    scenario_seed,
    seeded_scenario,
)
from src.sim.geometry import azimuth_of
from src.sim.missile import GuidanceLaw


def test_same_seed_same_scenario():
    bounds = ScenarioBounds()
    assert seeded_scenario(42, bounds) == seeded_scenario(42, bounds)
    assert seeded_scenario(42, bounds) != seeded_scenario(43, bounds)


def test_draws_stay_inside_the_bounds():
    bounds = ScenarioBounds()
    rng = np.random.default_rng(0)
    for _ in range(500):
        spec = sample_scenario(rng, bounds)
        assert 3000.0 <= spec.altitude <= 9000.0
        assert 280.0 <= spec.aircraft_speed <= 470.0
        assert 0.0 <= spec.heading < 2 * math.pi
        assert abs(spec.azimuth) <= math.pi
        assert abs(spec.elevation) <= math.radians(15.0) + 1e-12
        assert 5000.0 <= spec.range <= 15000.0
        assert 800.0 <= spec.missile_speed <= 1400.0
        assert 40.0 <= spec.max_overload <= 50.0
        assert 3.0 <= spec.nav_coefficient <= 5.0
        assert spec.n_prime == 0.0


def test_fingerprint_ignores_the_seed(scenario):
    a, b = scenario(), scenario()
    assert a.model_copy(update={"seed": 1}).fingerprint() == b.model_copy(
        update={"seed": 2}
    ).fingerprint()
    assert scenario(range=8001.0).fingerprint() != a.fingerprint()


def test_scenario_seed_depends_on_every_index():
    seeds = {scenario_seed(0, c, r) for c in range(5) for r in range(5)}
    assert len(seeds) == 25
    assert scenario_seed(0, 1, 2) == scenario_seed(0, 1, 2)
    assert scenario_seed(1, 1, 2) != scenario_seed(0, 1, 2)


class TestIntervalWeights:
    def test_curriculum_probabilities(self):
        assert AIRCRAFT_SPEED_WEIGHTS.probabilities()[0] == pytest.approx(16 / 31)
        assert RANGE_WEIGHTS.probabilities()[-1] == pytest.approx(16 / 31)
        assert LARGE_AZIMUTH_WEIGHTS.probabilities().sum() == pytest.approx(1.0)

    def test_empirical_frequency(self):
        rng = np.random.default_rng(5)
        draws = np.array([AIRCRAFT_SPEED_WEIGHTS.sample(rng) for _ in range(31_000)])
        assert np.mean(draws < 320.0) == pytest.approx(16 / 31, abs=0.01)
        assert np.mean(draws >= 440.0) == pytest.approx(1 / 31, abs=0.005)

    def test_large_azimuth_draws_avoid_the_tail_cone(self):
        rng = np.random.default_rng(6)
        draws = [LARGE_AZIMUTH_WEIGHTS.sample(rng) for _ in range(2000)]
        assert all(30.0 <= abs(d) <= 180.0 for d in draws)

    def test_validation(self):
        with pytest.raises(ValidationError):
            IntervalWeights(intervals=[(0.0, 1.0)], weights=[1.0, 2.0])
        with pytest.raises(ValidationError):
            IntervalWeights(intervals=[(0.0, 1.0)], weights=[0.0])


class TestNavigationLaw:
    def test_apn_draws_a_correction_gain(self):
        bounds = ScenarioBounds(law="apn")
        for seed in range(50):
            spec = seeded_scenario(seed, bounds)
            assert spec.law is GuidanceLaw.APN
            assert 0.5 * spec.nav_coefficient <= spec.n_prime <= spec.nav_coefficient

    def test_pn_and_apn_share_every_other_draw(self):
        pn = seeded_scenario(7, ScenarioBounds(law="pn"))
        apn = seeded_scenario(7, ScenarioBounds(law="apn"))
        assert apn.model_copy(update={"law": GuidanceLaw.PN, "n_prime": 0.0}) == pn

    def test_pn_guidance_ignores_n_prime(self, scenario):
        assert scenario(n_prime=2.0).guidance().n_prime == 0.0
        assert scenario(law=GuidanceLaw.APN, n_prime=2.0).guidance().n_prime == 2.0


def test_initial_missile_matches_the_spec(scenario):
    spec = scenario(azimuth=0.7, heading=1.0)
    aircraft = spec.initial_aircraft()
    missile = spec.initial_missile(aircraft)
    delta = missile.position - aircraft.position
    assert np.linalg.norm(delta) == pytest.approx(8000.0)
    assert azimuth_of(aircraft.heading, delta) == pytest.approx(0.7)


class TestFromYaml:
    def test_degrees_are_converted(self, tmp_path):
        path = tmp_path / "s.yaml"
        path.write_text(
            "altitude: 5000\naircraft_speed: 300\nheading_deg: 90\nazimuth_deg: -45\n"
            "elevation_deg: 0\nrange: 9000\nmissile_speed: 1000\nmax_overload: 45\n"
            "nav_coefficient: 4\n"
        )
        spec = ScenarioSpec.from_yaml(path)
        assert spec.heading == pytest.approx(math.pi / 2)
        assert spec.azimuth == pytest.approx(-math.pi / 4)
        assert spec.law is GuidanceLaw.PN

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="not found"):
            ScenarioSpec.from_yaml(tmp_path / "absent.yaml")

    def test_invalid_values(self, tmp_path):
        path = tmp_path / "bad.yaml"
        path.write_text("altitude: 5000\nrange: -1\n")
        with pytest.raises(ConfigError, match="invalid scenario"):
            ScenarioSpec.from_yaml(path)
