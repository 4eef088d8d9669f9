import math

import pytest
import yaml

from src.config import ScenarioBounds, Settings, load_settings
from src.errors import ConfigError


def test_defaults_follow_the_experiments(settings):
    assert settings.sim.dt == pytest.approx(0.005)
    assert settings.sim.test_max_steps == 5000
    assert settings.sim.train_max_steps == 7500
    assert settings.train.learning_rate == 3e-4
    assert settings.train.batch_size == 1024
    assert settings.train.hidden_sizes == (256, 256)
    assert settings.rewards.target_roll_rad == pytest.approx(1.4835, abs=1e-4)
    assert settings.scenario.range == (5000.0, 15000.0)


def test_environment_variables(monkeypatch):
    monkeypatch.setenv("EVASION_SIM__TEST_MAX_STEPS", "250")
    monkeypatch.setenv("EVASION_LOG_LEVEL", "DEBUG")
    settings = Settings()
    assert settings.sim.test_max_steps == 250
    assert settings.log_level == "DEBUG"


def test_yaml_file_then_flags(tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text(yaml.safe_dump({"train": {"seed": 3, "episodes": 50}, "sweep": {"jobs": 4}}))
    settings = load_settings(path, {"train": {"seed": 9}})
    assert settings.train.seed == 9
    assert settings.train.episodes == 50
    assert settings.sweep.jobs == 4


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        load_settings(tmp_path / "absent.yaml")


def test_non_mapping_file(tmp_path):
    path = tmp_path / "list.yaml"
    path.write_text("- 1\n- 2\n")
    with pytest.raises(ConfigError, match="mapping"):
        load_settings(path)


@pytest.mark.parametrize(
    "overrides",
    [
        {"train": {"batch_size": 0}},
        {"sim": {"dt": -1.0}},
        {"train": {"unknown": 1}},
        {"aircraft": {"v_min": 600.0}},
    ],
)
def test_invalid_values_raise_config_error(overrides):
    with pytest.raises(ConfigError):
        load_settings(None, overrides)


def test_inverted_interval_is_rejected():
    with pytest.raises(ValueError, match="range"):
        ScenarioBounds(range=(9000.0, 5000.0))


def test_fingerprint_tracks_every_value(settings):
    assert settings.fingerprint() == Settings().fingerprint()
    assert settings.fingerprint() != Settings(train={"seed": 1}).fingerprint()


def test_dump_round_trip(tmp_path):
    settings = Settings(train={"seed": 4}, scenario={"law": "apn"})
    path = tmp_path / "out" / "config.yaml"
    settings.dump_yaml(path)
    assert load_settings(path).fingerprint() == settings.fingerprint()


def test_degree_properties():
    rewards = Settings().rewards
    assert rewards.azimuth_limit_rad == pytest.approx(math.pi / 6)
    assert rewards.pitch_limit_rad == pytest.approx(math.pi / 8)
