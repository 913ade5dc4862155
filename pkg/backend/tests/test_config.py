"""Tests for environment-driven settings."""
from app.core.config import Settings


def test_settings_read_dotenv_case_sensitively():
    assert Settings.model_config["env_file"] == ".env"
    assert Settings.model_config["case_sensitive"] is True


def test_environment_overrides_defaults(monkeypatch):
    monkeypatch.setenv("QUAD_TOL", "1e-5")
    monkeypatch.setenv("MC_SAMPLES", "5000")
    fresh = Settings()
    assert fresh.QUAD_TOL == 1e-5
    assert fresh.MC_SAMPLES == 5000


def test_lowercase_variables_are_ignored(monkeypatch):
    monkeypatch.setenv("quad_tol", "0.5")
    assert Settings().QUAD_TOL != 0.5
