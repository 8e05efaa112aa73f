"""
Tests for environment-driven settings.
"""
from src.config.settings import Settings, settings


def test_defaults_validate():
    assert settings.validate()


def test_as_dict_uses_lowercase_keys():
    values = Settings.as_dict()
    assert values["census_tuple_cap"] == Settings.CENSUS_TUPLE_CAP
    assert "planar_constant" in values
    assert all(key == key.lower() for key in values)


def test_non_positive_cap_is_rejected(monkeypatch):
    monkeypatch.setattr(Settings, "DDS_POINT_CAP", 0)
    assert not Settings.validate()


def test_negative_seed_is_rejected(monkeypatch):
    monkeypatch.setattr(Settings, "SEED", -1)
    assert not Settings.validate()


def test_zero_seed_is_fine(monkeypatch):
    monkeypatch.setattr(Settings, "SEED", 0)
    assert Settings.validate()
