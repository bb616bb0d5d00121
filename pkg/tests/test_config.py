#test_config.py
from pathlib import Path

import pytest

from splitnet.config import Settings, settings
from splitnet.storage import out_dir_context, prepare_out_dir, resolve_out_dir


def test_log_level_normalized(monkeypatch):
    monkeypatch.setenv("SPLITNET_LOG_LEVEL", "debug")
    assert Settings().LOG_LEVEL == "DEBUG"


def test_invalid_log_level(monkeypatch):
    monkeypatch.setenv("SPLITNET_LOG_LEVEL", "LOUD")
    with pytest.raises(ValueError):
        Settings()


def test_negative_seed_rejected(monkeypatch):
    monkeypatch.setenv("SPLITNET_DEFAULT_SEED", "-1")
    with pytest.raises(ValueError):
        Settings()


def test_out_dir_precedence(monkeypatch):
    monkeypatch.setattr(settings, "OUT_DIR", None)
    assert resolve_out_dir() == Path("out")
    assert resolve_out_dir(config_value="from_config") == Path("from_config")
    monkeypatch.setattr(settings, "OUT_DIR", "from_env")
    assert resolve_out_dir(config_value="from_config") == Path("from_env")
    assert resolve_out_dir("from_cli", "from_config") == Path("from_cli")


def test_context_override_wins(out_dir):
    assert resolve_out_dir("from_cli") == out_dir


def test_prepare_out_dir_creates(tmp_path):
    target = prepare_out_dir(tmp_path / "a" / "b")
    assert target.is_dir()


def test_context_default_is_empty():
    assert out_dir_context.get() is None
