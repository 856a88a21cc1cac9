import importlib

import pytest

from utilities import config, logger
from utilities.logger import clear_log_history, emit_log, get_level, get_log_history, set_level


@pytest.fixture(autouse=True)
def restore_level():
    level = get_level()
    clear_log_history()
    yield
    set_level(level)
    clear_log_history()


@pytest.fixture
def reload_with_env(monkeypatch):
    def reload(value):
        monkeypatch.setenv(config.LOG_ENV_VAR, value)
        importlib.reload(config)
        importlib.reload(logger)
    yield reload
    monkeypatch.undo()
    importlib.reload(config)
    importlib.reload(logger)


def test_set_level_round_trip():
    for name in ("quiet", "debug", "info"):
        set_level(name)
        assert get_level() == name
    with pytest.raises(ValueError):
        set_level("loud")
    assert get_level() == "info"


def test_quiet_records_without_printing(capsys):
    set_level("quiet")
    emit_log("[TEST] silent")
    assert capsys.readouterr().err == ""
    assert get_log_history()[-1].endswith("[TEST] silent")


def test_debug_messages_print_only_at_debug(capsys):
    set_level("info")
    emit_log("[TEST] shown")
    emit_log("[TEST] detail", level="debug")
    err = capsys.readouterr().err
    assert "[TEST] shown" in err
    assert "[TEST] detail" not in err
    set_level("debug")
    emit_log("[TEST] detail", level="debug")
    assert "[TEST] detail" in capsys.readouterr().err
    assert len(get_log_history()) == 3


def test_history_is_bounded_and_keeps_newest():
    set_level("quiet")
    for i in range(config.LOG_BUFFER_SIZE + 10):
        emit_log(f"[TEST] message {i}")
    history = get_log_history()
    assert len(history) == config.LOG_BUFFER_SIZE
    assert history[0].endswith("[TEST] message 10")
    assert history[-1].endswith(f"[TEST] message {config.LOG_BUFFER_SIZE + 9}")
    history.clear()
    assert len(get_log_history()) == config.LOG_BUFFER_SIZE
    clear_log_history()
    assert get_log_history() == []


def test_level_comes_from_environment(reload_with_env, capsys):
    reload_with_env("DEBUG")
    assert logger.get_level() == "debug"
    reload_with_env("quiet")
    assert logger.get_level() == "quiet"
    reload_with_env("loud")
    assert logger.get_level() == "info"
    assert "Unknown SEGRE_AVERAGE_LOG='loud'" in capsys.readouterr().err
