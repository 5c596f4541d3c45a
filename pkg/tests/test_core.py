import logging

import pytest

from parrom.core.config import Settings
from parrom.core.errors import ConditionError, ConfigError, InitError, ParromError, ShiftSingularError
from parrom.core.logging import configure_logging
from parrom.core.parallel import parallel_map


def test_settings_read_environment(monkeypatch):
    monkeypatch.setenv("PARROM_LOG_LEVEL", "DEBUG")
    monkeypatch.setenv("PARROM_THREADS", "3")
    current = Settings()
    assert current.log_level == "DEBUG"
    assert current.threads == 3
    assert current.app_name == "parrom"


def test_settings_reject_zero_threads(monkeypatch):
    monkeypatch.setenv("PARROM_THREADS", "0")
    with pytest.raises(ValueError):
        Settings()


@pytest.mark.parametrize("workers", [1, 4])
def test_parallel_map_keeps_order(workers):
    assert parallel_map(lambda x: x * x, range(20), workers=workers) == [x * x for x in range(20)]
    assert parallel_map(lambda x: x, [], workers=workers) == []


@pytest.mark.parametrize(
    ("error", "exit_code", "fragment"),
    [
        (ConfigError(), 2, "Configuración"),
        (InitError("ROM inicial con α=0.1"), 3, "α=0.1"),
        (ConditionError(0.0), 4, "rcond=0.000e+00"),
        (ShiftSingularError(1j), 4, "s=1j"),
    ],
)
def test_error_detail_and_exit_code(error, exit_code, fragment):
    assert isinstance(error, ParromError)
    assert error.exit_code == exit_code
    assert fragment in error.detail


def test_configure_logging_level():
    configure_logging("warning")
    assert logging.getLogger().level == logging.WARNING
    configure_logging("info")
    assert logging.getLogger().level == logging.INFO
