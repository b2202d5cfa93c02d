"""Tests for logging utility."""

import logging

import colorlog
import pytest
from src.utils import logger as logger_module
from src.utils.logger import Logger


@pytest.fixture
def manager():
    """Logging manager restored to console-only output afterwards."""
    manager = Logger()
    yield manager
    manager.configure(level="INFO", file_logging=False, console_output=True)


def _console_handlers(log):
    return [h for h in log.handlers if isinstance(h, colorlog.StreamHandler)]


class TestLogger:
    """Test suite for the logging manager."""

    def test_singleton(self):
        """Test that Logger implements the singleton pattern."""
        assert Logger() is Logger()

    def test_console_handler_by_default(self, manager):
        """Test loggers print to the console unless told otherwise."""
        manager.configure(console_output=True)
        assert len(_console_handlers(manager.get_logger("console-on"))) == 1

    def test_console_output_off(self, manager):
        """Test disabling console output removes colored handlers from existing loggers."""
        log = manager.get_logger("console-off")
        manager.configure(console_output=False)
        log = manager.get_logger("console-off")
        assert _console_handlers(log) == []
        assert any(isinstance(h, logging.NullHandler) for h in log.handlers)

    def test_file_logging(self, manager, tmp_path):
        """Test file handlers write into the configured directory."""
        manager.configure(log_dir=str(tmp_path), file_logging=True, console_output=False)
        log = manager.get_logger("to-file", log_file="netlasso.log")
        log.info("written")
        for handler in log.handlers:
            handler.flush()
        assert "written" in (tmp_path / "netlasso.log").read_text()

    def test_level(self, manager):
        """Test level names map to logging levels."""
        manager.configure(level="debug")
        assert manager.get_logger("levels").level == logging.DEBUG

    def test_configure_logging_forwards(self, mocker):
        """Test the module-level helper passes every setting on."""
        configure = mocker.patch.object(logger_module._logger_instance, "configure")
        logger_module.configure_logging("WARNING", "out", True, False)
        configure.assert_called_once_with(
            level="WARNING", log_dir="out", file_logging=True, console_output=False
        )
