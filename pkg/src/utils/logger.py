"""
Logging utility for netlasso.

Provides centralized logging with color-coded console output, rotating log files
and a run ledger recording certification verdicts and experiment runs.
"""

import logging
import os
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Dict, Optional

import colorlog

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"

LEVEL_MAP = {
    "DEBUG": logging.DEBUG,
    "INFO": logging.INFO,
    "WARNING": logging.WARNING,
    "ERROR": logging.ERROR,
    "CRITICAL": logging.CRITICAL,
}


class Logger:
    """Centralized logging manager for the package."""

    _instance: Optional["Logger"] = None
    _initialized: bool = False

    def __new__(cls) -> "Logger":
        """Implement singleton pattern."""
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __init__(self) -> None:
        """Initialize the logger."""
        if not self._initialized:
            self._initialized = True
            self.loggers: Dict[str, logging.Logger] = {}
            level_name = os.getenv("NETLASSO_LOG_LEVEL", "INFO").upper()
            self.level = LEVEL_MAP.get(level_name, logging.INFO)
            self.log_dir = Path(os.getenv("NETLASSO_LOG_DIR", "logs"))
            self.file_logging = os.getenv("NETLASSO_FILE_LOGGING", "false").lower() == "true"
            self.console_output = os.getenv("NETLASSO_CONSOLE_OUTPUT", "true").lower() == "true"

    def configure(
        self,
        level: Optional[str] = None,
        log_dir: Optional[str] = None,
        file_logging: Optional[bool] = None,
        console_output: Optional[bool] = None,
    ) -> None:
        """
        Reconfigure level, directory, file and console output for all loggers.

        Loggers created earlier are updated in place.

        Args:
            level: Level name such as 'DEBUG' or 'INFO'
            log_dir: Directory for rotating log files
            file_logging: Whether to attach file handlers
            console_output: Whether to attach colored console handlers
        """
        if level is not None:
            self.level = LEVEL_MAP.get(level.upper(), logging.INFO)
        if log_dir is not None:
            self.log_dir = Path(log_dir)
        if file_logging is not None:
            self.file_logging = file_logging
        if console_output is not None:
            self.console_output = console_output

        existing = dict(self.loggers)
        self.loggers.clear()
        for name, logger in existing.items():
            for handler in list(logger.handlers):
                logger.removeHandler(handler)
                handler.close()
            log_file = "runs.log" if name == "runs" else "netlasso.log"
            self.get_logger(name, log_file=log_file)

    def get_logger(
        self,
        name: str,
        log_file: Optional[str] = None,
        level: Optional[int] = None,
        max_bytes: int = 10485760,
        backup_count: int = 5,
    ) -> logging.Logger:
        """
        Get or create a logger instance.

        Args:
            name: Logger name
            log_file: Optional log file name (relative to the log directory)
            level: Logging level, defaults to the manager level
            max_bytes: Maximum log file size before rotation
            backup_count: Number of backup files to keep

        Returns:
            Configured logger instance
        """
        if name in self.loggers:
            return self.loggers[name]

        level = self.level if level is None else level
        logger = logging.getLogger(f"netlasso.{name}")
        logger.setLevel(level)
        logger.propagate = False

        if self.console_output:
            console_handler = colorlog.StreamHandler()
            console_handler.setLevel(level)
            console_formatter = colorlog.ColoredFormatter(
                "%(log_color)s" + LOG_FORMAT,
                datefmt=DATE_FORMAT,
                log_colors={
                    "DEBUG": "cyan",
                    "INFO": "green",
                    "WARNING": "yellow",
                    "ERROR": "red",
                    "CRITICAL": "red,bg_white",
                },
            )
            console_handler.setFormatter(console_formatter)
            logger.addHandler(console_handler)

        if log_file and self.file_logging:
            self.log_dir.mkdir(parents=True, exist_ok=True)
            file_handler = RotatingFileHandler(
                self.log_dir / log_file,
                maxBytes=max_bytes,
                backupCount=backup_count,
                encoding="utf-8",
            )
            file_handler.setLevel(level)
            file_handler.setFormatter(logging.Formatter(LOG_FORMAT, datefmt=DATE_FORMAT))
            logger.addHandler(file_handler)

        if not logger.handlers:
            logger.addHandler(logging.NullHandler())

        self.loggers[name] = logger
        return logger

    def get_run_logger(self, log_file: str = "runs.log") -> logging.Logger:
        """
        Get the run ledger logger (one line per verdict or experiment run).

        Args:
            log_file: Ledger file name

        Returns:
            Run ledger logger instance
        """
        return self.get_logger(
            "runs", log_file=log_file, level=logging.INFO, max_bytes=52428800, backup_count=10
        )


_logger_instance = Logger()


def get_logger(name: str = "netlasso") -> logging.Logger:
    """
    Get a logger instance (convenience function).

    Args:
        name: Logger name

    Returns:
        Logger instance
    """
    return _logger_instance.get_logger(name, log_file="netlasso.log")


def get_run_logger() -> logging.Logger:
    """
    Get run ledger logger instance (convenience function).

    Returns:
        Run ledger logger instance
    """
    return _logger_instance.get_run_logger()


def configure_logging(
    level: Optional[str] = None,
    log_dir: Optional[str] = None,
    file_logging: Optional[bool] = None,
    console_output: Optional[bool] = None,
) -> None:
    """Apply logging settings to the global manager."""
    _logger_instance.configure(
        level=level, log_dir=log_dir, file_logging=file_logging, console_output=console_output
    )
