"""Logging configuration and setup utilities.

Every module of the planner obtains its logger through `setup_logger` so that
solver progress, study rows and diagnostics share one format. Records are written
to stderr, leaving stdout free for the tables printed by the command line.
"""

import logging
import os
import sys

LOG_LEVEL_ENV = "GEP_LOG_LEVEL"
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def _level_from_env() -> int:
    name = os.environ.get(LOG_LEVEL_ENV, "INFO").upper()
    level = logging.getLevelName(name)
    return level if isinstance(level, int) else logging.INFO


def setup_logger(name: str) -> logging.Logger:
    """Configure and return a logger instance."""
    logger = logging.getLogger(name)

    # Only add handlers if the logger doesn't have any
    if not logger.handlers:
        logger.setLevel(_level_from_env())

        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setFormatter(logging.Formatter(LOG_FORMAT))
        logger.addHandler(console_handler)

    return logger


def set_global_level(level: str) -> None:
    """Change the level of every logger created through `setup_logger`."""
    numeric = logging.getLevelName(level.upper())
    if not isinstance(numeric, int):
        raise ValueError(f"Unknown log level: {level}")
    for logger in logging.Logger.manager.loggerDict.values():
        if isinstance(logger, logging.Logger) and logger.name.startswith("gep_planner"):
            logger.setLevel(numeric)
