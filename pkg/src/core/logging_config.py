"""
Logging setup for fracperim runs.

Tables go to stdout, so the console handler writes to stderr. Worker
threads of the s-grid and restart pools are named in every record, and
Python warnings (scipy's IntegrationWarning, numpy floating-point
warnings) are routed into the `py.warnings` logger so a log file holds
the whole story of a run.
"""

import logging
import sys
from pathlib import Path
from typing import Optional

LEVEL_COLORS = {
    'DEBUG': '\033[36m',
    'INFO': '\033[32m',
    'WARNING': '\033[33m',
    'ERROR': '\033[31m',
    'CRITICAL': '\033[35m',
}
RESET = '\033[0m'

VALID_LEVELS = set(LEVEL_COLORS)

RECORD_FORMAT = '%(asctime)s %(levelname)s %(name)s [%(threadName)s] %(message)s'
DATE_FORMAT = '%Y-%m-%dT%H:%M:%S'


class ColoredFormatter(logging.Formatter):
    """Colors the level name when stderr is a terminal."""

    def format(self, record):
        if not sys.stderr.isatty():
            return super().format(record)
        # the file handler sees the same record
        record = logging.makeLogRecord(record.__dict__)
        record.levelname = f"{LEVEL_COLORS.get(record.levelname, '')}{record.levelname}{RESET}"
        return super().format(record)


def _console_handler(level: str, colored: bool) -> logging.Handler:
    handler = logging.StreamHandler(sys.stderr)
    formatter_class = ColoredFormatter if colored else logging.Formatter
    handler.setFormatter(formatter_class(RECORD_FORMAT, datefmt=DATE_FORMAT))
    handler.setLevel(level)
    return handler


def _file_handler(log_file: str) -> logging.Handler:
    Path(log_file).parent.mkdir(parents=True, exist_ok=True)
    handler = logging.FileHandler(log_file, encoding='utf-8')
    handler.setFormatter(logging.Formatter(RECORD_FORMAT, datefmt=DATE_FORMAT))
    handler.setLevel(logging.DEBUG)
    return handler


def setup_logging(level: str = "INFO", log_file: Optional[str] = None, colored: bool = True) -> None:
    """
    Install the console (and optional file) handler on the root logger.

    Calling it again replaces the handlers of the previous call.

    Args:
        level: Console level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        log_file: Path of a DEBUG-level log file
        colored: Color level names on a terminal

    Raises:
        ValueError: If level is not valid
    """
    level = level.upper()
    if level not in VALID_LEVELS:
        raise ValueError(f"Invalid log level: {level}. Must be one of {sorted(VALID_LEVELS)}")

    root_logger = logging.getLogger()
    root_logger.setLevel(logging.DEBUG)
    for handler in root_logger.handlers[:]:
        root_logger.removeHandler(handler)

    root_logger.addHandler(_console_handler(level, colored))
    if log_file:
        root_logger.addHandler(_file_handler(log_file))
    logging.captureWarnings(True)

    logging.getLogger(__name__).debug(
        f"Logging configured: level={level}, file={log_file or 'none'}, colored={colored}")
