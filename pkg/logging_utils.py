# logging_utils.py

import logging
import sys
from logging.handlers import RotatingFileHandler
from typing import Optional

from settings import LOG_BACKUP_COUNT, LOG_MAX_BYTES

LOG_FORMAT = "%(asctime)s.%(msecs)03d - %(levelname)s - %(name)s - %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"


class ColorFormatter(logging.Formatter):
    """Level-colored console output for terminals."""
    COLORS = {
        logging.DEBUG: "\x1b[34;21m",
        logging.INFO: "\x1b[38;21m",
        logging.WARNING: "\x1b[33;21m",
        logging.ERROR: "\x1b[31;21m",
        logging.CRITICAL: "\x1b[31;1m",
    }
    RESET = "\x1b[0m"

    def format(self, record):
        text = super().format(record)
        color = self.COLORS.get(record.levelno)
        return f"{color}{text}{self.RESET}" if color else text


def _formatter(color: bool = False) -> logging.Formatter:
    cls = ColorFormatter if color else logging.Formatter
    return cls(LOG_FORMAT, datefmt=DATE_FORMAT)


NOISY_LOGGERS = ['sympy', 'cdd', 'asyncio', 'concurrent.futures']


def setup_logging(debug_mode: bool = False, log_file: Optional[str] = None) -> logging.Logger:
    """Configure the root logger for the command line; logs go to stderr."""
    level = logging.DEBUG if debug_mode else logging.INFO
    root_logger = logging.getLogger()
    root_logger.handlers.clear()
    root_logger.setLevel(level)

    # Console handler with color formatting; stdout stays reserved for results
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(_formatter(color=sys.stderr.isatty()))
    console_handler.setLevel(level)
    root_logger.addHandler(console_handler)

    if log_file:
        file_handler = RotatingFileHandler(
            log_file,
            maxBytes=LOG_MAX_BYTES,
            backupCount=LOG_BACKUP_COUNT,
            encoding='utf-8'
        )
        file_handler.setFormatter(_formatter())
        file_handler.setLevel(level)
        root_logger.addHandler(file_handler)

    # Reduce noise from other loggers but show their warnings and errors
    for logger_name in NOISY_LOGGERS:
        logging.getLogger(logger_name).setLevel(logging.WARNING)

    logger = logging.getLogger("okounkov_lab")
    logger.debug("Logging initialized")
    if debug_mode:
        logger.debug("Debug mode enabled")
    return logger
