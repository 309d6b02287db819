# settings.py

import os
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

DEFAULT_CSV_DIGITS = 12
DEFAULT_CDF_SAMPLES = 20
DEFAULT_CHECK_DEGREE = 8
DEFAULT_F0_DEGREES = tuple(range(1, 11))

LOG_MAX_BYTES = 100000
LOG_BACKUP_COUNT = 3


def get_thread_count() -> int:
    """Worker cap from OKOUNKOV_THREADS; unset or 0 means all cores."""
    raw = os.getenv("OKOUNKOV_THREADS", "").strip()
    if not raw:
        return os.cpu_count() or 1
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"OKOUNKOV_THREADS must be an integer, got {raw!r}")
    if value < 0:
        raise ValueError(f"OKOUNKOV_THREADS must be nonnegative, got {value}")
    return value or (os.cpu_count() or 1)


def is_debug_mode() -> bool:
    return os.getenv("OKOUNKOV_DEBUG", "").strip().lower() in {"1", "true", "yes"}


def get_log_file():
    path = os.getenv("OKOUNKOV_LOG_FILE", "").strip()
    return path or None


def get_csv_digits() -> int:
    raw = os.getenv("OKOUNKOV_CSV_DIGITS", "").strip()
    return int(raw) if raw else DEFAULT_CSV_DIGITS
