"""Configuration Module

Centralized configuration for the tmoebius engine.
Loads environment variables (optionally from a .env file) and exposes the
defaults used by the enumerators, the series expansion and the CLI.
"""

from typing import Final, Dict, Any
import os
import logging
import dotenv

# Load environment variables from .env file
dotenv.load_dotenv()


def _int_setting(name: str, default: int, minimum: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        logging.warning(f"Ignoring {name}={raw!r}: not an integer, using {default}")
        return default
    if value < minimum:
        logging.warning(f"Ignoring {name}={value}: must be at least {minimum}, using {default}")
        return default
    return value


# Worker pool
TMOEBIUS_JOBS: Final[int] = _int_setting("TMOEBIUS_JOBS", 1, 1)

# Multiplicity exponent convention: "val-1" or "val"
TMOEBIUS_CONVENTION: Final[str] = os.getenv("TMOEBIUS_CONVENTION", "val-1").strip().lower()

# Generating series and regularity defaults
TMOEBIUS_SERIES_ORDER: Final[int] = _int_setting("TMOEBIUS_SERIES_ORDER", 20, 1)
TMOEBIUS_MINOR_COLUMNS: Final[int] = _int_setting("TMOEBIUS_MINOR_COLUMNS", 12, 1)
TMOEBIUS_FIT_HOLDOUT: Final[int] = _int_setting("TMOEBIUS_FIT_HOLDOUT", 3, 1)

# Application Settings
DEBUG_MODE: Final[bool] = os.getenv("DEBUG", "false").lower() == "true"
LOG_LEVEL: Final[str] = os.getenv("LOG_LEVEL", "DEBUG" if DEBUG_MODE else "WARNING")

KNOWN_CONVENTIONS = ("val-1", "val")
if TMOEBIUS_CONVENTION not in KNOWN_CONVENTIONS:
    logging.warning(f"Unknown TMOEBIUS_CONVENTION {TMOEBIUS_CONVENTION!r}, expected one of {', '.join(KNOWN_CONVENTIONS)}")


def get_config() -> Dict[str, Any]:
    """Get all configuration as a dictionary"""
    return {
        "TMOEBIUS_JOBS": TMOEBIUS_JOBS,
        "TMOEBIUS_CONVENTION": TMOEBIUS_CONVENTION,
        "TMOEBIUS_SERIES_ORDER": TMOEBIUS_SERIES_ORDER,
        "TMOEBIUS_MINOR_COLUMNS": TMOEBIUS_MINOR_COLUMNS,
        "TMOEBIUS_FIT_HOLDOUT": TMOEBIUS_FIT_HOLDOUT,
        "DEBUG_MODE": DEBUG_MODE,
        "LOG_LEVEL": LOG_LEVEL,
    }
