"""
User settings: an optional JSON file under the application home directory.
"""

import json
import os
from typing import Any, Dict, Optional

from src.models.constants import (
    DEFAULT_DEPTH,
    DEFAULT_HOME,
    DEFAULT_ITERATIONS,
    DEFAULT_LIMIT,
    DEFAULT_UNIVERSE_DEPTH,
    HISTORY_FILE,
    HOME_ENV,
    LOG_FILE,
    SETTINGS_FILE,
)
from src.utilities.logger import AppLogger

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")

DEFAULTS: Dict[str, Any] = {
    "depth": DEFAULT_DEPTH,
    "limit": DEFAULT_LIMIT,
    "universe_depth": DEFAULT_UNIVERSE_DEPTH,
    "iterations": DEFAULT_ITERATIONS,
    "workers": 1,
    "log_level": None,
    "log_to_file": False,
}

# Accepted range per integer setting
_RANGES = {
    "depth": (0, 1000),
    "limit": (1, 100000),
    "universe_depth": (0, 4),
    "iterations": (0, 1000),
    "workers": (1, 64),
}


def home_dir() -> str:
    return os.path.expanduser(os.getenv(HOME_ENV, DEFAULT_HOME))


def settings_path() -> str:
    return os.path.join(home_dir(), SETTINGS_FILE)


def history_path() -> str:
    return os.path.join(home_dir(), HISTORY_FILE)


def log_path() -> str:
    return os.path.join(home_dir(), LOG_FILE)


def validate_settings(config: Dict[str, Any]) -> Dict[str, Any]:
    """Replace missing or invalid values by their defaults; unknown keys are dropped."""
    logger = AppLogger()
    validated = dict(DEFAULTS)
    repaired = []
    for key, value in config.items():
        if key not in DEFAULTS:
            repaired.append(key)
            continue
        if key in _RANGES:
            low, high = _RANGES[key]
            if isinstance(value, bool) or not isinstance(value, int) or not (low <= value <= high):
                repaired.append(key)
                continue
        elif key == "log_level":
            if value is not None and (not isinstance(value, str) or value.upper() not in LOG_LEVELS):
                repaired.append(key)
                continue
            value = value.upper() if value else None
        elif key == "log_to_file" and not isinstance(value, bool):
            repaired.append(key)
            continue
        validated[key] = value
    if repaired:
        logger.warning("Settings repaired: invalid or unknown values replaced by defaults",
                       extra_context={"keys": sorted(repaired)})
    return validated


def load_settings(path: Optional[str] = None) -> Dict[str, Any]:
    """Settings from ``path`` (default: the home settings file), validated."""
    logger = AppLogger()
    path = path or settings_path()
    if not os.path.exists(path):
        return dict(DEFAULTS)
    try:
        with open(path, "r", encoding="utf-8") as f:
            config = json.load(f)
    except json.JSONDecodeError:
        logger.warning("Settings file empty or corrupted. Using defaults.", extra_context={"path": path})
        return dict(DEFAULTS)
    except OSError as e:
        logger.error(f"Failed to load settings: {e}", exc_info=True)
        return dict(DEFAULTS)
    if not isinstance(config, dict):
        logger.warning("Settings file must hold a JSON object. Using defaults.", extra_context={"path": path})
        return dict(DEFAULTS)
    return validate_settings(config)
