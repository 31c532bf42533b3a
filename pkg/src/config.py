"""
Runtime settings read from the environment.

The CLI calls load_dotenv() before anything else, so values placed in a local
.env file are visible here as ordinary environment variables.
"""

import os
from dataclasses import dataclass


DEFAULT_TOLERANCE = 1e-9
DEFAULT_CLASSIFICATION_TOL = 1e-9


@dataclass(frozen=True)
class Settings:
    """Process-wide numeric and parallelism settings."""

    threads: int = 1
    tolerance: float = DEFAULT_TOLERANCE
    classification_tol: float = DEFAULT_CLASSIFICATION_TOL


def _read_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == '':
        return default
    try:
        return max(1, int(raw))
    except ValueError:
        return default


def _read_float(name: str, default: float) -> float:
    raw = os.getenv(name)
    if raw is None or raw.strip() == '':
        return default
    try:
        return float(raw)
    except ValueError:
        return default


def get_settings() -> Settings:
    """
    Build settings from the current environment.

    Environment variables:
        MULTITIME_THREADS: cap on worker threads for grid evaluation (default 1)
        MULTITIME_TOL: absolute comparison tolerance (default 1e-9)
        MULTITIME_CLASSIFICATION_TOL: relative band for repeated eigenvalues (default 1e-9)

    Returns:
        Settings instance
    """
    return Settings(
        threads=_read_int('MULTITIME_THREADS', 1),
        tolerance=_read_float('MULTITIME_TOL', DEFAULT_TOLERANCE),
        classification_tol=_read_float('MULTITIME_CLASSIFICATION_TOL', DEFAULT_CLASSIFICATION_TOL),
    )
