"""Runtime settings helpers.

Every setting has a default; the environment (or a local .env file) only
overrides it:
- TRIGFIT_LOG_LEVEL       logging level of the command-line runner
- TRIGFIT_BENCH_WORKERS   process pool size of the benchmark
- TRIGFIT_BENCH_SEEDS     trials per benchmark cell
- TRIGFIT_MAX_ITERATIONS  iteration cap of the least-squares refinement
"""

from __future__ import annotations

import logging
import os
from typing import Optional

from trigfit.errors import InvalidConfigError


# Load local .env if present so scripts work without manually exporting vars.
# Keep this best-effort: real environment variables always work too.
try:  # pragma: no cover
    from dotenv import load_dotenv  # type: ignore

    load_dotenv(override=False)
except Exception:
    pass


_LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


def _env_int(name: str, default: int, minimum: int = 1) -> int:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        value = int(raw.strip())
    except ValueError as e:
        raise InvalidConfigError(f"{name} must be an integer, got {raw!r}") from e
    if value < minimum:
        raise InvalidConfigError(f"{name} must be >= {minimum}, got {value}")
    return value


def get_log_level(override: Optional[str] = None) -> int:
    name = (override or os.getenv("TRIGFIT_LOG_LEVEL") or "INFO").strip().upper()
    if name not in _LOG_LEVELS:
        raise InvalidConfigError(f"unknown log level {name!r}; expected one of {', '.join(_LOG_LEVELS)}")
    return getattr(logging, name)


def get_bench_workers() -> int:
    return _env_int("TRIGFIT_BENCH_WORKERS", 1)


def get_bench_seeds() -> int:
    return _env_int("TRIGFIT_BENCH_SEEDS", 20)


def get_max_iterations() -> int:
    return _env_int("TRIGFIT_MAX_ITERATIONS", 500)
