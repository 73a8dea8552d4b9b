"""Runtime configuration read from the environment."""

from __future__ import annotations

import logging
import os

from pydantic import BaseModel, ConfigDict, Field

log = logging.getLogger("seifill.config")


def _env_flag(name: str, default: str = "0") -> bool:
    value = os.getenv(name, default)
    return value.strip().lower() in {"1", "true", "yes", "on"}


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        return int(raw)
    except ValueError:
        log.warning("Ignoring non-integer %s=%r, using %d", name, raw, default)
        return default


class Settings(BaseModel):
    """Knobs shared by the CLI and the services."""

    model_config = ConfigDict(frozen=True)

    max_holes: int = Field(default=14, ge=1, le=20)
    survey_concurrency: int = Field(default=4, ge=1)
    debug: bool = False


def load_settings() -> Settings:
    """Build settings from ``SEIFILL_*`` environment variables."""
    return Settings(
        max_holes=_env_int("SEIFILL_MAX_HOLES", 14),
        survey_concurrency=_env_int("SEIFILL_SURVEY_CONCURRENCY", 4),
        debug=_env_flag("SEIFILL_DEBUG"),
    )
