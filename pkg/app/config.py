"""
Application settings.

Settings are read from the environment (after loading a local .env file with
python-dotenv) and validated with pydantic. Use get_settings() everywhere;
it builds the Settings object once per process.

Environment variables:
- DATABASE_URL / SQLITE_PATH: where run records and BPS rows are stored
- MIRROR_LAB_SERIES_ORDER: default truncation order of the period series
- MIRROR_LAB_MP_DPS: mpmath working precision (decimal digits)
- MIRROR_LAB_LOG_LEVEL: root log level for the CLI
- MIRROR_LAB_OUTPUT_DIR: directory for artifacts given as bare file names
"""

import os
from functools import lru_cache

from dotenv import load_dotenv
from pydantic import BaseModel, Field, field_validator


class Settings(BaseModel):
    """Validated runtime configuration."""
    database_url: str = Field("sqlite:///./mirror_lab.db", description="SQLAlchemy database URL")
    series_order: int = Field(60, ge=1, le=400, description="Default truncation order J")
    mp_dps: int = Field(30, ge=15, le=500, description="mpmath precision in decimal digits")
    log_level: str = Field("INFO", description="Root log level")
    output_dir: str = Field(".", description="Directory for CLI artifacts")

    @field_validator('log_level')
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        level = v.upper()
        if level not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            raise ValueError(f"unknown log level '{v}'")
        return level


def _settings_from_env() -> Settings:
    values = {}
    database_url = os.environ.get("DATABASE_URL") or os.environ.get("SQLITE_PATH")
    if database_url:
        values["database_url"] = database_url
    env_map = {
        "series_order": "MIRROR_LAB_SERIES_ORDER",
        "mp_dps": "MIRROR_LAB_MP_DPS",
        "log_level": "MIRROR_LAB_LOG_LEVEL",
        "output_dir": "MIRROR_LAB_OUTPUT_DIR",
    }
    for field, var in env_map.items():
        if os.environ.get(var):
            values[field] = os.environ[var]
    return Settings(**values)


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """
    Load settings once.

    Returns:
        The process-wide Settings instance
    """
    load_dotenv()
    return _settings_from_env()
