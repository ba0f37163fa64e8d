"""Process-level configuration for the simulator.

Experiment parameters live in ``src.models.scenario.ScenarioConfig`` and are
loaded from YAML scenario files. This module only holds settings that describe
the environment a run executes in: where results go, how chatty the logs are
and how many worker processes a sweep may use. They are read from environment
variables prefixed with ``ADAMAC_`` (or a local ``.env`` file).
"""
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    model_config = SettingsConfigDict(
        env_prefix="ADAMAC_",
        env_file=".env",
        case_sensitive=False
    )

    # Default directory for CSV output when --output is not given
    output_dir: str = "results"

    log_level: str = "INFO"

    # Sweep parallelism; 1 runs every point in-process
    workers: int = Field(default=1, ge=1)


settings = Settings()
