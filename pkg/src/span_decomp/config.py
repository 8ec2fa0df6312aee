"""Toolkit configuration using pydantic-settings."""

from __future__ import annotations

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Settings loaded from environment variables."""

    model_config = SettingsConfigDict(
        env_prefix="SPAN_DECOMP_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
    )

    # Logging
    environment: str = Field(
        default="production",
        description="Environment: development or production",
    )
    log_level: str = Field(
        default="WARNING",
        description="Log level: DEBUG, INFO, WARNING, ERROR",
    )
    log_file: str | None = Field(
        default=None,
        description="Optional JSON log file path",
    )

    # Budgets
    budget_nodes: int = Field(
        default=2_000_000,
        gt=0,
        description="Default node budget for game and decomposition search",
    )
    budget_seconds: float = Field(
        default=600.0,
        gt=0,
        description="Default wall-clock budget in seconds",
    )
    iso_budget_nodes: int = Field(
        default=200_000,
        gt=0,
        description="Backtracking node cap for isomorphism tests",
    )
    ef_orbit_max_size: int = Field(
        default=48,
        ge=0,
        description="Largest structure on which EF moves are pruned by orbits",
    )

    # Enumeration
    max_tree_nodes: int = Field(
        default=6,
        gt=0,
        description="Default tree size cap for decomposition enumeration",
    )
    workers: int = Field(default=1, gt=0, description="Enumeration workers")

    # Generation
    node_cap: int = Field(
        default=10_000_000,
        gt=0,
        description="Refuse to generate structures larger than this",
    )


def get_settings() -> Settings:
    """Get settings instance."""
    return Settings()
