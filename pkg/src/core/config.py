"""
Configuration Management - Validated settings for the SOA toolkit

Nested Pydantic settings, one section per concern. Every value can be
overridden through environment variables (SOA_* prefixes) or loaded from a
YAML file such as config/default.yaml.
"""

from pathlib import Path
from typing import Any, Dict, Literal, Optional

import yaml
from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


# ============================================================================
# VERIFICATION CONFIGURATION
# ============================================================================

class VerificationConfig(BaseSettings):
    """Self-verification performed by constructions."""

    model_config = SettingsConfigDict(env_prefix="soa_verification_")

    reverify_constructions: bool = Field(
        default=True,
        description="Re-verify intermediate GOAs and final SOAs after building them"
    )


# ============================================================================
# SEARCH CONFIGURATION
# ============================================================================

class SearchConfig(BaseSettings):
    """Column-extension search configuration."""

    model_config = SettingsConfigDict(env_prefix="soa_search_")

    max_workers: int = Field(
        default=1,
        ge=1,
        le=64,
        description="Worker processes for independent child searches (1 = in-process)"
    )

    progress_interval: int = Field(
        default=200_000,
        ge=1_000,
        description="Search nodes between debug progress lines"
    )


# ============================================================================
# CONSTRUCTION CONFIGURATION
# ============================================================================

class ConstructionConfig(BaseSettings):
    """Limits for finite-field constructions."""

    model_config = SettingsConfigDict(env_prefix="soa_construction_")

    max_field_order: int = Field(
        default=64,
        ge=2,
        le=64,
        description="Largest field order accepted by field_new"
    )

    ovoid_max_s: int = Field(
        default=5,
        ge=2,
        le=5,
        description="Largest field order accepted by ovoid_oa"
    )


# ============================================================================
# LOGGING CONFIGURATION
# ============================================================================

class LoggingConfig(BaseSettings):
    """Logging configuration."""

    model_config = SettingsConfigDict(env_prefix="soa_log_")

    level: Literal["TRACE", "DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"] = Field(
        default="WARNING",
        description="Logging level"
    )

    dir: Optional[Path] = Field(
        default=None,
        description="Directory for log files (no file sink when unset)"
    )

    rotation: str = Field(
        default="10 MB",
        description="Log rotation threshold"
    )

    retention: str = Field(
        default="7 days",
        description="Log retention period"
    )

    format: str = Field(
        default="<green>{time:YYYY-MM-DD HH:mm:ss}</green> | <level>{level: <8}</level> | <cyan>{name}</cyan>:<cyan>{function}</cyan> - <level>{message}</level>",
        description="Loguru log format string"
    )

    @field_validator("level", mode="before")
    @classmethod
    def normalize_level(cls, v: Any) -> Any:
        """Accept lower-case level names."""
        return v.upper() if isinstance(v, str) else v

    @field_validator("dir")
    @classmethod
    def create_log_dir(cls, v: Optional[Path]) -> Optional[Path]:
        """Ensure log directory exists."""
        if v is not None:
            v.mkdir(parents=True, exist_ok=True)
        return v


# ============================================================================
# ROOT CONFIGURATION
# ============================================================================

class SoaConfig(BaseSettings):
    """
    Main configuration for the SOA toolkit.

    All settings can be overridden via environment variables.
    Settings are loaded from .env file if present.

    Example:
        >>> config = SoaConfig()
        >>> config.search.max_workers
        1
    """

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
        env_nested_delimiter="__"
    )

    verification: VerificationConfig = Field(
        default_factory=VerificationConfig,
        description="Self-verification settings"
    )

    search: SearchConfig = Field(
        default_factory=SearchConfig,
        description="Extension search settings"
    )

    construction: ConstructionConfig = Field(
        default_factory=ConstructionConfig,
        description="Construction limits"
    )

    logging: LoggingConfig = Field(
        default_factory=LoggingConfig,
        description="Logging configuration"
    )

    @classmethod
    def load_from_yaml(cls, yaml_path: str | Path = "config/default.yaml") -> "SoaConfig":
        """
        Load configuration from a YAML file.

        Args:
            yaml_path: Path to the YAML file

        Returns:
            Validated configuration

        Raises:
            FileNotFoundError: If the file does not exist
        """
        config_file = Path(yaml_path)

        if not config_file.exists():
            raise FileNotFoundError(f"Configuration file not found: {yaml_path}")

        with open(config_file, "r", encoding="utf-8") as f:
            yaml_data: Dict[str, Any] = yaml.safe_load(f) or {}

        return cls(**yaml_data)


# Global config instance
config = SoaConfig()


def use_config(new_config: SoaConfig) -> SoaConfig:
    """
    Replace the values of the global config in place.

    Modules hold a reference to ``config``, so the instance is updated rather
    than rebound.

    Args:
        new_config: Configuration whose sections replace the current ones

    Returns:
        The global config instance
    """
    for name in SoaConfig.model_fields:
        setattr(config, name, getattr(new_config, name))
    return config
