"""
Unit tests for Configuration Management

Tests defaults, validation, environment variable overrides and YAML loading.
"""

from pathlib import Path

import pytest
from pydantic import ValidationError

from src.core.config import (
    ConstructionConfig,
    LoggingConfig,
    SearchConfig,
    SoaConfig,
    config,
    use_config,
)


class TestSoaConfig:
    """Test suite for SoaConfig."""

    @pytest.mark.unit
    def test_default_values(self):
        """Test that default configuration values are set correctly."""
        cfg = SoaConfig()

        assert cfg.verification.reverify_constructions is True

        assert cfg.search.max_workers == 1
        assert cfg.search.progress_interval == 200_000

        assert cfg.construction.max_field_order == 64
        assert cfg.construction.ovoid_max_s == 5

        assert cfg.logging.level == "WARNING"
        assert cfg.logging.dir is None

    @pytest.mark.unit
    def test_environment_variable_override(self, monkeypatch):
        """Test that section-prefixed environment variables override defaults."""
        monkeypatch.setenv("SOA_SEARCH_MAX_WORKERS", "4")
        monkeypatch.setenv("SOA_VERIFICATION_REVERIFY_CONSTRUCTIONS", "false")
        monkeypatch.setenv("SOA_LOG_LEVEL", "debug")

        cfg = SoaConfig()

        assert cfg.search.max_workers == 4
        assert cfg.verification.reverify_constructions is False
        assert cfg.logging.level == "DEBUG"

    @pytest.mark.unit
    def test_nested_delimiter_override(self, monkeypatch):
        """Test SECTION__FIELD environment variables."""
        monkeypatch.setenv("CONSTRUCTION__OVOID_MAX_S", "3")
        assert SoaConfig().construction.ovoid_max_s == 3

    @pytest.mark.unit
    def test_validation_ranges(self):
        """Test field bounds."""
        assert SearchConfig(max_workers=8).max_workers == 8

        with pytest.raises(ValidationError):
            SearchConfig(max_workers=0)

        with pytest.raises(ValidationError):
            SearchConfig(progress_interval=10)

        with pytest.raises(ValidationError):
            ConstructionConfig(max_field_order=128)

        with pytest.raises(ValidationError):
            ConstructionConfig(ovoid_max_s=7)

        with pytest.raises(ValidationError):
            LoggingConfig(level="LOUD")

    @pytest.mark.unit
    def test_log_dir_creation(self, tmp_path):
        """Test that log directory is created automatically."""
        log_dir = tmp_path / "test_logs"
        LoggingConfig(dir=str(log_dir))

        assert log_dir.exists()
        assert log_dir.is_dir()


class TestYamlLoading:
    """Test suite for load_from_yaml."""

    @pytest.mark.unit
    def test_default_file(self):
        """Test that the shipped default.yaml loads."""
        path = Path(__file__).parents[2] / "config" / "default.yaml"
        cfg = SoaConfig.load_from_yaml(path)
        assert cfg.search.max_workers == 1
        assert cfg.verification.reverify_constructions is True

    @pytest.mark.unit
    def test_partial_file(self, tmp_path):
        """Test that missing sections keep their defaults."""
        path = tmp_path / "soa.yaml"
        path.write_text("search:\n  max_workers: 3\n")
        cfg = SoaConfig.load_from_yaml(path)
        assert cfg.search.max_workers == 3
        assert cfg.construction.ovoid_max_s == 5

    @pytest.mark.unit
    def test_empty_file(self, tmp_path):
        """Test that an empty file gives the defaults."""
        path = tmp_path / "empty.yaml"
        path.write_text("")
        assert SoaConfig.load_from_yaml(path).search.max_workers == 1

    @pytest.mark.unit
    def test_missing_file(self, tmp_path):
        """Test that a missing file raises FileNotFoundError."""
        with pytest.raises(FileNotFoundError):
            SoaConfig.load_from_yaml(tmp_path / "nope.yaml")

    @pytest.mark.unit
    def test_invalid_values(self, tmp_path):
        """Test that bad values fail validation."""
        path = tmp_path / "bad.yaml"
        path.write_text("search:\n  max_workers: 0\n")
        with pytest.raises(ValidationError):
            SoaConfig.load_from_yaml(path)


class TestUseConfig:
    """Test suite for use_config."""

    @pytest.mark.unit
    def test_replaces_in_place(self, restore_config):
        """Test that the global instance keeps its identity."""
        before = id(config)
        result = use_config(SoaConfig(search=SearchConfig(max_workers=5)))
        assert id(result) == before
        assert config.search.max_workers == 5
