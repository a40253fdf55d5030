"""Unit tests for AppSettings and the service container."""

import pytest

from ergolab.config.settings import DEFAULT_WORD_BUDGET, AppSettings
from ergolab.core.container import build_container
from ergolab.core.domain.symbolic import WordBudget
from ergolab.core.services.ldp_service import LDPService
from ergolab.core.services.symbolic_service import SymbolicService


class TestAppSettings:
    """Test cases for AppSettings."""

    def test_defaults(self):
        settings = AppSettings()
        assert settings.budget.word_budget == DEFAULT_WORD_BUDGET
        assert settings.reports.write_csv

    def test_file_values_and_unknown_keys(self, tmp_path):
        # Arrange
        path = tmp_path / "config.toml"
        path.write_text("[budget]\nword_budget = 1000\nwidth = 3\n[numerics]\nseed = 7\n", encoding="utf-8")

        # Act
        settings = AppSettings.load_from_file(path)

        # Assert
        assert settings.budget.word_budget == 1000
        assert settings.numerics.seed == 7
        assert not hasattr(settings.budget, "width")

    def test_missing_file_gives_defaults(self, tmp_path):
        assert AppSettings.load_from_file(tmp_path / "absent.toml").to_dict() == AppSettings().to_dict()

    def test_environment_wins(self, monkeypatch):
        # Arrange
        monkeypatch.setenv("ERGOLAB_BUDGET", "4096")
        monkeypatch.setenv("ERGOLAB_OUTPUT_DIR", "elsewhere")

        # Act
        settings = AppSettings.load_from_env()

        # Assert
        assert settings.budget.word_budget == 4096
        assert settings.reports.output_dir == "elsewhere"

    def test_bad_budget_is_ignored(self, monkeypatch):
        monkeypatch.setenv("ERGOLAB_BUDGET", "lots")
        assert AppSettings.load_from_env().budget.word_budget == DEFAULT_WORD_BUDGET

    def test_round_trip_through_a_file(self, tmp_path):
        # Arrange
        settings = AppSettings()
        settings.numerics.monte_carlo_samples = 123
        path = tmp_path / "nested" / "config.toml"

        # Act
        settings.save_to_file(path)

        # Assert
        assert AppSettings.load_from_file(path).numerics.monte_carlo_samples == 123


class TestContainer:
    """Test cases for build_container."""

    def test_services_share_one_budget(self):
        # Arrange
        settings = AppSettings()
        settings.budget.word_budget = 50

        # Act
        container = build_container(settings)

        # Assert
        assert container.get(SymbolicService).budget is container.get(WordBudget)
        assert container.get(LDPService).symbolic is container.get(SymbolicService)
        assert container.get(WordBudget).limit == 50

    def test_unregistered_services(self):
        with pytest.raises(ValueError, match="not registered"):
            build_container().get(dict)
