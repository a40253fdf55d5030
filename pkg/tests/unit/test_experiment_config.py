"""Unit tests for experiment configuration files."""

import pytest
from pydantic import ValidationError

from ergolab.config.experiment import ExperimentConfig, read_document
from ergolab.core.interfaces.base import ConfigurationError
from ergolab.examples import example_path, list_examples


@pytest.fixture
def pressure_data():
    return {
        "experiment": "pressure",
        "system": {"rule": "sft", "alphabet": 2, "forbidden": ["11"]},
        "scales": {"delta": "2^-2"},
        "budgets": {"n_max": 10},
    }


class TestExperimentConfig:
    """Test cases for ExperimentConfig validation."""

    def test_defaults_are_filled_in(self, pressure_data):
        config = ExperimentConfig.model_validate(pressure_data)
        assert config.potential.kind == "zero"
        assert config.scales.delta_scale.exponent == 2
        assert config.scales.eps_scale is None

    def test_certificates_need_the_scale_ladder(self):
        # Arrange
        data = {"experiment": "certify", "scales": {"delta": "2^-3", "eps": "2^-1"}}

        # Act & Assert
        with pytest.raises(ValidationError, match="6 apart"):
            ExperimentConfig.model_validate(data)

    def test_certificates_need_eps(self):
        with pytest.raises(ValidationError, match="weight scale"):
            ExperimentConfig.model_validate({"experiment": "certify", "scales": {"delta": "2^-8"}})

    def test_flow_experiments_need_a_roof(self):
        with pytest.raises(ValidationError, match=r"\[roof\] section"):
            ExperimentConfig.model_validate({"experiment": "flow-pressure"})

    def test_unknown_keys_are_rejected(self, pressure_data):
        pressure_data["system"]["colour"] = "blue"
        with pytest.raises(ValidationError):
            ExperimentConfig.model_validate(pressure_data)

    def test_non_dyadic_scales_are_rejected(self, pressure_data):
        pressure_data["scales"]["delta"] = "0.3"
        with pytest.raises(ValidationError):
            ExperimentConfig.model_validate(pressure_data)

    def test_unsupported_version(self, pressure_data):
        pressure_data["version"] = 2
        with pytest.raises(ValidationError, match="unsupported config version"):
            ExperimentConfig.model_validate(pressure_data)

    def test_ladder(self):
        # Arrange
        config = ExperimentConfig.model_validate(
            {"experiment": "certify", "scales": {"delta": "2^-7", "eps": "2^-1"}}
        )

        # Act
        ladder = config.scales.ladder()

        # Assert
        assert ladder["gamma"] == "2^-3"
        assert ladder["rho"] == "2^-4"
        assert ladder["rho_prime"] == "7/128"


class TestConfigHash:
    """Test cases for the semantic config hash."""

    def test_hash_ignores_the_description(self, pressure_data):
        first = ExperimentConfig.model_validate(pressure_data)
        second = ExperimentConfig.model_validate({**pressure_data, "description": "another note"})
        assert first.hash == second.hash

    def test_hash_includes_defaults_and_values(self, pressure_data):
        # Arrange
        base = ExperimentConfig.model_validate(pressure_data)
        explicit = ExperimentConfig.model_validate({**pressure_data, "seed": 0})
        changed = ExperimentConfig.model_validate({**pressure_data, "seed": 1})

        # Act & Assert
        assert base.hash == explicit.hash
        assert base.hash != changed.hash
        assert len(base.hash) == 64


class TestConfigFiles:
    """Test cases for reading config documents and shipped examples."""

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigurationError, match="does not exist"):
            read_document(tmp_path / "absent.toml")

    def test_malformed_toml(self, tmp_path):
        path = tmp_path / "broken.toml"
        path.write_text("experiment = \n", encoding="utf-8")
        with pytest.raises(ConfigurationError, match="Cannot parse"):
            read_document(path)

    def test_yaml_documents(self, tmp_path):
        # Arrange
        path = tmp_path / "pressure.yaml"
        path.write_text("experiment: pressure\nbudgets:\n  n_max: 8\n", encoding="utf-8")

        # Act
        config = ExperimentConfig.load(path)

        # Assert
        assert config.budgets.n_max == 8

    def test_every_shipped_example_validates(self):
        entries = list_examples()
        assert len(entries) >= 6
        assert {e.experiment for e in entries} >= {"pressure", "certify", "ldp", "flow-pressure"}
        assert all(e.description for e in entries)

    def test_unknown_example(self):
        with pytest.raises(ConfigurationError, match="Unknown example"):
            example_path("no-such-example")
