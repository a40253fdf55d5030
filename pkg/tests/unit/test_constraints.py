"""Unit tests for linear constraint sets."""

import pytest

from ergolab.core.domain.constraints import ConstraintSet, LinearConstraint
from ergolab.core.interfaces.base import ConfigurationError


class TestLinearConstraint:
    """Test cases for LinearConstraint."""

    def test_senses(self):
        # Arrange
        masses = {(0,): 0.25, (1,): 0.75}

        # Act & Assert
        assert LinearConstraint({(1,): 1.0}, ">=", 0.75).satisfied(masses)
        assert not LinearConstraint({(1,): 1.0}, "<=", 0.5).satisfied(masses)
        assert LinearConstraint({(0,): 1.0, (1,): 1.0}, "==", 1.0).satisfied(masses)

    def test_unknown_sense(self):
        with pytest.raises(ConfigurationError, match="sense must be one of"):
            LinearConstraint({(1,): 1.0}, "<", 0.5)

    def test_words_share_a_length(self):
        with pytest.raises(ConfigurationError, match="share one length"):
            LinearConstraint({(1,): 1.0, (0, 1): 1.0}, ">=", 0.1)


class TestConstraintSet:
    """Test cases for ConstraintSet."""

    def test_from_rows(self):
        # Act
        constraints = ConstraintSet.from_rows([
            {"word": "1", "sense": ">=", "bound": 0.75},
            {"coefficients": {"01": 1, "10": -1}, "sense": "==", "bound": 0},
        ])

        # Assert
        assert constraints.depth == 2
        assert not constraints.is_everything
        assert constraints.satisfied({1: {(1,): 0.8}, 2: {(0, 1): 0.1, (1, 0): 0.1}})

    def test_rows_need_words(self):
        with pytest.raises(ConfigurationError, match="'word' or 'coefficients'"):
            ConstraintSet.from_rows([{"bound": 0.5}])

    def test_names(self):
        assert ConstraintSet().name == "all"
        assert ConstraintSet.frequency(1, ">=", 0.75).name == "nu[1] >= 0.75"
        assert ConstraintSet().is_everything
