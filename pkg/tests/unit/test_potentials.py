"""Unit tests for potentials and PotentialService."""

import math

import pytest

from ergolab.core.domain.symbolic import DyadicScale, Point
from ergolab.core.interfaces.base import ConfigurationError
from ergolab.core.interfaces.potential import PotentialTableError
from ergolab.infrastructure.potentials import (
    HolderTabulatedPotential,
    LocallyConstantPotential,
    build_potential,
    geometric_potential,
)


@pytest.fixture
def pair_potential():
    """phi = 1 on the block 11, 0 elsewhere."""
    return LocallyConstantPotential(2, {(0, 0): 0.0, (0, 1): 0.0, (1, 0): 0.0, (1, 1): 1.0})


class TestBuildPotential:
    """Test cases for the potential factory."""

    def test_zero_and_constant(self):
        zero = build_potential({"kind": "zero"}, lambda d: [], 3)
        constant = build_potential({"kind": "constant", "value": 0.5}, lambda d: [], 2)
        assert zero.table == {(0,): 0.0, (1,): 0.0, (2,): 0.0}
        assert constant.value((1,)) == 0.5

    def test_table_is_completed_with_the_default(self, symbolic, golden):
        # Arrange
        spec = {"kind": "locally_constant", "depth": 2, "values": {"01": 1.0}, "default": 0.25}

        # Act
        potential = build_potential(spec, lambda d: symbolic.enumerate_words(golden, d), 2)

        # Assert
        assert potential.table == {(0, 0): 0.25, (0, 1): 1.0, (1, 0): 0.25}

    def test_missing_entries_are_rejected(self, symbolic, full2):
        spec = {"kind": "locally_constant", "depth": 1, "values": {"0": 1.0}}
        with pytest.raises(PotentialTableError, match="no entry for admissible word 1"):
            build_potential(spec, lambda d: symbolic.enumerate_words(full2, d), 2)

    def test_inadmissible_entries_are_rejected(self, symbolic, golden):
        spec = {"kind": "locally_constant", "depth": 2, "values": {"11": 1.0}, "default": 0.0}
        with pytest.raises(PotentialTableError, match="inadmissible or mis-sized words: 11"):
            build_potential(spec, lambda d: symbolic.enumerate_words(golden, d), 2)

    def test_holder_needs_its_modulus(self):
        with pytest.raises(ConfigurationError, match="c_holder and alpha"):
            build_potential({"kind": "holder", "depth": 1, "values": {"0": 0, "1": 1}}, lambda d: [(0,), (1,)], 2)

    def test_unknown_kind(self):
        with pytest.raises(ConfigurationError, match="Unknown potential kind"):
            build_potential({"kind": "random"}, lambda d: [], 2)


class TestTabulatedPotentials:
    """Test cases for table variation and moduli."""

    def test_locally_constant_modulus_vanishes_past_the_depth(self, weighted):
        assert weighted.modulus(0) == pytest.approx(math.log(2))
        assert weighted.modulus(1) == 0.0
        assert weighted.is_locally_constant

    def test_holder_table_must_respect_the_modulus(self):
        with pytest.raises(PotentialTableError, match="above the modulus"):
            HolderTabulatedPotential(1, {(0,): 0.0, (1,): 2.0}, c_holder=1.0, alpha=1.0)

    def test_geometric_potential(self, symbolic, full2):
        # Act
        potential = geometric_potential(symbolic.enumerate_words(full2, 3), 2, 3)

        # Assert
        assert potential.c_holder == pytest.approx(1.0)
        assert potential.remainder == pytest.approx(0.125)
        assert potential.value((1, 0, 0)) == pytest.approx(0.5 + 0.0625)
        assert not potential.is_locally_constant


class TestPotentialService:
    """Test cases for Birkhoff sums and two-scale weights."""

    def test_birkhoff_sum_is_exact_for_locally_constant(self, potentials, weighted):
        # Arrange
        x = Point.periodic((1, 0))

        # Act
        total = potentials.birkhoff_sum(weighted, x, 4)

        # Assert
        assert total.contains(2 * math.log(2))
        assert total.width < 1e-15

    def test_phi_eps_maximizes_over_the_ball(self, potentials, full2, pair_potential):
        # Arrange
        x = Point((1, 1, 0), (0,), (0,))

        # Act
        base = potentials.birkhoff_sum(pair_potential, x, 2)
        ball = potentials.phi_eps(full2, pair_potential, x, 2, DyadicScale(1))

        # Assert
        assert base.midpoint == pytest.approx(1.0)
        assert ball.lower == pytest.approx(2.0)

    def test_variation_of_locally_constant_is_a_point(self, potentials, pair_potential):
        assert potentials.variation(pair_potential, DyadicScale(1)).upper == pytest.approx(1.0)
        assert potentials.variation(pair_potential, DyadicScale(2)).upper == 0.0

    def test_check_table_reports_missing_words(self, potentials, full2):
        partial = LocallyConstantPotential(1, {(0,): 0.0})
        with pytest.raises(PotentialTableError, match="misses admissible words: 1"):
            potentials.check_table(full2, partial)

    def test_class_extrema_per_window(self, potentials, full2, weighted):
        extrema = potentials.class_extrema(full2, weighted, 1, 0)
        assert extrema.classes[(0,)] == (0.0, 0.0)
        assert extrema.classes[(1,)][1] == pytest.approx(math.log(2))
