"""Unit tests for EntropyService."""

import math

import pytest

from ergolab.core.domain.measures import bernoulli_measure
from ergolab.core.domain.symbolic import DyadicScale, Point
from ergolab.core.interfaces.base import ConfigurationError

GOLDEN_LOG = math.log((1 + math.sqrt(5)) / 2)


@pytest.fixture
def parry(equilibrium, golden, zero):
    return equilibrium.rpf_solve(golden, zero).measure


class TestExpansivity:
    """Test cases for the Bowen sets Gamma_eps and their entropy."""

    def test_gamma_set_is_a_singleton_below_scale_one(self, entropy, golden):
        descriptor = entropy.gamma_set(golden, Point.periodic((0,)), DyadicScale(2))
        assert descriptor.window == (-3, 3)
        assert descriptor.is_singleton

    def test_scale_one_is_not_expansive(self, entropy, golden, parry):
        # Arrange
        scale = DyadicScale(0)

        # Act
        descriptor = entropy.gamma_set(golden, Point.periodic((0,)), scale)

        # Assert
        assert descriptor.degenerate
        assert entropy.ne_mass(golden, parry, scale) == pytest.approx(1.0)
        assert entropy.h_star(golden, parry, scale) == pytest.approx(GOLDEN_LOG)
        assert entropy.ne_mass(golden, parry, DyadicScale(1)) == 0.0


class TestBlockEntropy:
    """Test cases for plug-in block entropies."""

    def test_bernoulli_block_entropy(self, entropy):
        assert entropy.block_entropy(bernoulli_measure([0.5, 0.5]), 3) == pytest.approx(3 * math.log(2))

    def test_plugin_entropy_of_a_markov_chain_is_exact(self, entropy, parry):
        estimate = entropy.plugin_entropy(parry, 1, 6)
        assert estimate.estimate == pytest.approx(GOLDEN_LOG, abs=1e-10)
        assert estimate.subadditive

    def test_chain_rule(self, entropy, parry):
        assert entropy.chain_rule_check(parry, 1, 2, 5).passed

    def test_partition_entropy_matches_measure_entropy(self, entropy, golden, parry):
        # Act
        report = entropy.aee_check(golden, parry, DyadicScale(1), 1, 8)

        # Assert
        assert report.passed
        assert report.equality_holds
        assert report.h_star == 0.0

    def test_partition_must_be_finer_than_the_scale(self, entropy, golden, parry):
        with pytest.raises(ConfigurationError, match="diameter"):
            entropy.aee_check(golden, parry, DyadicScale(2), 1, 8)


class TestCombinatorialLemmas:
    """Test cases for the Hamming and Stirling checks."""

    def test_hamming_far_codings_are_bowen_far(self, entropy, full2):
        report = entropy.hamming_check(full2, 1, DyadicScale(2), 0.25, 6)
        assert report.passed
        assert report.pairs == 64 ** 2
        assert report.claims > 0

    def test_stirling_bound(self, entropy):
        # Act
        report = entropy.stirling_bound_check(20, [0.25, 0.1])

        # Assert
        assert report.passed
        assert set(report.constants) == {0.1, 0.25}
        assert len(report.rows) == 40

    def test_stirling_needs_beta_below_half(self, entropy):
        with pytest.raises(ConfigurationError, match=r"\(0, 1/2\)"):
            entropy.stirling_bound_check(10, [0.6])

    def test_adapted_partition(self, entropy, full2):
        descriptor = entropy.adapted_partition(full2, 2, DyadicScale(2))
        assert descriptor.window == (-1, 2)
        assert len(descriptor.elements) == 16
        assert descriptor.verified

    def test_conditional_entropy_of_a_fair_coin(self, entropy):
        # one extra symbol of information per step
        assert entropy.conditional_entropy(bernoulli_measure([0.5, 0.5]), 1, 2, 3) == pytest.approx(math.log(2))
