"""Unit tests for PressureService."""

import math

import pytest

from ergolab.core.domain.collections import Complement, EmptySegments, ExplicitSegments
from ergolab.core.domain.symbolic import DyadicScale
from ergolab.core.interfaces.base import ConfigurationError
from ergolab.core.services.pressure_service import compositions
from ergolab.infrastructure.potentials import LocallyConstantPotential

GOLDEN_LOG = math.log((1 + math.sqrt(5)) / 2)


class TestCompositions:
    """Test cases for ordered splits."""

    def test_splits_of_four_into_two(self):
        assert compositions(4, 2) == [(1, 3), (2, 2), (3, 1)]

    def test_impossible_split(self):
        assert compositions(2, 3) == []


class TestPartitionSum:
    """Test cases for PressureService.partition_sum."""

    def test_full_shift_counts_words(self, pressure_service, full2, zero):
        # Act
        value = pressure_service.partition_sum(full2, None, zero, DyadicScale(1), None, 5)

        # Assert
        assert value.method == "transfer"
        assert value.log_value.midpoint == pytest.approx(5 * math.log(2))

    def test_golden_counts_fibonacci_words(self, pressure_service, golden, zero):
        value = pressure_service.partition_sum(golden, None, zero, DyadicScale(1), None, 3)
        assert value.log_value.midpoint == pytest.approx(math.log(5))

    def test_weighted_sum(self, pressure_service, full2, weighted):
        value = pressure_service.partition_sum(full2, None, weighted, DyadicScale(1), None, 3)
        assert value.log_value.midpoint == pytest.approx(math.log(27))

    def test_class_method_for_deeper_potentials(self, pressure_service, full2):
        # Arrange
        flat = LocallyConstantPotential(2, {w: 0.0 for w in [(0, 0), (0, 1), (1, 0), (1, 1)]})

        # Act
        value = pressure_service.partition_sum(full2, None, flat, DyadicScale(1), None, 3)

        # Assert
        assert value.method == "classes"
        assert value.classes == 8
        assert value.log_value.midpoint == pytest.approx(math.log(8))

    def test_explicit_collection(self, pressure_service, full2, zero):
        collection = ExplicitSegments([(0, 0), (1, 1)])
        value = pressure_service.partition_sum(full2, collection, zero, DyadicScale(1), None, 2)
        assert value.log_value.midpoint == pytest.approx(math.log(2))

    def test_complement_of_an_explicit_collection(self, pressure_service, full2, zero):
        # Arrange
        collection = Complement(ExplicitSegments([(0, 0), (1, 1)]))

        # Act
        value = pressure_service.partition_sum(full2, collection, zero, DyadicScale(1), None, 2)

        # Assert
        assert value.log_value.midpoint == pytest.approx(math.log(2))

    def test_rejects_non_positive_n(self, pressure_service, full2, zero):
        with pytest.raises(ConfigurationError, match="n >= 1"):
            pressure_service.partition_sum(full2, None, zero, DyadicScale(1), None, 0)


class TestPressure:
    """Test cases for the ratio-method pressure estimate."""

    def test_golden_pressure_is_log_golden_ratio(self, pressure_service, golden, zero):
        # Act
        estimate = pressure_service.pressure(golden, None, zero, DyadicScale(1), None, 14)

        # Assert
        assert estimate.estimate == pytest.approx(GOLDEN_LOG, abs=1e-4)
        assert estimate.bracket.contains(estimate.estimate)
        assert not estimate.empty_collection

    def test_weighted_pressure_is_log_three(self, pressure_service, full2, weighted):
        estimate = pressure_service.pressure(full2, None, weighted, DyadicScale(2), None, 8)
        assert estimate.estimate == pytest.approx(math.log(3), abs=1e-9)

    def test_empty_collection_has_zero_pressure(self, pressure_service, full2, zero):
        estimate = pressure_service.pressure(full2, EmptySegments(), zero, DyadicScale(1), None, 4)
        assert estimate.empty_collection
        assert estimate.estimate == 0.0

    def test_needs_four_lengths(self, pressure_service, full2, zero):
        with pytest.raises(ConfigurationError, match="n_max >= 4"):
            pressure_service.pressure(full2, None, zero, DyadicScale(1), None, 3)


class TestPartitionSumInequalities:
    """Test cases for the inequality checks built on partition sums."""

    def test_lower_bound_holds_for_golden(self, pressure_service, golden, zero):
        report = pressure_service.lower_bound_check(golden, zero, DyadicScale(1), 8, GOLDEN_LOG)
        assert report.passed
        assert len(report.rows) == 8

    def test_lower_bound_fails_against_a_too_large_oracle(self, pressure_service, golden, zero):
        report = pressure_service.lower_bound_check(golden, zero, DyadicScale(1), 8, math.log(2))
        assert not report.passed
        assert report.counterexamples

    def test_product_bound(self, pressure_service, full2, weighted):
        report = pressure_service.product_bound_check(full2, weighted, DyadicScale(2), [(1, 1), (2, 1)])
        assert report.passed

    def test_sandwich_for_locally_constant(self, pressure_service, golden, zero):
        report = pressure_service.sandwich_check(golden, None, zero, DyadicScale(2), DyadicScale(1), [2, 3])
        assert report.passed
        assert len(report.rows) == 6

    def test_union_is_subadditive(self, pressure_service, full2, zero):
        # Arrange
        first = ExplicitSegments([(0, 0), (0, 1)], name="first")
        second = ExplicitSegments([(0, 1), (1, 1)], name="second")

        # Act
        report = pressure_service.union_check(full2, first, second, zero, DyadicScale(1), None, 2)

        # Assert
        assert report.passed

    def test_monotone_in_both_scales(self, pressure_service, golden, weighted):
        # Act
        report = pressure_service.monotonicity_check(golden, None, weighted, [1, 2, 3], 3)

        # Assert
        assert report.passed
        assert len(report.rows) == 3 * 2 * 2
