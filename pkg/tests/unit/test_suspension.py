"""Unit tests for SuspensionService."""

from fractions import Fraction
import math

import pytest

from ergolab.core.domain.flows import DurationRange, RoofFunction, SuspensionFlow
from ergolab.core.domain.measures import bernoulli_measure
from ergolab.core.domain.symbolic import DyadicScale, Point
from ergolab.core.interfaces.base import ConfigurationError
from ergolab.infrastructure.decompositions import TrivialDecomposition

GOLDEN_LOG = math.log((1 + math.sqrt(5)) / 2)


@pytest.fixture
def unit_flow(full2):
    return SuspensionFlow(full2, RoofFunction.constant(1, 2))


@pytest.fixture
def two_step_flow(full2):
    """r(0) = 1, r(1) = 2: the flow pressure of phi = 0 is log of the golden ratio."""
    return SuspensionFlow(full2, RoofFunction.from_values([1, 2]))


class TestFlowMetric:
    """Test cases for the flow metric and flow Bowen distances."""

    def test_a_point_is_at_distance_zero_from_itself(self, suspension, two_step_flow):
        p = two_step_flow.point(Point.periodic((0, 1)))
        assert suspension.flow_metric(two_step_flow, p, p) == 0.0

    def test_height_difference_is_scaled_by_the_roof(self, suspension, unit_flow):
        # Arrange
        x = Point.periodic((0,))
        p, q = unit_flow.point(x), unit_flow.point(x, "1/2")

        # Act
        distance = suspension.flow_metric(unit_flow, p, q)

        # Assert
        assert distance == pytest.approx(0.5)

    def test_bowen_distance_needs_a_positive_grid(self, suspension, unit_flow):
        p = unit_flow.point(Point.periodic((0,)))
        with pytest.raises(ConfigurationError, match="grid must be positive"):
            suspension.flow_d_t(unit_flow, p, p, 2, 0)

    def test_time_t_balls_agree_with_the_time_t_map(self, suspension, unit_flow):
        # Arrange
        x = unit_flow.point(Point.periodic((0, 1)))

        # Act
        report = suspension.time_t_ball_check(unit_flow, x, DyadicScale(1), 2, 1, pairs=10, seed=3)

        # Assert
        assert report.passed
        assert report.pairs == 10


class TestFlowPartitionSums:
    """Test cases for continuous-time partition sums and pressure."""

    def test_empty_segment_is_degenerate(self, suspension, unit_flow, zero):
        value = suspension.flow_partition_sum(unit_flow, None, zero, DyadicScale(1), None, 0)
        assert value.degenerate
        assert value.is_empty

    def test_bounds_are_ordered(self, suspension, two_step_flow, weighted):
        value = suspension.flow_partition_sum(two_step_flow, None, weighted, DyadicScale(1), None, 3)
        assert value.method == "transfer"
        assert value.log_value.lower <= value.log_value.upper

    def test_transfer_and_enumeration_agree(self, suspension, two_step_flow, weighted):
        # Act
        fast = suspension.flow_partition_sum(two_step_flow, None, weighted, DyadicScale(1), None, 3)
        slow = suspension.flow_partition_sum(
            two_step_flow, DurationRange(0, 100), weighted, DyadicScale(1), None, 3
        )

        # Assert
        assert slow.method == "enumeration"
        assert slow.log_value.lower == pytest.approx(fast.log_value.lower, rel=1e-9)

    def test_grid_must_resolve_delta(self, suspension, unit_flow, zero):
        with pytest.raises(ConfigurationError, match="must lie in"):
            suspension.flow_partition_sum(unit_flow, None, zero, DyadicScale(1), None, 3, grid=1)

    def test_unit_roof_recovers_the_base_entropy(self, suspension, unit_flow, zero):
        estimate = suspension.flow_pressure(unit_flow, None, zero, DyadicScale(1), None, [4])
        assert estimate.estimate == pytest.approx(math.log(2), abs=1e-9)

    def test_times_below_three_are_rejected(self, suspension, unit_flow, zero):
        with pytest.raises(ConfigurationError, match="t >= 3"):
            suspension.flow_pressure(unit_flow, None, zero, DyadicScale(1), None, [2])


class TestFlowOracles:
    """Test cases for the pressure root, variation and Abramov's formula."""

    def test_root_for_a_constant_roof(self, suspension, unit_flow):
        assert suspension.flow_pressure_root(unit_flow) == pytest.approx(math.log(2), abs=1e-9)

    def test_root_for_the_two_step_roof(self, suspension, two_step_flow):
        assert suspension.flow_pressure_root(two_step_flow) == pytest.approx(GOLDEN_LOG, abs=1e-9)

    def test_variation_includes_the_roof_jump(self, suspension, two_step_flow, weighted):
        # Act
        fine = suspension.flow_variation(two_step_flow, weighted, DyadicScale(2))
        coarse = suspension.flow_variation(two_step_flow, weighted, DyadicScale(0))

        # Assert
        assert fine.upper == pytest.approx(math.log(2))
        assert coarse.upper == pytest.approx(math.log(2))

    def test_abramov(self, suspension, two_step_flow):
        # Act
        report = suspension.abramov_check(two_step_flow, bernoulli_measure([0.5, 0.5]), [1, 2])

        # Assert
        assert report.mean_roof == pytest.approx(1.5)
        assert report.oracle_entropy == pytest.approx(math.log(2) / 1.5)
        assert report.below_root
        assert report.optimum is not None
        assert report.optimum["gap"] <= 1e-4

    def test_abramov_needs_positive_times(self, suspension, two_step_flow):
        with pytest.raises(ConfigurationError, match="positive times"):
            suspension.abramov_check(two_step_flow, bernoulli_measure([0.5, 0.5]), [0])

    def test_trivial_decomposition_certificate(self, suspension, two_step_flow, zero):
        # Act
        certificate = suspension.flow_hypothesis_report(
            two_step_flow, zero, TrivialDecomposition(), DyadicScale(1), DyadicScale(1), times=(4,)
        )

        # Assert
        assert certificate.passed
        assert certificate.obstruction_pressure.empty_collection
        assert certificate.oracle_pressure.contains(GOLDEN_LOG) or certificate.oracle_pressure.midpoint == pytest.approx(GOLDEN_LOG)
