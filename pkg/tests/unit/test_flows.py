"""Unit tests for roofs, suspension flows and flow segment collections."""

from fractions import Fraction

import pytest

from ergolab.core.domain.collections import ExplicitSegments
from ergolab.core.domain.flows import (
    BracketCollection,
    DurationRange,
    FlowPoint,
    FlowSegment,
    LiftedBase,
    RoofFunction,
    SuspensionFlow,
    as_time,
)
from ergolab.core.domain.symbolic import Point
from ergolab.core.interfaces.base import ConfigurationError
from ergolab.core.interfaces.flow import HorizonError


@pytest.fixture
def flow(full2):
    """Full 2-shift under the roof r(0) = 1, r(1) = 2."""
    return SuspensionFlow(full2, RoofFunction.from_values([1, 2]), horizon=50)


@pytest.fixture
def alternating():
    return Point.periodic((0, 1))


class TestTime:
    """Test cases for exact rational time."""

    def test_conversions(self):
        assert as_time("3/2") == Fraction(3, 2)
        assert as_time(0.25) == Fraction(1, 4)
        assert as_time(2) == 2

    def test_bad_times(self):
        with pytest.raises(ConfigurationError, match="rational time"):
            as_time("soon")
        with pytest.raises(ConfigurationError, match="denominator above the bound"):
            as_time("1/7", denominator_bound=5)


class TestRoofFunction:
    """Test cases for RoofFunction."""

    def test_from_values(self):
        roof = RoofFunction.from_values([1, "5/2"])
        assert roof.r_min == 1
        assert roof.r_max == Fraction(5, 2)
        assert not roof.is_constant

    def test_roof_must_be_positive(self):
        with pytest.raises(ConfigurationError, match="not positive"):
            RoofFunction.from_values([1, 0])

    def test_constant_roof(self):
        roof = RoofFunction.constant("1/2", 3)
        assert roof.is_constant
        assert roof.value_word((2,)) == Fraction(1, 2)


class TestSuspensionFlow:
    """Test cases for the exact flow map."""

    def test_advance_crosses_the_roof(self, flow, alternating):
        # Arrange
        p = flow.point(alternating)

        # Act
        one = flow.advance(p, 1)
        later = flow.advance(p, "5/2")

        # Assert
        assert one == FlowPoint(alternating.shift(1), Fraction(0))
        assert later == FlowPoint(alternating.shift(1), Fraction(3, 2))

    def test_advance_backwards(self, flow, alternating):
        q = flow.advance(flow.point(alternating), -1)
        assert q == FlowPoint(alternating.shift(-1), Fraction(1))

    def test_horizon_is_enforced(self, flow, alternating):
        with pytest.raises(HorizonError, match="exceeds the flow horizon"):
            flow.advance(flow.point(alternating), 51)

    def test_height_must_lie_below_the_roof(self, flow, alternating):
        with pytest.raises(ConfigurationError, match="outside"):
            flow.point(alternating, 1)

    def test_entry_times_and_visited_fibers(self, flow, alternating):
        # Arrange
        p = flow.point(alternating)

        # Act & Assert
        assert flow.entry_times(p, 3) == [0, 1, 3]
        assert flow.visited(p, 3) == (0, 1, 0)
        assert flow.base_segment(p, 3) == (0, 1)
        assert flow.visited(p, 0) == ()

    def test_chart_representatives(self, flow, alternating):
        reps = flow.chart_representatives(flow.point(alternating, "1/2"))
        assert reps[1] == (alternating.shift(-1), Fraction(5, 2))


class TestFlowCollections:
    """Test cases for flow segment collections and brackets."""

    def test_duration_range(self, flow, alternating):
        collection = DurationRange(2, 3)
        p = flow.point(alternating)
        assert collection.contains(flow, FlowSegment(p, Fraction(5, 2)))
        assert not collection.contains(flow, FlowSegment(p, Fraction(4)))

    def test_duration_bracket_is_exact(self, flow, alternating):
        bracket = BracketCollection(DurationRange(5, 6))
        p = flow.point(alternating)
        assert bracket.contains(flow, FlowSegment(p, Fraction(4)))
        assert not bracket.contains(flow, FlowSegment(p, Fraction(7)))
        assert bracket.evaluations == 0

    def test_lifted_base_reads_the_base_segment(self, flow, alternating):
        lifted = LiftedBase(ExplicitSegments([(0, 1)]))
        p = flow.point(alternating)
        assert lifted.contains(flow, FlowSegment(p, Fraction(3)))
        assert not lifted.contains(flow, FlowSegment(p, Fraction(1)))

    def test_bracket_of_a_lifted_collection_enumerates_breakpoints(self, flow, alternating):
        # Arrange
        bracket = BracketCollection(LiftedBase(ExplicitSegments([(0, 1)])))
        p = flow.point(alternating)

        # Act
        inside = bracket.contains(flow, FlowSegment(p, Fraction(2)))

        # Assert
        assert inside
        assert bracket.evaluations > 0
