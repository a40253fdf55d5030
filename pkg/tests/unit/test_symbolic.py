"""Unit tests for words, scales, points and SymbolicService."""

import numpy as np
import pytest

from ergolab.core.domain.symbolic import (
    DyadicScale,
    Point,
    ShiftSystem,
    WordBudget,
    word_from_string,
    word_to_string,
)
from ergolab.core.interfaces.admissibility import AdmissibilityError, DegenerateScaleError
from ergolab.core.interfaces.base import BudgetExceededError, ConfigurationError
from ergolab.core.services.symbolic_service import SymbolicService
from ergolab.infrastructure.rules import SGapRule, build_rule


class TestWords:
    """Test cases for word parsing and rendering."""

    def test_compact_and_comma_forms(self):
        assert word_from_string("0110") == (0, 1, 1, 0)
        assert word_from_string("0,1,10") == (0, 1, 10)
        assert word_from_string("  ") == ()

    def test_large_symbols_render_with_commas(self):
        assert word_to_string((0, 1, 1)) == "011"
        assert word_to_string((0, 1, 10)) == "0,1,10"


class TestDyadicScale:
    """Test cases for DyadicScale."""

    @pytest.mark.parametrize(
        "text,exponent",
        [("2^-3", 3), ("2**-5", 5), ("1/8", 3), (0.25, 2), ("4", 4), (6, 6)],
    )
    def test_parse_accepts_every_notation(self, text, exponent):
        assert DyadicScale.parse(text).exponent == exponent

    def test_parse_rejects_non_dyadic_values(self):
        with pytest.raises(ConfigurationError, match="not dyadic"):
            DyadicScale.parse("0.3")

    def test_ceiling_rounds_up_to_the_ladder(self):
        assert DyadicScale.ceiling(0.3).exponent == 1
        assert DyadicScale.ceiling(0.25).exponent == 2
        assert DyadicScale.ceiling(5.0).exponent == 0

    def test_radius_is_exponent_minus_one(self):
        assert DyadicScale(1).radius == 0
        assert DyadicScale(4).radius == 3

    def test_scale_one_is_degenerate(self):
        # Act & Assert
        with pytest.raises(DegenerateScaleError):
            DyadicScale(0).radius

    def test_ordering_follows_the_exponent(self):
        assert DyadicScale(2).halve() == DyadicScale(3)
        assert DyadicScale(3).double() == DyadicScale(2)
        assert str(DyadicScale(7)) == "2^-7"


class TestPoint:
    """Test cases for eventually periodic points."""

    def test_periodic_point_repeats_both_ways(self):
        x = Point.periodic((0, 1))
        assert x.window(-1, 2) == (1, 0, 1, 0)

    def test_shift_moves_the_origin(self):
        x = Point.periodic((0, 1))
        assert x.shift(1).symbol(0) == 1
        assert x.shift(2).window(0, 3) == x.window(0, 3)


class TestShiftSystem:
    """Test cases for ShiftSystem built from the shipped rules."""

    def test_golden_forbids_11(self, golden):
        assert golden.accepts((0, 1, 0, 1))
        assert not golden.accepts((0, 1, 1))
        with pytest.raises(AdmissibilityError, match="not admissible"):
            golden.check_word((1, 1))

    def test_golden_beta_matches_golden_sft(self, golden, golden_beta):
        for word in [(1, 0, 1), (1, 1), (0, 0, 1, 0), (0, 1, 1, 0)]:
            assert golden_beta.accepts(word) == golden.accepts(word)

    def test_close_point_embeds_the_word(self, golden):
        # Act
        point = golden.close_point((1, 0, 1))

        # Assert
        assert point.window(0, 2) == (1, 0, 1)
        assert golden.accepts(point.window(-6, 8))

    def test_sgap_default_cycle_uses_the_smallest_gap(self):
        system = ShiftSystem(SGapRule([2, 3]))
        assert system.rule.default_cycle() == (1, 0, 0)
        assert system.is_cycle_admissible((1, 0, 0, 0))
        assert not system.is_cycle_admissible((1, 0))

    def test_build_rule_rejects_unknown_variants(self):
        with pytest.raises(ConfigurationError, match="Unknown admissibility rule"):
            build_rule({"rule": "sofic"})


class TestSymbolicService:
    """Test cases for SymbolicService."""

    @pytest.mark.parametrize("n,count", [(1, 2), (2, 3), (3, 5), (4, 8), (10, 144)])
    def test_golden_language_grows_like_fibonacci(self, symbolic, golden, n, count):
        assert len(symbolic.enumerate_words(golden, n)) == count

    def test_words_come_out_sorted(self, symbolic, full2):
        words = symbolic.enumerate_words(full2, 3)
        assert words == sorted(words)
        assert len(words) == 8

    def test_short_lived_systems_keep_their_own_languages(self, symbolic):
        # Arrange
        specs = [{"rule": "sft", "forbidden": ["11"]}, {"rule": "full", "alphabet": 2}] * 3

        # Act
        counts = [
            (len(symbolic.enumerate_words(ShiftSystem(build_rule(spec)), 4)),
             symbolic.continuations(ShiftSystem(build_rule(spec)), build_rule(spec).initial_state, 4))
            for spec in specs
        ]

        # Assert
        assert counts == [(8, 8), (16, 16)] * 3

    def test_budget_is_checked_before_enumeration(self, full2):
        # Arrange
        service = SymbolicService(WordBudget(8))

        # Act & Assert
        with pytest.raises(BudgetExceededError, match="budget of 8"):
            service.enumerate_words(full2, 4)

    def test_extensions_and_counts_agree(self, symbolic, golden):
        assert symbolic.extensions(golden, (1,), 1, 1) == [(0, 1, 0)]
        assert symbolic.extension_count(golden, (1,), 1, 1) == 1
        assert symbolic.extension_count(golden, (0,), 1, 2) == len(symbolic.extensions(golden, (0,), 1, 2))

    def test_metric_finds_the_first_disagreement(self, symbolic):
        # Arrange
        x = Point.periodic((0,))
        y = Point((0, 0, 0, 1), (0,), (0,))

        # Act
        single = symbolic.metric(x, y)
        bowen = symbolic.d_n(x, y, 2)

        # Assert
        assert single.value == pytest.approx(2.0 ** -3)
        assert bowen.value == pytest.approx(2.0 ** -2)
        assert not single.truncated

    def test_metric_reports_truncation_on_unknown_coordinates(self, symbolic):
        x = Point((0, 0, 0))
        distance = symbolic.d_n(x, x, 1)
        assert distance.truncated
        assert distance.value == 0.0
        assert distance.upper == pytest.approx(0.5)

    def test_ball_window(self, symbolic):
        assert symbolic.ball_window(3, DyadicScale(2)) == (-1, 3)
        with pytest.raises(DegenerateScaleError):
            symbolic.ball_window(3, DyadicScale(0))

    def test_separated_set_is_one_point_per_window(self, symbolic, full2):
        assert len(symbolic.separated_set(full2, None, 2, DyadicScale(1))) == 4
        assert len(symbolic.separated_set(full2, None, 2, DyadicScale(2))) == 16

    def test_random_points_are_admissible(self, symbolic, golden):
        # Arrange
        rng = np.random.default_rng(5)

        # Act
        point = symbolic.random_point(golden, rng, 12)

        # Assert
        assert golden.accepts(point.window(0, 11))
