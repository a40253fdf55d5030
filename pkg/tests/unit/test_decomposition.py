"""Unit tests for decomposition rules and DecompositionService."""

import math

import pytest

from ergolab.core.domain.collections import AllSegments, GoodCore, GoodSegments
from ergolab.core.domain.intervals import ValueInterval
from ergolab.core.domain.reports import BowenReport
from ergolab.core.domain.symbolic import DyadicScale, Point
from ergolab.core.interfaces.base import ConfigurationError
from ergolab.core.interfaces.decomposition import DomainError, GluingError, ScaleLadderError
from ergolab.infrastructure.decompositions import (
    BetaSuffixDecomposition,
    TrivialDecomposition,
    UserTableDecomposition,
    build_decomposition,
)
from ergolab.infrastructure.potentials import LocallyConstantPotential
from ergolab.infrastructure.rules import FullShiftRule


class TestDecompositionRules:
    """Test cases for the shipped (p, g, s) rules."""

    def test_trivial_rule_keeps_everything_good(self, decomposition):
        result = decomposition.decompose(TrivialDecomposition(), (0, 1, 1))
        assert (result.p, result.g, result.s) == (0, 3, 0)
        assert result.verified

    def test_beta_suffix_splits_off_the_expansion_prefix(self, decomposition, golden_beta_rule):
        # Arrange
        rule = BetaSuffixDecomposition(golden_beta_rule)

        # Act
        result = decomposition.decompose(rule, (0, 1, 0, 1))

        # Assert
        assert (result.p, result.g, result.s) == (0, 1, 3)
        assert result.verified
        assert rule.in_suffix((1, 0, 1))

    def test_beta_suffix_rejects_inadmissible_words(self, golden_beta_rule):
        with pytest.raises(DomainError):
            BetaSuffixDecomposition(golden_beta_rule).split((1, 1))

    def test_user_table_is_greedy(self, decomposition):
        rule = UserTableDecomposition(prefixes=[(1,)], suffixes=[(0,)])
        result = decomposition.decompose(rule, (1, 0, 1, 0))
        assert (result.p, result.g, result.s) == (1, 2, 1)
        assert result.verified

    def test_user_table_overrides_must_sum_to_the_length(self):
        with pytest.raises(ConfigurationError, match="sum to 2"):
            UserTableDecomposition(overrides={(0, 1): (1, 1, 1)})

    def test_strict_user_table_limits_the_domain(self):
        # Arrange
        rule = UserTableDecomposition(overrides={(0, 1): (0, 1, 1)}, strict=True)

        # Act & Assert
        assert rule.split((0, 1)) == (0, 1, 1)
        with pytest.raises(DomainError, match="outside the tabulated domain"):
            rule.split((1, 1))

    def test_points_need_a_length(self, decomposition):
        with pytest.raises(ConfigurationError, match="segment length n"):
            decomposition.decompose(TrivialDecomposition(), Point.periodic((0,)))

    def test_beta_suffix_needs_a_beta_shift(self):
        with pytest.raises(ConfigurationError, match="needs a beta shift"):
            build_decomposition({"kind": "beta_suffix"}, FullShiftRule(2))


class TestGluing:
    """Test cases for specification gluing."""

    def test_golden_needs_one_zero_between_ones(self, decomposition, golden):
        # Act
        result = decomposition.glue(golden, [(1,), (1,)], DyadicScale(1))

        # Assert
        assert result.gaps == [1]
        assert result.starts == [0, 2]
        assert result.shadowing_ok
        assert result.point.window(0, 2) == (1, 0, 1)

    def test_single_segment_needs_no_gap(self, decomposition, full2):
        result = decomposition.glue(full2, [(0, 1)], DyadicScale(2))
        assert result.gaps == []
        assert result.shadowing_ok

    def test_gap_bound_is_enforced(self, decomposition, golden):
        # Act
        with pytest.raises(GluingError) as info:
            decomposition.glue(
                golden, [(1,), (1,)], DyadicScale(1), decomposition.gluing_spec(golden).within(0)
            )

        # Assert
        assert info.value.pair == (1, 1)

    def test_gluing_spec_of_golden(self, decomposition, golden):
        spec = decomposition.gluing_spec(golden)
        assert spec.tau == 1
        assert spec.connector(1, 1) == (0,)
        assert spec.diameter == 1
        assert spec.search_limit == golden.transition_graph().number_of_nodes()

    def test_junctions_use_the_connector_table(self, decomposition, golden):
        # Arrange
        spec = decomposition.gluing_spec(golden)

        # Act
        result = decomposition.glue(golden, [(1,), (1,), (0, 1)], DyadicScale(1), spec)

        # Assert
        assert result.connectors == [spec.connector(1, 1), spec.connector(1, 0)]
        assert result.searched == 0
        assert result.gaps == [len(c) for c in result.connectors]
        assert result.shadowing_ok

    def test_restricted_table_bounds_the_reported_gap(self, decomposition, golden):
        # Arrange
        spec = decomposition.gluing_spec(golden).within(0)

        # Act
        report = decomposition.specification_check(golden, AllSegments(), DyadicScale(1), 0, 2, 1)

        # Assert
        assert spec.gap_bound == 0
        assert report.tau == 0
        assert not report.passed

    def test_specification_holds_on_the_full_shift(self, decomposition, full2):
        report = decomposition.specification_check(full2, AllSegments(), DyadicScale(1), None, 2, 2)
        assert report.passed
        assert report.cases == 36

    def test_specification_on_golden_cores(self, decomposition, golden):
        report = decomposition.specification_check(
            golden, GoodCore(TrivialDecomposition(), 0), DyadicScale(2), None, 3, 2,
            rule=TrivialDecomposition(), margins=[0],
        )
        assert report.passed
        assert report.worst_gap <= 1 + 2
        assert report.core_reduction[0]["passed"]


class TestCertificate:
    """Test cases for Bowen distortion and the hypothesis certificate."""

    def test_locally_constant_depth_one_has_no_distortion(self, decomposition, full2, weighted):
        report = decomposition.bowen_distortion(full2, weighted, None, DyadicScale(1), 4)
        assert report.constant.upper == 0.0
        assert report.monotone

    def test_depth_two_distortion(self, decomposition, full2):
        # Arrange
        pair = LocallyConstantPotential(2, {(0, 0): 0.0, (0, 1): 0.0, (1, 0): 0.0, (1, 1): 1.0})

        # Act
        report = decomposition.bowen_distortion(full2, pair, GoodSegments(TrivialDecomposition()), DyadicScale(1), 3)

        # Assert
        assert report.constant.upper == pytest.approx(1.0)
        assert report.analytic_bound == pytest.approx(2.0)
        assert report.within_analytic_bound

    def test_full_shift_certificate_passes(self, decomposition, full2, zero):
        # Act
        certificate = decomposition.hypothesis_certificate(
            full2, zero, TrivialDecomposition(), DyadicScale(7), DyadicScale(1), [0], 6, spec_n_max=2,
        )

        # Assert
        assert certificate.passed
        assert certificate.scale_ratio == 64
        assert certificate.obstruction_pressure.empty_collection

    def test_certificate_computes_the_expansivity_block(self, decomposition, full2, zero):
        # Act
        certificate = decomposition.hypothesis_certificate(
            full2, zero, TrivialDecomposition(), DyadicScale(7), DyadicScale(1), [0], 4, spec_n_max=2,
        )

        # Assert
        block = certificate.expansivity
        assert block["verdict"] == "no obstruction"
        assert block["non_expansive_set_empty"]
        assert block["ne_mass"] == 0.0
        assert block["samples"] == 3
        assert block["obstruction_pressure"] is None

    def test_expansivity_at_scale_one_is_obstructed(self, decomposition, full2, zero):
        # Act
        block = decomposition.expansivity_check(full2, zero, DyadicScale(0))

        # Assert
        assert block["verdict"] == "obstructed"
        assert not block["non_expansive_set_empty"]
        assert block["ne_mass"] == pytest.approx(1.0)
        assert block["obstruction_pressure"].midpoint == pytest.approx(math.log(2))
        assert not block["below_pressure"]

    def test_certificate_records_both_verdict_states(self, decomposition, full2, zero):
        # Act
        certificate = decomposition.hypothesis_certificate(
            full2, zero, TrivialDecomposition(), DyadicScale(7), DyadicScale(1), [0], 4, spec_n_max=2,
        )

        # Assert
        assert set(certificate.not_refuted) == set(certificate.verdicts)
        assert all(certificate.not_refuted[name] for name, ok in certificate.verdicts.items() if ok)

    def test_wide_distortion_enclosure_is_not_certified(self):
        # Arrange
        wide = ValueInterval(0.5, 2.0)
        report = BowenReport("G", DyadicScale(1), [wide], wide, ValueInterval.point(0.0), analytic_bound=1.0)

        # Assert
        assert report.within_analytic_bound
        assert not report.certified_within_analytic_bound

    def test_close_scales_are_rejected(self, decomposition, full2, zero):
        with pytest.raises(ScaleLadderError, match="at least 6"):
            decomposition.hypothesis_certificate(
                full2, zero, TrivialDecomposition(), DyadicScale(3), DyadicScale(1), [0], 6
            )

    def test_core_density_of_the_trivial_rule(self, decomposition, full2, zero):
        # Act
        report = decomposition.core_density_check(full2, zero, TrivialDecomposition(), DyadicScale(2), 0.0, 0.5, 3, [0, 1])

        # Assert
        assert report.passed
        assert report.least_margin == 0
        assert all(row["holds"] for row in report.rows)

    def test_core_density_needs_proper_fractions(self, decomposition, full2, zero):
        with pytest.raises(ConfigurationError, match="0 < alpha_2 < 1"):
            decomposition.core_density_check(full2, zero, TrivialDecomposition(), DyadicScale(2), 0.0, 1.0, 3, [0])
