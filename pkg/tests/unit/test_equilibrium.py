"""Unit tests for EquilibriumService."""

import math

import pytest

from ergolab.config.settings import AppSettings
from ergolab.core.container import build_container
from ergolab.core.domain.measures import bernoulli_measure, cycle_measure
from ergolab.core.domain.symbolic import DyadicScale, ShiftSystem
from ergolab.core.interfaces.base import ConfigurationError
from ergolab.core.interfaces.measure import DepthError, ReducibleMatrixError
from ergolab.core.services.equilibrium_service import EquilibriumService
from ergolab.infrastructure.decompositions import TrivialDecomposition
from ergolab.infrastructure.potentials import geometric_potential
from ergolab.infrastructure.rules import SFTRule

GOLDEN_LOG = math.log((1 + math.sqrt(5)) / 2)
PHI = (1 + math.sqrt(5)) / 2


def product_pressure(depth: int, amplitude: float, alpha: float) -> float:
    """Pressure of the geometric potential on the full 2-shift: each coordinate contributes independently."""
    ratio = 2.0 ** -alpha
    c_holder = amplitude * ratio / (1 - ratio)
    weight = c_holder * (1 - ratio ** depth)
    return 0.5 * c_holder * ratio ** depth + math.log1p(math.exp(weight))


@pytest.fixture
def geometric(symbolic, full2):
    """Geometric potentials on the full 2-shift, by depth, amplitude and exponent."""
    def make(depth: int, amplitude: float = 1.0, alpha: float = 1.0):
        return geometric_potential(symbolic.enumerate_words(full2, depth), 2, depth, amplitude, alpha)
    return make


class TestPressureOracle:
    """Test cases for the spectral pressure oracle."""

    def test_golden_mean_entropy(self, equilibrium, golden, zero):
        oracle = equilibrium.pressure_oracle(golden, zero)
        assert oracle.midpoint == pytest.approx(GOLDEN_LOG, abs=1e-12)
        assert oracle.width < 1e-12

    def test_weighted_full_shift(self, equilibrium, full2, weighted):
        assert equilibrium.pressure_oracle(full2, weighted).midpoint == pytest.approx(math.log(3))

    def test_topological_entropy_counts_symbols(self, equilibrium, golden, full2):
        assert equilibrium.topological_entropy(golden) == pytest.approx(GOLDEN_LOG)
        assert equilibrium.topological_entropy(full2) == pytest.approx(math.log(2))

    def test_successive_potentials_get_their_own_pressure(self, equilibrium, full2, geometric):
        # Arrange
        cases = [(4, 1.0), (5, 1.0), (8, 2.0)]

        # Act
        values = [equilibrium.pressure_oracle(full2, geometric(d, a, 0.5)).midpoint for d, a in cases]
        fresh = build_container(AppSettings()).get(EquilibriumService)
        again = fresh.pressure_oracle(full2, geometric(8, 2.0, 0.5)).midpoint

        # Assert
        assert values[0] == pytest.approx(2.263909, abs=1e-6)
        assert values[1] == pytest.approx(2.329259, abs=1e-6)
        for (d, a), value in zip(cases, values):
            assert value == pytest.approx(product_pressure(d, a, 0.5), abs=1e-9)
        assert again == pytest.approx(values[2], abs=1e-12)

    def test_equal_tables_share_one_presentation(self, equilibrium, full2, geometric):
        first = equilibrium.presentation(full2, geometric(3))
        second = equilibrium.presentation(full2, geometric(3))
        assert first is second


class TestRPF:
    """Test cases for the RPF equilibrium chain."""

    def test_parry_measure_of_golden(self, equilibrium, golden, zero):
        # Act
        solution = equilibrium.rpf_solve(golden, zero)

        # Assert
        assert solution.pressure == pytest.approx(GOLDEN_LOG)
        assert solution.measure.mass((1,)) == pytest.approx(1 / (1 + PHI ** 2))
        assert solution.measure.mass((1, 1)) == 0.0
        assert equilibrium.markov_entropy(solution.measure) == pytest.approx(GOLDEN_LOG)
        assert not solution.spectral_gap_warning
        assert solution.measure.stationarity_defect < 1e-12

    def test_weighted_equilibrium_is_bernoulli(self, equilibrium, full2, weighted):
        measure = equilibrium.rpf_solve(full2, weighted).measure
        assert measure.mass((1,)) == pytest.approx(2 / 3)
        assert measure.mass((0, 1, 1)) == pytest.approx(4 / 27)

    def test_reducible_systems_are_rejected(self, equilibrium, zero):
        # Arrange
        system = ShiftSystem(SFTRule([[1, 1], [0, 1]]))

        # Act & Assert
        with pytest.raises(ReducibleMatrixError, match="2 irreducible components"):
            equilibrium.rpf_solve(system, zero)
        assert equilibrium.pressure_oracle(system, zero).midpoint == pytest.approx(0.0)

    @pytest.mark.parametrize("depth", [8, 10])
    def test_deep_holder_potential_gives_a_markov_chain(self, equilibrium, full2, geometric, depth):
        # Arrange
        potential = geometric(depth, 2.0, 0.5)

        # Act
        solution = equilibrium.rpf_solve(full2, potential)

        # Assert
        assert solution.pressure == pytest.approx(equilibrium.pressure_oracle(full2, potential).midpoint, abs=1e-6)
        assert solution.pressure == pytest.approx(product_pressure(depth, 2.0, 0.5), abs=1e-6)
        assert solution.measure.stationarity_defect < 1e-9
        assert sum(solution.measure.cylinder_masses(3).values()) == pytest.approx(1.0)

    def test_holder_equilibrium_is_bernoulli(self, equilibrium, full2, geometric):
        # Arrange
        potential = geometric(6, 1.0, 1.0)
        weight = 1.0 - 2.0 ** -6
        p_one = math.exp(weight) / (1 + math.exp(weight))

        # Act
        measure = equilibrium.rpf_solve(full2, potential).measure

        # Assert
        assert measure.mass((1,)) == pytest.approx(p_one, abs=1e-9)
        assert measure.mass((1, 0, 1)) == pytest.approx(p_one ** 2 * (1 - p_one), abs=1e-9)


class TestMeasures:
    """Test cases for integrals, marginals and distances."""

    def test_integral(self, equilibrium, weighted):
        measure = bernoulli_measure([1 / 3, 2 / 3])
        assert equilibrium.integral(measure, weighted).midpoint == pytest.approx(2 / 3 * math.log(2))

    def test_weak_star_distance(self, equilibrium):
        first = bernoulli_measure([0.5, 0.5])
        second = bernoulli_measure([0.25, 0.75])
        assert equilibrium.weak_star_distance(first, second, 1) == pytest.approx(0.25)

    def test_empirical_equilibrium_of_the_full_shift_is_uniform(self, equilibrium, full2, zero):
        # Act
        measure = equilibrium.empirical_equilibrium(full2, zero, DyadicScale(1), 6, 2)

        # Assert
        assert measure.total == pytest.approx(1.0)
        assert measure.mass((0, 1)) == pytest.approx(0.25)

    def test_marginal_depth_is_bounded(self, equilibrium, full2, zero):
        with pytest.raises(DepthError, match="needs 1 <= k"):
            equilibrium.empirical_equilibrium(full2, zero, DyadicScale(2), 4, 4)

    def test_scale_independence(self, equilibrium, golden, zero):
        report = equilibrium.scale_independence_check(golden, zero, 10, 1, exponents=(1, 2), tolerance=0.1)
        assert report.passed


class TestGibbsAndVariational:
    """Test cases for the Gibbs bounds and the variational principle."""

    def test_bernoulli_is_exactly_gibbs(self, equilibrium, full2, weighted):
        # Arrange
        measure = equilibrium.rpf_solve(full2, weighted).measure

        # Act
        upper = equilibrium.gibbs_upper_check(full2, weighted, DyadicScale(1), range(1, 5), measure)
        lower = equilibrium.gibbs_lower_check(
            full2, weighted, TrivialDecomposition(), 0, DyadicScale(1), range(1, 5), measure
        )

        # Assert
        assert upper.passed
        assert upper.q_upper == pytest.approx(1.0)
        assert lower.passed
        assert lower.q_lower == pytest.approx(1.0)

    def test_golden_parry_is_gibbs(self, equilibrium, golden, zero):
        measure = equilibrium.rpf_solve(golden, zero).measure
        upper = equilibrium.gibbs_upper_check(golden, zero, DyadicScale(2), range(1, 9), measure)
        assert upper.passed
        assert upper.q_upper < 10

    def test_upper_ratio_uses_the_ball_supremum(self, equilibrium, potentials, full2, geometric):
        # Arrange
        potential = geometric(3)
        measure = equilibrium.rpf_solve(full2, potential).measure
        pressure = equilibrium.pressure_oracle(full2, potential).midpoint
        extrema = potentials.class_extrema(full2, potential, 3, 1)
        expected = max(
            math.exp(math.log(measure.mass(w)) + 3 * pressure - hi + extrema.slack)
            for w, (lo, hi) in extrema.classes.items()
        )

        # Act
        report = equilibrium.gibbs_upper_check(full2, potential, DyadicScale(2), [3], measure)

        # Assert
        assert report.rows[0]["max"] == pytest.approx(expected)
        assert report.passed

    def test_mismatched_measure_fails_the_upper_bound(self, equilibrium, full2, weighted):
        # Arrange
        uniform = bernoulli_measure([0.5, 0.5])

        # Act
        report = equilibrium.gibbs_upper_check(full2, weighted, DyadicScale(1), range(1, 7), uniform)

        # Assert
        assert report.growing
        assert not report.passed
        assert report.rows[-1]["max"] == pytest.approx(1.5 ** 6)

    def test_upper_bound_respects_the_q_budget(self, equilibrium, full2, weighted):
        # Arrange
        measure = equilibrium.rpf_solve(full2, weighted).measure

        # Act
        report = equilibrium.gibbs_upper_check(full2, weighted, DyadicScale(1), range(1, 5), measure, q_budget=0.5)

        # Assert
        assert not report.growing
        assert not report.passed

    def test_holder_rpf_measure_is_gibbs(self, equilibrium, full2, geometric):
        # Arrange
        potential = geometric(4, 1.0, 0.5)
        measure = equilibrium.rpf_solve(full2, potential).measure

        # Act
        upper = equilibrium.gibbs_upper_check(full2, potential, DyadicScale(1), range(1, 13), measure)
        lower = equilibrium.gibbs_lower_check(
            full2, potential, TrivialDecomposition(), 0, DyadicScale(1), range(1, 13), measure
        )

        # Assert
        assert upper.passed
        assert not upper.growing
        assert lower.passed
        assert not lower.decaying
        assert lower.q_lower <= upper.q_upper
        assert upper.rows[-1]["table_max"] <= upper.rows[-1]["max"]

    def test_holder_empirical_measure_has_a_bounded_upper_ratio(self, equilibrium, full2, geometric):
        # Arrange
        potential = geometric(4)
        measure = equilibrium.empirical_equilibrium(full2, potential, DyadicScale(1), 14, 14)

        # Act
        report = equilibrium.gibbs_upper_check(full2, potential, DyadicScale(1), range(1, 15), measure)

        # Assert
        assert report.passed
        assert not report.growing
        assert report.q_upper <= report.q_budget

    def test_variational_principle(self, equilibrium, golden, zero):
        # Act
        report = equilibrium.variational_check(golden, zero, [cycle_measure((0, 1))])

        # Assert
        assert report.passed
        assert report.rows[0].gap == pytest.approx(GOLDEN_LOG)
        assert report.rows[-1].name == "rpf"
        assert report.rows[-1].attains

    def test_candidates_must_live_on_the_system(self, equilibrium, golden, zero):
        with pytest.raises(ConfigurationError, match="inadmissible word 11"):
            equilibrium.variational_check(golden, zero, [bernoulli_measure([0.5, 0.5])])
