"""Level-2 large deviations: empirical measures, variational rate bounds and decay rates."""

from collections import Counter
from typing import Dict, Iterable, List, Optional, Sequence, Tuple
import logging
import math

import numpy as np
from scipy.optimize import linprog, minimize
from scipy.special import xlogy

from ..interfaces.base import ConfigurationError
from ..interfaces.measure import ICylinderMass, InfeasibleConstraintError
from ..interfaces.potential import IPotential
from ..domain.constraints import ConstraintSet
from ..domain.intervals import ValueInterval
from ..domain.measures import CylinderMeasure, MarkovMeasure
from ..domain.reports import (
    CheckReport,
    DecayProfile,
    DecayValue,
    InequalityRow,
    RateBound,
    RateReport,
)
from ..domain.symbolic import DyadicScale, Point, ShiftSystem, Word, word_to_string
from .equilibrium_service import EquilibriumService

# two-sided 95% normal quantile for Wilson intervals
_Z = 1.959963984540054


class LDPService:
    """Upper large-deviation bounds for empirical measures of equilibrium states."""

    def __init__(
        self,
        equilibrium: EquilibriumService,
        monte_carlo_samples: int = 4000,
        seed: int = 0,
        optimizer_tolerance: float = 1e-15,
    ) -> None:
        self.equilibrium = equilibrium
        self.potentials = equilibrium.potentials
        self.symbolic = equilibrium.symbolic
        self.monte_carlo_samples = monte_carlo_samples
        self.seed = seed
        self.optimizer_tolerance = optimizer_tolerance
        self.logger = logging.getLogger(__name__)

    def empirical_measure(self, x: Point, n: int, k: int) -> CylinderMeasure:
        """Depth-k marginal of E_n(x) = (1/n) sum_{j<n} delta_{sigma^j x}."""
        if n < 1 or k < 1:
            raise ConfigurationError(f"Empirical measures need n >= 1 and k >= 1, got n={n}, k={k}")
        window = x.window(0, n + k - 2)
        counts = Counter(window[i:i + k] for i in range(n))
        return CylinderMeasure(k, {w: c / n for w, c in counts.items()}, label=f"E_{n}")

    def _polytope(
        self, system: ShiftSystem, constraints: ConstraintSet, length: int
    ) -> Tuple[List[Word], np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Invariant length-words distributions: stationarity, total mass 1 and A."""
        words = self.symbolic.enumerate_words(system, length)
        index = {w: i for i, w in enumerate(words)}
        stems = sorted({w[1:] for w in words} | {w[:-1] for w in words})
        eq_rows: List[np.ndarray] = []
        for u in stems:
            row = np.zeros(len(words))
            for w, i in index.items():
                if w[1:] == u:
                    row[i] += 1.0
                if w[:-1] == u:
                    row[i] -= 1.0
            if row.any():
                eq_rows.append(row)
        eq_rows.append(np.ones(len(words)))
        eq_bounds = [0.0] * (len(eq_rows) - 1) + [1.0]

        ub_rows: List[np.ndarray] = []
        ub_bounds: List[float] = []
        for constraint in constraints.constraints:
            k = constraint.depth
            row = np.array([constraint.coefficients.get(w[:k], 0.0) for w in words])
            if constraint.sense == "<=":
                ub_rows.append(row)
                ub_bounds.append(constraint.bound)
            elif constraint.sense == ">=":
                ub_rows.append(-row)
                ub_bounds.append(-constraint.bound)
            else:
                eq_rows.append(row)
                eq_bounds.append(constraint.bound)
        a_ub = np.array(ub_rows) if ub_rows else np.zeros((0, len(words)))
        return words, np.array(eq_rows), np.array(eq_bounds), a_ub, np.array(ub_bounds)

    def _interior_point(
        self, a_eq: np.ndarray, b_eq: np.ndarray, a_ub: np.ndarray, b_ub: np.ndarray
    ) -> np.ndarray:
        """A feasible distribution maximizing its smallest entry."""
        size = a_eq.shape[1]
        cost = np.zeros(size + 1)
        cost[-1] = -1.0
        floor_rows = np.hstack([-np.eye(size), np.ones((size, 1))])
        ub = np.vstack([np.hstack([a_ub, np.zeros((a_ub.shape[0], 1))]), floor_rows])
        ub_bounds = np.concatenate([b_ub, np.zeros(size)])
        eq = np.hstack([a_eq, np.zeros((a_eq.shape[0], 1))])
        result = linprog(cost, A_ub=ub, b_ub=ub_bounds, A_eq=eq, b_eq=b_eq,
                         bounds=[(0, 1)] * (size + 1), method="highs")
        if result.status != 0:
            raise InfeasibleConstraintError(f"No invariant measure satisfies the constraints: {result.message}")
        return np.clip(result.x[:-1], 0.0, None)

    def feasible(self, system: ShiftSystem, constraints: ConstraintSet, order: int = 1) -> bool:
        """Whether some invariant measure of the given Markov order lies in A."""
        if constraints.is_everything:
            return True
        length = max(order + 1, constraints.depth)
        _, a_eq, b_eq, a_ub, b_ub = self._polytope(system, constraints, length)
        try:
            self._interior_point(a_eq, b_eq, a_ub, b_ub)
        except InfeasibleConstraintError:
            return False
        return True

    def rate_upper_bound(
        self,
        system: ShiftSystem,
        potential: IPotential,
        constraints: ConstraintSet,
        order: Optional[int] = None,
    ) -> RateBound:
        """max over order-k Markov measures nu in A of h(nu) + integral of phi - P(phi)."""
        order = order or max(1, potential.depth - 1, constraints.depth - 1)
        length = order + 1
        if potential.depth > length or constraints.depth > length:
            raise ConfigurationError(
                f"Markov order {order} cannot see potentials or constraints of depth above {length}"
            )
        words, a_eq, b_eq, a_ub, b_ub = self._polytope(system, constraints, length)
        start = self._interior_point(a_eq, b_eq, a_ub, b_ub)
        phi = np.array([potential.value(w[:potential.depth]) for w in words])
        stems = sorted({w[:-1] for w in words})
        stem_index = {u: i for i, u in enumerate(stems)}
        source = np.array([stem_index[w[:-1]] for w in words])
        marginal = np.zeros((len(stems), len(words)))
        marginal[source, np.arange(len(words))] = 1.0

        def entropy(m: np.ndarray) -> float:
            m = np.clip(m, 0.0, None)
            pi = marginal @ m
            return float(xlogy(m, pi[source]).sum() - xlogy(m, m).sum())

        def objective(m: np.ndarray) -> float:
            return -(entropy(m) + float(phi @ np.clip(m, 0.0, None)))

        def gradient(m: np.ndarray) -> np.ndarray:
            mm = np.maximum(m, 1e-300)
            pi = np.maximum(marginal @ mm, 1e-300)
            return -(np.log(pi[source]) - np.log(mm) + phi)

        constraints_list = [{"type": "eq", "fun": lambda m: a_eq @ m - b_eq, "jac": lambda m: a_eq}]
        if a_ub.shape[0]:
            constraints_list.append({"type": "ineq", "fun": lambda m: b_ub - a_ub @ m, "jac": lambda m: -a_ub})
        result = minimize(
            objective, start, jac=gradient, bounds=[(0.0, 1.0)] * len(words),
            constraints=constraints_list, method="SLSQP",
            options={"ftol": self.optimizer_tolerance, "maxiter": 1000},
        )
        if not result.success:
            self.logger.warning(f"Rate optimization on {constraints.name} stopped early: {result.message}")
        m = np.clip(result.x, 0.0, None)
        m = m / m.sum()
        h = entropy(m)
        integral = float(phi @ m)
        pressure = self.equilibrium.pressure_oracle(system, potential).midpoint
        bound = RateBound(
            value=h + integral - pressure,
            entropy=h,
            integral=integral,
            pressure=pressure,
            order=order,
            argmax={word_to_string(w): float(v) for w, v in zip(words, m) if v > 1e-15},
            converged=bool(result.success),
            candidate_class=f"markov order {order}",
        )
        self.logger.info(f"Rate bound over {constraints.name}: {bound.value:.10f} (h={h:.8f})")
        return bound

    def empirical_decay_rate(
        self,
        system: ShiftSystem,
        measure: ICylinderMass,
        constraints: ConstraintSet,
        n_values: Iterable[int],
        samples: Optional[int] = None,
        seed: Optional[int] = None,
    ) -> DecayProfile:
        """(1/n) log mu{x : E_n(x) in A} per n, exactly for frequency constraints."""
        n_values = sorted(set(n_values))
        if not n_values or n_values[0] < 1:
            raise ConfigurationError("Decay rates need n >= 1")
        if constraints.is_everything:
            values = [DecayValue(n, 0.0, 0.0, 0.0, "trivial") for n in n_values]
            return DecayProfile(constraints.name, values, extrapolated=0.0)
        if not self.feasible(system, constraints, max(1, constraints.depth - 1)):
            self.logger.info(f"Constraint set {constraints.name} is infeasible on {system.name}")
            values = [DecayValue(n, -math.inf, -math.inf, -math.inf, "infeasible") for n in n_values]
            return DecayProfile(constraints.name, values, extrapolated=-math.inf, infeasible=True)
        if not isinstance(measure, MarkovMeasure):
            raise ConfigurationError("Decay rates need a Markov measure")

        if constraints.depth == 1:
            values = self._count_tail(system, measure, constraints, n_values)
        else:
            rng = np.random.default_rng(self.seed if seed is None else seed)
            values = [
                self._sample_tail(measure, constraints, n, samples or self.monte_carlo_samples, rng)
                for n in n_values
            ]
        return DecayProfile(constraints.name, values, extrapolated=self._extrapolate(values))

    def _count_tail(
        self, system: ShiftSystem, measure: MarkovMeasure, constraints: ConstraintSet, n_values: Sequence[int]
    ) -> List[DecayValue]:
        """Transfer-matrix convolution over symbol counts."""
        k = system.k
        symbols = np.array(measure.symbols)
        masks = [symbols == a for a in range(k)]
        layer: Dict[Tuple[int, ...], np.ndarray] = {}
        for a in range(k):
            vec = measure.stationary * masks[a]
            if vec.any():
                layer[tuple(int(a == b) for b in range(k))] = vec
        targets = set(n_values)
        out: List[DecayValue] = []
        for n in range(1, max(n_values) + 1):
            if n in targets:
                probability = sum(
                    float(vec.sum())
                    for counts, vec in layer.items()
                    if constraints.satisfied({1: {(a,): counts[a] / n for a in range(k)}})
                )
                out.append(self._exact_value(n, probability, len(layer)))
            if n == max(n_values):
                break
            nxt: Dict[Tuple[int, ...], np.ndarray] = {}
            for counts, vec in layer.items():
                step = vec @ measure.transition
                for a in range(k):
                    part = step * masks[a]
                    if part.any():
                        key = counts[:a] + (counts[a] + 1,) + counts[a + 1:]
                        nxt[key] = nxt[key] + part if key in nxt else part
            layer = nxt
            self.symbolic.budget.charge(len(layer), "Symbol-count convolution")
        return out

    def _exact_value(self, n: int, probability: float, terms: int) -> DecayValue:
        if probability <= 0:
            return DecayValue(n, -math.inf, -math.inf, -math.inf, "exact")
        value = math.log(probability) / n
        # each tail probability carries about n rounded products and the final sum
        enclosure = ValueInterval.rounded(value, 2 * n + terms)
        return DecayValue(n, value, enclosure.lower, enclosure.upper, "exact")

    def _sample_tail(
        self,
        measure: MarkovMeasure,
        constraints: ConstraintSet,
        n: int,
        samples: int,
        rng: np.random.Generator,
    ) -> DecayValue:
        """Monte Carlo estimate with a Wilson interval on the hit frequency."""
        depth = constraints.depth
        length = n + depth - 1
        symbols = np.array(measure.symbols)
        cumulative = np.cumsum(measure.transition, axis=1)
        size = len(measure.labels)
        states = rng.choice(size, size=samples, p=measure.stationary / measure.stationary.sum())
        paths = np.empty((samples, length), dtype=np.int64)
        paths[:, 0] = symbols[states]
        for j in range(1, length):
            u = rng.random(samples)
            states = np.minimum((u[:, None] > cumulative[states]).sum(axis=1), size - 1)
            paths[:, j] = symbols[states]
        depths = sorted({c.depth for c in constraints.constraints})
        hits = 0
        for row in paths:
            word = tuple(int(a) for a in row)
            marginals = {
                d: {w: c / n for w, c in Counter(word[i:i + d] for i in range(n)).items()} for d in depths
            }
            hits += int(constraints.satisfied(marginals))
        self.symbolic.budget.charge(samples, "Monte Carlo empirical measures")
        p_hat = hits / samples
        denominator = 1 + _Z ** 2 / samples
        centre = (p_hat + _Z ** 2 / (2 * samples)) / denominator
        half = _Z * math.sqrt(p_hat * (1 - p_hat) / samples + _Z ** 2 / (4 * samples ** 2)) / denominator
        lo, hi = max(0.0, centre - half), min(1.0, centre + half)
        upper = math.log(hi) / n
        if hits == 0:
            self.logger.debug(f"No Monte Carlo hits at n={n}: decay rate bounded above only")
            return DecayValue(n, None, -math.inf, upper, "monte_carlo", hits, samples)
        lower = math.log(lo) / n if lo > 0 else -math.inf
        return DecayValue(n, math.log(p_hat) / n, lower, upper, "monte_carlo", hits, samples)

    def _extrapolate(self, values: Sequence[DecayValue]) -> Optional[float]:
        """Constant term of a least-squares fit on 1, log n / n and 1 / n."""
        points = [(v.n, v.value) for v in values if v.value is not None and math.isfinite(v.value) and v.n > 1]
        if len(points) < 3:
            return None
        ns = np.array([float(n) for n, _ in points])
        design = np.column_stack([np.ones_like(ns), np.log(ns) / ns, 1.0 / ns])
        coefficients, *_ = np.linalg.lstsq(design, np.array([v for _, v in points]), rcond=None)
        return float(coefficients[0])

    def upper_energy_check(
        self,
        system: ShiftSystem,
        potential: IPotential,
        measure: ICylinderMass,
        gamma: DyadicScale,
        n_max: int,
        q: Optional[float] = None,
    ) -> CheckReport:
        """sup_x (1/n)(log mu(B_n(x, gamma)) + S_n e(x)) <= Var(phi, gamma) + (log Q)/n, e = P - phi."""
        pressure = self.equilibrium.pressure_oracle(system, potential)
        variation = self.potentials.variation(potential, gamma)
        if q is None:
            gibbs = self.equilibrium.gibbs_upper_check(
                system, potential, gamma, range(1, n_max + 1), measure, pressure.midpoint
            )
            q = gibbs.q_upper
        report = CheckReport(
            "upper_energy",
            details={"gamma": str(gamma), "q": q, "pressure": pressure.midpoint, "sup": {}},
        )
        for n in range(1, n_max + 1):
            extrema = self.potentials.class_extrema(system, potential, n, gamma.radius)
            best = -math.inf
            for window, (lo, _) in extrema.classes.items():
                mass = measure.mass(window)
                if mass > 0:
                    best = max(best, (math.log(mass) + n * pressure.midpoint - lo + extrema.slack) / n)
            report.details["sup"][n] = best
            lhs = ValueInterval.rounded(best, n + 6).widen(pressure.width)
            rhs = variation + ValueInterval.rounded(math.log(q) / n, 4)
            report.rows.append(InequalityRow(f"n={n}", lhs, rhs))
        self.logger.info(f"Upper energy check at {gamma}: {'pass' if report.passed else 'fail'}")
        return report

    def ldp_upper_check(
        self,
        system: ShiftSystem,
        potential: IPotential,
        constraints: ConstraintSet,
        n_max: int,
        measure: Optional[MarkovMeasure] = None,
        order: Optional[int] = None,
        c_max: float = 2.0,
        n_min: int = 2,
    ) -> RateReport:
        """Empirical decay rates against the variational bound plus C log n / n."""
        if n_max < n_min:
            raise ConfigurationError(f"n_max={n_max} is below n_min={n_min}")
        measure = measure or self.equilibrium.rpf_solve(system, potential).measure
        bound = self.rate_upper_bound(system, potential, constraints, order)
        decay = self.empirical_decay_rate(system, measure, constraints, range(n_min, n_max + 1))
        fitted = 0.0
        margins: Dict[int, ValueInterval] = {}
        for value in decay.values:
            slack = c_max * math.log(value.n) / value.n
            margins[value.n] = ValueInterval(
                bound.value + slack - value.upper, bound.value + slack - value.lower
            )
            if math.isfinite(value.lower):
                fitted = max(fitted, (value.lower - bound.value) * value.n / math.log(value.n))
        report = RateReport(bound, decay, fitted, c_max, margins)
        self.logger.info(
            f"LDP check on {constraints.name}: bound {bound.value:.8f}, "
            f"extrapolated decay {decay.extrapolated}, fitted C {fitted:.4f}"
        )
        return report
