"""Spectral pressure oracles, approximate equilibrium states and Gibbs checks."""

from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple
import logging
import math

import networkx as nx
import numpy as np
from scipy.special import xlogy

from ..interfaces.base import ConfigurationError
from ..interfaces.decomposition import IDecompositionRule
from ..interfaces.measure import DepthError, ICylinderMass, ReducibleMatrixError
from ..interfaces.potential import IPotential
from ..domain.collections import GoodCore
from ..domain.intervals import ULP, ValueInterval
from ..domain.measures import CylinderMeasure, MarkovMeasure, Presentation, RPFSolution
from ..domain.reports import CheckReport, GibbsReport, InequalityRow, VariationalReport, VariationalRow
from ..domain.symbolic import DyadicScale, ShiftSystem, Word, word_to_string
from .potential_service import PotentialService


class EquilibriumService:
    """Builds RPF oracles and the measures nu_n, mu_n, and checks Gibbs bounds."""

    def __init__(
        self,
        potentials: PotentialService,
        eigen_residual: float = 1e-12,
        spectral_gap_warning: float = 1e-6,
        variational_tolerance: float = 1e-9,
        power_tolerance: float = 1e-13,
        power_iterations: int = 100_000,
        gibbs_q_budget: float = 1e3,
    ) -> None:
        self.potentials = potentials
        self.symbolic = potentials.symbolic
        self.eigen_residual = eigen_residual
        self.spectral_gap_warning = spectral_gap_warning
        self.variational_tolerance = variational_tolerance
        self.power_tolerance = power_tolerance
        self.power_iterations = power_iterations
        self.gibbs_q_budget = gibbs_q_budget
        self.logger = logging.getLogger(__name__)
        self._presentations: Dict[Tuple[ShiftSystem, Tuple], Presentation] = {}

    def presentation(self, system: ShiftSystem, potential: IPotential) -> Presentation:
        """Higher-block presentation over the recurrent automaton states."""
        # the key holds the system itself so its identity cannot be recycled
        key = (system, potential.fingerprint)
        if key not in self._presentations:
            self._presentations[key] = self._build(system, potential.depth, potential.value)
        return self._presentations[key]

    def _build(self, system: ShiftSystem, d: int, weight: Callable[[Word], float]) -> Presentation:
        found = set()
        for q0 in system.recurrent_states():
            layer: List[Tuple[Word, object]] = [((), q0)]
            for _ in range(d):
                layer = [
                    (word + (a,), nxt)
                    for word, q in layer
                    for a in system.alphabet.symbols
                    for nxt in [system.safe_step(q, a)]
                    if nxt is not None
                ]
            found.update((q, word) for word, q in layer)
        frontier = list(found)
        while frontier:
            q, word = frontier.pop()
            for a in system.alphabet.symbols:
                nxt = system.safe_step(q, a)
                if nxt is None:
                    continue
                vertex = (nxt, word[1:] + (a,))
                if vertex not in found:
                    found.add(vertex)
                    frontier.append(vertex)
        vertices = sorted(found, key=lambda v: (v[1], str(v[0])))
        self.symbolic.budget.charge(len(vertices), "Building the higher-block presentation")
        index = {v: i for i, v in enumerate(vertices)}
        adjacency = np.zeros((len(vertices), len(vertices)))
        for (q, word), i in index.items():
            for a in system.alphabet.symbols:
                nxt = system.safe_step(q, a)
                if nxt is not None:
                    adjacency[i, index[(nxt, word[1:] + (a,))]] = 1.0
        weights = np.array([weight(word) for _, word in vertices])
        presentation = Presentation(vertices, adjacency, weights)
        self.logger.debug(f"Presentation of {system.name} at depth {d}: {len(vertices)} vertices")
        return presentation

    def _components(self, presentation: Presentation) -> List[List[int]]:
        graph = nx.from_numpy_array(presentation.adjacency, create_using=nx.DiGraph)
        out = []
        for component in nx.strongly_connected_components(graph):
            members = sorted(component)
            if len(members) > 1 or graph.has_edge(members[0], members[0]):
                out.append(members)
        return out

    def _spectral_pressure(self, presentation: Presentation) -> float:
        best = -math.inf
        for component in self._components(presentation):
            matrix = presentation.restrict(component).weighted_matrix()
            radius = float(np.max(np.abs(np.linalg.eigvals(matrix))))
            best = max(best, math.log(radius))
        return best

    def table_pressure(self, system: ShiftSystem, table: Mapping[Word, float]) -> float:
        """Spectral pressure of a locally constant table given directly by its values."""
        depth = len(next(iter(table)))
        return self._spectral_pressure(self._build(system, depth, lambda word: table[word]))

    def pressure_oracle(self, system: ShiftSystem, potential: IPotential) -> ValueInterval:
        """P(phi) as the largest log spectral radius over irreducible components."""
        presentation = self.presentation(system, potential)
        best = self._spectral_pressure(presentation)
        pad = 64 * presentation.size * ULP * max(1.0, abs(best)) if math.isfinite(best) else 0.0
        value = ValueInterval.around(best, pad).widen(potential.remainder)
        self.logger.info(f"Spectral pressure of {potential.name} on {system.name}: {value}")
        return value

    def topological_entropy(self, system: ShiftSystem) -> float:
        """log of the spectral radius of the recurrent automaton, edges counted per symbol."""
        graph = system.transition_graph()
        best = -math.inf
        for component in nx.strongly_connected_components(graph):
            states = sorted(component, key=str)
            if len(states) == 1 and not graph.has_edge(states[0], states[0]):
                continue
            index = {q: i for i, q in enumerate(states)}
            counts = np.zeros((len(states), len(states)))
            for q in states:
                for nxt, data in graph[q].items():
                    if nxt in index:
                        counts[index[q], index[nxt]] = len(data["symbols"])
            best = max(best, math.log(float(np.max(np.abs(np.linalg.eigvals(counts))))))
        return best

    def rpf_solve(self, system: ShiftSystem, potential: IPotential) -> RPFSolution:
        """Leading eigendata of B = e^phi A and the equilibrium Markov chain."""
        presentation = self.presentation(system, potential)
        components = self._components(presentation)
        if len(components) != 1:
            raise ReducibleMatrixError(
                f"Transition matrix of {system.name} has {len(components)} irreducible components"
            )
        if len(components[0]) < presentation.size:
            self.logger.debug(f"Dropping {presentation.size - len(components[0])} transient vertices")
            presentation = presentation.restrict(components[0])

        matrix = presentation.weighted_matrix()
        eigenvalues = np.linalg.eigvals(matrix)
        guess = float(np.max(eigenvalues.real))
        right = self._power_iteration(matrix, guess)
        left = self._power_iteration(matrix.T, guess)
        eigenvalue = float(left @ matrix @ right) / float(left @ right)

        residual = max(
            float(np.abs(matrix @ right - eigenvalue * right).max()),
            float(np.abs(left @ matrix - eigenvalue * left).max()),
        ) / eigenvalue
        if residual > self.eigen_residual:
            self.logger.warning(f"Relative eigen-residual {residual:.3e} exceeds {self.eigen_residual:.0e}")
        # deflation check: the remaining spectrum must stay away from the Perron root
        moduli = sorted(np.abs(eigenvalues), reverse=True)
        second = float(moduli[1]) if len(moduli) > 1 else 0.0
        gap_warning = eigenvalue - second < self.spectral_gap_warning
        if gap_warning:
            self.logger.warning(
                f"Second eigenvalue modulus {second:.9g} is within "
                f"{self.spectral_gap_warning:.0e} of {eigenvalue:.9g}"
            )

        transition = matrix * right[None, :] / (eigenvalue * right[:, None])
        drift = float(np.abs(transition.sum(axis=1) - 1.0).max())
        if drift > 1e-12:
            self.logger.debug(f"Renormalizing transition rows off by {drift:.3e}")
        transition = transition / transition.sum(axis=1, keepdims=True)
        stationary = left * right / float(left @ right)
        measure = MarkovMeasure(
            labels=presentation.labels,
            stationary=stationary / stationary.sum(),
            transition=transition,
            name=f"rpf[{system.name},{potential.name}]",
        )
        return RPFSolution(eigenvalue, left, right, measure, residual, gap_warning, second)

    def _power_iteration(self, matrix: np.ndarray, shift: float) -> np.ndarray:
        """Perron vector of an irreducible non-negative matrix, scaled to max entry 1.

        Iterates with B + shift I, which is primitive with the same Perron
        vector, so periodic matrices converge too.
        """
        shifted = matrix + shift * np.eye(len(matrix))
        vector = np.ones(len(matrix))
        previous = math.inf
        for iteration in range(1, self.power_iterations + 1):
            following = shifted @ vector
            following = following / following.max()
            change = float(np.abs(following - vector).max())
            vector = following
            if change <= self.power_tolerance:
                self.logger.debug(f"Power iteration converged after {iteration} steps")
                break
            # rounding noise floor: further steps cannot improve the vector
            if change < 1e3 * self.power_tolerance and change >= previous:
                self.logger.debug(f"Power iteration stalled at change {change:.3e} after {iteration} steps")
                break
            previous = change
        else:
            self.logger.warning(
                f"Power iteration stopped after {self.power_iterations} steps at change {change:.3e}"
            )
        return vector

    def markov_entropy(self, measure: MarkovMeasure) -> float:
        """-sum_i pi_i sum_j P_ij log P_ij."""
        return float(-(measure.stationary[:, None] * xlogy(measure.transition, measure.transition)).sum())

    def integral(self, measure: ICylinderMass, potential: IPotential) -> ValueInterval:
        """The integral of phi against a shift-invariant measure."""
        masses = measure.cylinder_masses(potential.depth)
        value = sum(m * potential.value(w) for w, m in masses.items())
        return ValueInterval.rounded(value, len(masses) + 2).widen(potential.remainder)

    def empirical_equilibrium(
        self,
        system: ShiftSystem,
        potential: IPotential,
        rho: DyadicScale,
        n: int,
        k: int,
    ) -> CylinderMeasure:
        """Depth-k marginal of mu_n, the shift average of the weighted separated-set measure nu_n."""
        r = rho.radius
        if k < 1 or k > n - r:
            raise DepthError(f"Marginal depth {k} needs 1 <= k <= n - {r} at n={n}")
        extrema = self.potentials.class_extrema(system, potential, n, r)
        keys = list(extrema.classes)
        his = np.array([extrema.classes[key][1] for key in keys])
        weights = np.exp(his - his.max()) / (n - k + 1)
        masses: Dict[Word, float] = {}
        for key, weight in zip(keys, weights):
            central = key[r:r + n]
            for i in range(n - k + 1):
                block = central[i:i + k]
                masses[block] = masses.get(block, 0.0) + float(weight)
        measure = CylinderMeasure(k, masses, label=f"mu_{n}[{rho}]").normalized()
        self.logger.debug(f"mu_{n} at {rho}: {len(keys)} classes, shift defect {measure.shift_defect:.3e}")
        return measure

    def weak_star_distance(self, first: ICylinderMass, second: ICylinderMass, k: int) -> float:
        """Total variation distance between depth-k marginals."""
        a = first.cylinder_masses(k)
        b = second.cylinder_masses(k)
        return 0.5 * sum(abs(a.get(w, 0.0) - b.get(w, 0.0)) for w in set(a) | set(b))

    def gibbs_lower_check(
        self,
        system: ShiftSystem,
        potential: IPotential,
        rule: IDecompositionRule,
        margin: int,
        rho: DyadicScale,
        n_range: Iterable[int],
        measure: ICylinderMass,
        pressure: Optional[float] = None,
    ) -> GibbsReport:
        """inf over (x, n) in G^M of mu(B_n(x, rho)) e^{nP - Phi_0(x, n)}."""
        pressure = self._pressure(system, potential, pressure)
        rows = self._gibbs_rows(system, potential, GoodCore(rule, margin), rho, n_range, measure, pressure, "lower")
        mins = [row["min"] for row in rows]
        trend = [row["table_min"] for row in rows]
        decaying = min(trend, default=0.0) > 0 and _steadily_growing([1 / m for m in trend])
        report = GibbsReport(
            "lower", rho, rows,
            q_lower=min(mins, default=0.0),
            q_upper=max((row["max"] for row in rows), default=0.0),
            decaying=decaying,
        )
        self.logger.info(f"Gibbs lower check on G^{margin}: Q = {report.q_lower:.6g}, decaying={decaying}")
        return report

    def gibbs_upper_check(
        self,
        system: ShiftSystem,
        potential: IPotential,
        gamma: DyadicScale,
        n_range: Iterable[int],
        measure: ICylinderMass,
        pressure: Optional[float] = None,
        q_budget: Optional[float] = None,
    ) -> GibbsReport:
        """sup over all (x, n) of mu(B_n(x, gamma)) e^{nP - Phi_gamma(x, n)}.

        Bounded means the per-n maxima stay under ``q_budget`` and show no
        steady geometric growth of the tabulated ratios over the tested range.
        """
        pressure = self._pressure(system, potential, pressure)
        q_budget = self.gibbs_q_budget if q_budget is None else q_budget
        rows = self._gibbs_rows(system, potential, None, gamma, n_range, measure, pressure, "upper")
        maxes = [row["max"] for row in rows]
        report = GibbsReport(
            "upper", gamma, rows,
            q_lower=min((row["min"] for row in rows), default=0.0),
            q_upper=max(maxes, default=math.inf),
            growing=_steadily_growing([row["table_max"] for row in rows]),
            q_budget=q_budget,
        )
        self.logger.info(
            f"Gibbs upper check at {gamma}: Q = {report.q_upper:.6g} (budget {q_budget:g}), "
            f"growing={report.growing}"
        )
        return report

    def _pressure(self, system: ShiftSystem, potential: IPotential, pressure: Optional[float]) -> float:
        if pressure is not None:
            return pressure
        return self.pressure_oracle(system, potential).midpoint

    def _gibbs_rows(
        self,
        system: ShiftSystem,
        potential: IPotential,
        collection,
        scale: DyadicScale,
        n_range: Iterable[int],
        measure: ICylinderMass,
        pressure: float,
        kind: str,
    ) -> List[Dict[str, float]]:
        """Per-n enclosures of the Gibbs ratio over the ball windows.

        A window's Birkhoff sums span [lo, hi] up to ``slack``. The lower
        ratio uses Phi_0 of each point in the window, so it ranges over
        [lo, hi]; the upper ratio uses Phi_gamma, the sup over the ball, hi.
        ``min``/``max`` enclose the ratio; ``table_min``/``table_max`` are the
        same extrema of the tabulated sums, without the n * remainder slack.
        """
        rows: List[Dict[str, float]] = []
        for n in n_range:
            extrema = self.potentials.class_extrema(system, potential, n, scale.radius, None, collection)
            if not extrema.classes:
                continue
            low, high = math.inf, 0.0
            table_low, table_high = math.inf, 0.0
            for window, (lo, hi) in extrema.classes.items():
                mass = measure.mass(window)
                if mass <= 0:
                    self.logger.debug(f"Measure vanishes on the ball window {word_to_string(window)}")
                    low = table_low = 0.0
                    continue
                base = math.log(mass) + n * pressure
                least = hi if kind == "upper" else lo
                low = min(low, math.exp(base - hi - extrema.slack))
                high = max(high, math.exp(base - least + extrema.slack))
                table_low = min(table_low, math.exp(base - hi))
                table_high = max(table_high, math.exp(base - least))
            rows.append({
                "n": n,
                "min": low,
                "max": high,
                "table_min": table_low,
                "table_max": table_high,
                "classes": len(extrema),
            })
        return rows

    def variational_check(
        self,
        system: ShiftSystem,
        potential: IPotential,
        candidates: Sequence[MarkovMeasure],
        tolerance: Optional[float] = None,
        include_rpf: bool = True,
    ) -> VariationalReport:
        """h(mu) + integral of phi <= P(phi) for each candidate, with equality at the RPF measure."""
        tolerance = self.variational_tolerance if tolerance is None else tolerance
        pressure = self.pressure_oracle(system, potential)
        measures = list(candidates)
        if include_rpf:
            rpf = self.rpf_solve(system, potential).measure
            rpf.name = "rpf"
            measures.append(rpf)
        rows = []
        for measure in measures:
            self._check_support(system, measure, potential.depth + 1)
            entropy = self.markov_entropy(measure)
            integral = self.integral(measure, potential)
            gap = pressure.midpoint - entropy - integral.midpoint
            rows.append(VariationalRow(measure.name, entropy, integral.midpoint, gap, abs(gap) <= tolerance))
            self.logger.debug(f"{measure.name}: h={entropy:.12f}, int={integral.midpoint:.12f}, gap={gap:.3e}")
        return VariationalReport(pressure.midpoint, rows, tolerance)

    def _check_support(self, system: ShiftSystem, measure: ICylinderMass, length: int) -> None:
        for word, mass in measure.cylinder_masses(length).items():
            if mass > 0 and not system.accepts(word):
                raise ConfigurationError(
                    f"Measure charges the inadmissible word {word_to_string(word)} of {system.name}"
                )

    def scale_independence_check(
        self,
        system: ShiftSystem,
        potential: IPotential,
        n: int,
        k: int,
        exponents: Sequence[int] = (1, 2),
        tolerance: float = 5e-2,
    ) -> CheckReport:
        """Empirical mu_n built at different separation scales agree on depth-k cylinders."""
        measures = [
            self.empirical_equilibrium(system, potential, DyadicScale(m), n, k) for m in exponents
        ]
        report = CheckReport("scale_independence", details={"n": n, "k": k, "exponents": list(exponents)})
        for (m1, a), (m2, b) in zip(zip(exponents, measures), zip(exponents[1:], measures[1:])):
            distance = self.weak_star_distance(a, b, k)
            report.rows.append(
                InequalityRow(f"2^-{m1} vs 2^-{m2}", ValueInterval.point(distance), ValueInterval.point(tolerance))
            )
        return report


def _steadily_growing(values: Sequence[float], floor: float = 1e-6) -> bool:
    """Log-increments all positive and not slowing down, as for geometric growth."""
    if len(values) < 3 or min(values) <= 0:
        return False
    logs = [math.log(v) for v in values]
    steps = [b - a for a, b in zip(logs, logs[1:])]
    return all(step > floor for step in steps) and steps[-1] >= 0.5 * steps[0]
