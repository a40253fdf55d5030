"""Expansivity sets, block entropies and the combinatorial entropy lemmas."""

from typing import Dict, List, Optional, Sequence, Tuple
import logging
import math

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.special import entr

from ..interfaces.base import ConfigurationError
from ..interfaces.measure import ICylinderMass
from ..domain.intervals import ValueInterval
from ..domain.measures import MarkovMeasure
from ..domain.reports import (
    AdaptedPartitionDescriptor,
    CheckReport,
    EntropyEstimate,
    EntropyExpansivityReport,
    GammaDescriptor,
    HammingReport,
    InequalityRow,
    StirlingReport,
)
from ..domain.symbolic import DyadicScale, Point, ShiftSystem, Word
from .equilibrium_service import EquilibriumService

# pairs of words compared per numpy chunk
_CHUNK = 256


class EntropyService:
    """Entropy estimates and expansivity diagnostics for shift-invariant measures."""

    def __init__(self, equilibrium: EquilibriumService, entropy_tolerance: float = 1e-3) -> None:
        self.equilibrium = equilibrium
        self.symbolic = equilibrium.symbolic
        self.entropy_tolerance = entropy_tolerance
        self.logger = logging.getLogger(__name__)

    def gamma_set(
        self, system: ShiftSystem, x: Point, eps: DyadicScale, horizon: Optional[int] = None
    ) -> GammaDescriptor:
        """Points staying eps-close to x under every iterate, described by a window.

        Below scale 1 the set is {x}; ``horizon`` bounds the iterates examined
        and the window [-(N+m-1), N+m-1] is what they pin down.
        """
        if eps.is_degenerate:
            return GammaDescriptor(x, eps, horizon or 0, None, exact=True, degenerate=True)
        m = eps.exponent
        horizon = m if horizon is None else horizon
        reach = horizon + m - 1
        return GammaDescriptor(x, eps, horizon, (-reach, reach), exact=horizon >= m, degenerate=False)

    def ne_mass(self, system: ShiftSystem, measure: ICylinderMass, eps: DyadicScale) -> float:
        """mu(NE(eps)): the whole space at scale 1, nothing below it."""
        return measure.mass(()) if eps.is_degenerate else 0.0

    def h_star(self, system: ShiftSystem, measure: ICylinderMass, eps: DyadicScale) -> float:
        """Essential supremum of the entropy of Gamma_eps(x)."""
        if eps.is_degenerate:
            return self.equilibrium.topological_entropy(system)
        return 0.0

    def block_entropy(self, measure: ICylinderMass, length: int) -> float:
        """Shannon entropy of the length-cylinder partition."""
        if length == 0:
            return 0.0
        masses = np.fromiter(measure.cylinder_masses(length).values(), dtype=float)
        return float(entr(masses).sum())

    def plugin_entropy(self, measure: ICylinderMass, depth: int, n_max: int) -> EntropyEstimate:
        """H(A^n) for the depth-cylinder partition A, n = 1..n_max."""
        if depth < 1 or n_max < 1:
            raise ConfigurationError("Plug-in entropy needs depth >= 1 and n_max >= 1")
        blocks = [self.block_entropy(measure, n + depth - 1) for n in range(1, n_max + 1)]
        increments = [b - a for a, b in zip([0.0] + blocks, blocks)]
        estimate = increments[-1]
        subadditive = all(
            blocks[a + b - 1] <= blocks[a - 1] + blocks[b - 1] + 1e-12
            for a in range(1, n_max + 1)
            for b in range(1, n_max + 1 - a)
        )
        return EntropyEstimate(f"H(A^n), depth {depth}", blocks, increments, estimate, subadditive)

    def conditional_entropy(self, measure: ICylinderMass, a_depth: int, b_depth: int, n: int) -> float:
        """H(B^n | A^n) for cylinder partitions of the given depths."""
        joint = self.block_entropy(measure, n + max(a_depth, b_depth) - 1)
        return joint - self.block_entropy(measure, n + a_depth - 1)

    def chain_rule_check(
        self, measure: ICylinderMass, a_depth: int, b_depth: int, n_max: int, tolerance: float = 1e-12
    ) -> CheckReport:
        """H((A v B)^n) = H(A^n) + H(B^n | A^n)."""
        report = CheckReport("chain_rule", details={"a_depth": a_depth, "b_depth": b_depth})
        for n in range(1, n_max + 1):
            joint = self.block_entropy(measure, n + max(a_depth, b_depth) - 1)
            split = self.block_entropy(measure, n + a_depth - 1) + self.conditional_entropy(
                measure, a_depth, b_depth, n
            )
            report.rows.append(
                InequalityRow(f"n={n}", ValueInterval.point(abs(joint - split)), ValueInterval.point(tolerance))
            )
        return report

    def partition_diameter(self, depth: int) -> float:
        """Diameter of the centred cylinders of the given length."""
        return 2.0 ** -((depth - 1) // 2 + 1)

    def aee_check(
        self,
        system: ShiftSystem,
        measure: MarkovMeasure,
        eps: DyadicScale,
        a_depth: int,
        n_max: int,
        tolerance: Optional[float] = None,
    ) -> EntropyExpansivityReport:
        """h(mu) <= h(mu, A) + h*(mu, eps) for a partition A of diameter at most eps."""
        tolerance = self.entropy_tolerance if tolerance is None else tolerance
        diameter = self.partition_diameter(a_depth)
        if diameter > eps.value:
            raise ConfigurationError(
                f"Cylinders of length {a_depth} have diameter {diameter}, above {eps}"
            )
        estimate = self.plugin_entropy(measure, a_depth, n_max)
        report = EntropyExpansivityReport(
            eps=eps,
            partition_depth=a_depth,
            partition_diameter=diameter,
            partition_entropy=estimate.estimate,
            measure_entropy=self.equilibrium.markov_entropy(measure),
            h_star=self.h_star(system, measure, eps),
            tolerance=tolerance,
            estimate=estimate,
        )
        self.logger.info(
            f"Entropy of {measure.name}: h={report.measure_entropy:.9f}, "
            f"h(A)={report.partition_entropy:.9f}, h*={report.h_star:.9f}"
        )
        return report

    def hamming_check(
        self, system: ShiftSystem, b_depth: int, delta: DyadicScale, beta: float, n: int
    ) -> HammingReport:
        """Codings at Hamming distance above beta n give Bowen distance above 2 delta."""
        if b_depth < 1 or n < 1:
            raise ConfigurationError("Hamming checks need b_depth >= 1 and n >= 1")
        length = n + b_depth - 1
        words = self.symbolic.enumerate_words(system, length)
        self.symbolic.budget.require(len(words) ** 2, f"Hamming check over words of length {length}")
        table = np.array(words, dtype=np.int64).reshape(len(words), length)
        threshold = 2 * delta.value
        claims = 0
        counterexamples: List[Tuple[Word, Word]] = []
        for start in range(0, len(words), _CHUNK):
            block = table[start:start + _CHUNK]
            diff = block[:, None, :] != table[None, :, :]
            codings = sliding_window_view(diff, b_depth, axis=2).any(axis=-1)
            hamming = codings.sum(axis=2)
            first = np.where(diff.any(axis=2), diff.argmax(axis=2), length)
            distance = np.power(2.0, -np.maximum(0, first - (n - 1)))
            claimed = hamming > beta * n
            claims += int(claimed.sum())
            for i, j in zip(*np.nonzero(claimed & (distance <= threshold))):
                if len(counterexamples) < 20:
                    counterexamples.append((words[start + int(i)], words[int(j)]))
        self.symbolic.budget.charge(len(words) ** 2, "Hamming pairs")
        return HammingReport(n, delta, beta, b_depth, len(words) ** 2, claims, counterexamples)

    def stirling_bound_check(self, n_max: int, betas: Sequence[float]) -> StirlingReport:
        """Binomial tails against e^{n H(beta)} and the constants K(beta) for e^{-n beta log beta}."""
        betas = sorted(betas)
        if any(not 0 < b < 0.5 for b in betas):
            raise ConfigurationError("Stirling checks need every beta in (0, 1/2)")
        rows: List[Dict[str, object]] = []
        constants: Dict[float, float] = {}
        stabilizing: Dict[float, bool] = {}
        counterexamples: List[Tuple[int, float]] = []
        sums: Dict[Tuple[float, int], int] = {}
        for beta in betas:
            entropy = -beta * math.log(beta) - (1 - beta) * math.log(1 - beta)
            loose = -beta * math.log(beta)
            running, history = 0.0, []
            for n in range(1, n_max + 1):
                total = sum(math.comb(n, j) for j in range(int(math.floor(beta * n)) + 1))
                sums[(beta, n)] = total
                if math.log(total) > n * entropy + 1e-12:
                    counterexamples.append((n, beta))
                constant = total / math.exp(loose * n)
                running = max(running, constant)
                history.append(running)
                rows.append({
                    "beta": beta,
                    "n": n,
                    "sum": total,
                    "entropy_bound": math.exp(n * entropy),
                    "loose_constant": constant,
                })
            constants[beta] = running
            tail = history[-max(2, n_max // 4):]
            stabilizing[beta] = tail[-1] <= tail[0]
            if not stabilizing[beta]:
                self.logger.info(f"Constant K({beta}) keeps growing up to n={n_max}: {running:.4g}")
        monotone = all(
            sums[(a, n)] <= sums[(b, n)]
            for a, b in zip(betas, betas[1:])
            for n in range(1, n_max + 1)
        )
        return StirlingReport(n_max, rows, constants, stabilizing, monotone, counterexamples)

    def adapted_partition(self, system: ShiftSystem, n: int, gamma: DyadicScale) -> AdaptedPartitionDescriptor:
        """Window cylinders w with B_n(x, gamma/2) inside w inside the closed B_n(x, gamma)."""
        if gamma.exponent + 1 > self.symbolic.metric_horizon:
            raise ConfigurationError(f"Scale {gamma} lies beyond the metric horizon")
        window = self.symbolic.ball_window(n, gamma)
        inner = self.symbolic.ball_window(n, gamma.halve())
        elements = self.symbolic.enumerate_words(system, window[1] - window[0] + 1)
        members = set(elements)
        disjoint = len(members) == len(elements)
        # every finer inner-window cylinder must sit inside exactly one element
        inner_words = self.symbolic.enumerate_words(system, inner[1] - inner[0] + 1)
        covering = {w[1:-1] for w in inner_words} == members
        return AdaptedPartitionDescriptor(n, gamma, window, inner, elements, disjoint, covering)
