"""Two-scale partition sums, pressure estimates and partition-sum inequalities."""

from itertools import combinations
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union
import logging
import math

import numpy as np
from scipy.special import logsumexp

from ..interfaces.base import ConfigurationError
from ..interfaces.collection import ISegmentCollection
from ..interfaces.potential import IPotential
from ..domain.collections import AllSegments, Union as UnionSegments
from ..domain.intervals import ValueInterval
from ..domain.reports import CheckReport, InequalityRow, PartitionSumValue, PressureEstimate
from ..domain.symbolic import DyadicScale, ShiftSystem
from .potential_service import PotentialService

# number of trailing ratio estimates that bracket the pressure
_BRACKET_WINDOW = 5


def compositions(n: int, parts: int) -> List[Tuple[int, ...]]:
    """All ordered splits of n into ``parts`` positive integers."""
    if parts < 1 or n < parts:
        return []
    return [
        tuple(b - a for a, b in zip((0,) + cut, cut + (n,)))
        for cut in combinations(range(1, n), parts - 1)
    ]


def log_add(a: ValueInterval, b: ValueInterval) -> ValueInterval:
    """Enclosure of log(e^a + e^b)."""
    lower = ValueInterval.rounded(float(np.logaddexp(a.lower, b.lower)), 3).lower
    upper = ValueInterval.rounded(float(np.logaddexp(a.upper, b.upper)), 3).upper
    return ValueInterval(lower, upper)


class PressureService:
    """Computes Lambda(C, phi, delta, eps, n) and pressure estimates."""

    def __init__(self, potentials: PotentialService) -> None:
        self.potentials = potentials
        self.symbolic = potentials.symbolic
        self.logger = logging.getLogger(__name__)

    def partition_sum(
        self,
        system: ShiftSystem,
        collection: Optional[ISegmentCollection],
        potential: IPotential,
        delta: DyadicScale,
        eps: Optional[DyadicScale],
        n: int,
    ) -> PartitionSumValue:
        """log of the supremum over maximal (n, delta)-separated sets of sum e^{Phi_eps}.

        ``eps=None`` uses the one-scale weights e^{Phi_0}.
        """
        if n < 1:
            raise ConfigurationError(f"Partition sums need n >= 1, got {n}")
        collection = collection or AllSegments()
        rc = delta.radius
        rg = rc if eps is None else min(eps.radius, rc)
        fast = (
            collection.is_everything
            and potential.is_locally_constant
            and potential.depth - 1 <= rg
        )
        if fast:
            value, operations = self._transfer_sum(system, potential, n, rc)
            log_value = ValueInterval.rounded(value, operations)
            return PartitionSumValue(log_value, n, delta, eps, classes=-1, method="transfer")

        extrema = self.potentials.class_extrema(
            system, potential, n, rc, None if eps is None else eps.radius, collection
        )
        log_value = self._log_sum(np.array([hi for _, hi in extrema.classes.values()]), extrema.slack)
        return PartitionSumValue(log_value, n, delta, eps, classes=len(extrema), method="classes")

    def _log_sum(self, exponents: np.ndarray, slack: float) -> ValueInterval:
        if exponents.size == 0:
            return ValueInterval.point(-math.inf)
        value = float(logsumexp(exponents))
        return ValueInterval.rounded(value, int(exponents.size) + 4).widen(slack)

    def _transfer_sum(
        self, system: ShiftSystem, potential: IPotential, n: int, radius: int
    ) -> Tuple[float, int]:
        """Log-domain sum of e^{Phi_0} over admissible windows [-radius, n-1+radius]."""
        d = potential.depth
        table = potential.table
        length = n + 2 * radius
        first, last = radius + d - 1, radius + n + d - 2
        layer: Dict[tuple, float] = {(system.rule.initial_state, ()): 0.0}
        operations = 0
        for position in range(length):
            weighted = first <= position <= last
            nxt: Dict[tuple, float] = {}
            for (state, tail), log_weight in layer.items():
                for a in system.alphabet.symbols:
                    q = system.safe_step(state, a)
                    if q is None:
                        continue
                    block = tail + (a,)
                    w = log_weight + table[block] if weighted else log_weight
                    key = (q, block[-(d - 1):] if d > 1 else ())
                    nxt[key] = float(np.logaddexp(nxt[key], w)) if key in nxt else w
                    operations += 1
            layer = nxt
        self.symbolic.budget.charge(operations, "Transfer-matrix partition sum")
        if not layer:
            return -math.inf, 0
        # one addition and one logaddexp per position, then the final logsumexp
        return float(logsumexp(list(layer.values()))), 4 * length + 4

    def pressure(
        self,
        system: ShiftSystem,
        collection: Optional[ISegmentCollection],
        potential: IPotential,
        delta: DyadicScale,
        eps: Optional[DyadicScale],
        n_max: int,
    ) -> PressureEstimate:
        """Ratio-method estimate of limsup (1/n) log Lambda(C, phi, delta, eps, n)."""
        if n_max < 4:
            raise ConfigurationError(f"Pressure estimates need n_max >= 4, got {n_max}")
        collection = collection or AllSegments()
        values = [
            self.partition_sum(system, collection, potential, delta, eps, n)
            for n in range(1, n_max + 1)
        ]
        logs = [v.log_value.midpoint for v in values]
        pads = [v.log_value.width for v in values]
        for v in values:
            self.logger.debug(f"log Lambda({collection.name}, n={v.n}) = {v.log_value}")

        if all(v.is_empty for v in values):
            self.logger.info(f"Collection {collection.name} is empty up to n={n_max}")
            return PressureEstimate(
                collection.name, delta, eps, values, [], 0.0, ValueInterval.point(0.0),
                monotone=True, empty_collection=True,
            )

        if any(v.is_empty for v in values[n_max // 2:]):
            tail = [(v.n, v.log_value) for v in values[n_max // 2:] if not v.is_empty]
            rates = [ValueInterval(iv.lower / n, iv.upper / n) for n, iv in tail]
            estimate = max(r.midpoint for r in rates)
            return PressureEstimate(
                collection.name, delta, eps, values, [], estimate, ValueInterval.hull_of(rates),
                monotone=False, sparse=True,
            )

        ratios = [b - a for a, b in zip(logs, logs[1:]) if math.isfinite(a) and math.isfinite(b)]
        estimate = 0.5 * (logs[-1] - logs[-3])
        recent = ratios[-_BRACKET_WINDOW:]
        pad = 2 * max(pads[-_BRACKET_WINDOW - 1:])
        bracket = ValueInterval(min(recent + [estimate]), max(recent + [estimate])).widen(pad)
        half = ratios[len(ratios) // 2:]
        diffs = [b - a for a, b in zip(half, half[1:])]
        monotone = all(d <= 1e-12 for d in diffs) or all(d >= -1e-12 for d in diffs)
        self.logger.info(
            f"Pressure of {collection.name} at delta={delta}, eps={eps}: {estimate:.10f}"
        )
        return PressureEstimate(
            collection.name, delta, eps, values, ratios, estimate, bracket, monotone=monotone
        )

    def product_bound_check(
        self,
        system: ShiftSystem,
        potential: IPotential,
        gamma: DyadicScale,
        splits: Iterable[Sequence[int]],
    ) -> CheckReport:
        """Lambda(X, 2 gamma, n_1 + ... + n_k) <= prod_j Lambda(X, gamma, gamma, n_j)."""
        double = gamma.double()
        cache: Dict[int, ValueInterval] = {}

        def small(n: int) -> ValueInterval:
            if n not in cache:
                cache[n] = self.partition_sum(system, None, potential, gamma, gamma, n).log_value
            return cache[n]

        report = CheckReport("product_bound", details={"gamma": str(gamma)})
        for split in splits:
            split = tuple(split)
            n = sum(split)
            lhs = self.partition_sum(system, None, potential, double, None, n).log_value
            rhs = ValueInterval.point(0.0)
            for part in split:
                rhs = rhs + small(part)
            report.rows.append(InequalityRow(f"n={n} split={split}", lhs, rhs))
        return report

    def sandwich_check(
        self,
        system: ShiftSystem,
        collection: Optional[ISegmentCollection],
        potential: IPotential,
        delta: DyadicScale,
        eps: DyadicScale,
        n_values: Union[int, Iterable[int]],
    ) -> CheckReport:
        """e^{-n Var} Lambda(C,delta,eps,n) <= Lambda(C,delta,n) <= e^{n Var} Lambda(C,delta,eps,n)."""
        if isinstance(n_values, int):
            n_values = [n_values]
        var = self.potentials.variation(potential, eps)
        report = CheckReport("sandwich", details={"variation": var.to_dict()})
        for n in n_values:
            one = self.partition_sum(system, collection, potential, delta, None, n).log_value
            two = self.partition_sum(system, collection, potential, delta, eps, n).log_value
            spread = ValueInterval.point(n) * var
            report.rows.append(InequalityRow(f"n={n} upper", one, two + spread))
            report.rows.append(InequalityRow(f"n={n} lower", two - spread, one))
            report.rows.append(InequalityRow(f"n={n} monotone", one, two))
        return report

    def lower_bound_check(
        self,
        system: ShiftSystem,
        potential: IPotential,
        gamma: DyadicScale,
        n_max: int,
        oracle_pressure: Union[float, ValueInterval],
        tolerance: float = 1e-9,
    ) -> CheckReport:
        """log Lambda(X, gamma, gamma, n) >= n P(phi) - tolerance for n <= n_max."""
        oracle = oracle_pressure if isinstance(oracle_pressure, ValueInterval) else ValueInterval.point(oracle_pressure)
        report = CheckReport("lower_bound", details={"gamma": str(gamma), "oracle": oracle.to_dict()})
        for n in range(1, n_max + 1):
            value = self.partition_sum(system, None, potential, gamma, gamma, n).log_value
            target = ValueInterval.point(n) * oracle - tolerance
            report.rows.append(InequalityRow(f"n={n}", target, value))
        return report

    def monotonicity_check(
        self,
        system: ShiftSystem,
        collection: Optional[ISegmentCollection],
        potential: IPotential,
        exponents: Sequence[int],
        n_max: int,
    ) -> CheckReport:
        """Lambda grows as delta shrinks and as eps grows, along a dyadic ladder."""
        ladder = sorted(set(exponents))
        report = CheckReport("monotonicity", details={"ladder": ladder})
        finest = DyadicScale(ladder[-1])
        for n in range(1, n_max + 1):
            for coarse, fine in zip(ladder, ladder[1:]):
                eps = finest
                lhs = self.partition_sum(system, collection, potential, DyadicScale(coarse), eps, n)
                rhs = self.partition_sum(system, collection, potential, DyadicScale(fine), eps, n)
                report.rows.append(InequalityRow(f"n={n} delta 2^-{coarse} -> 2^-{fine}", lhs.log_value, rhs.log_value))
                delta = finest
                small_eps = self.partition_sum(system, collection, potential, delta, DyadicScale(fine), n)
                large_eps = self.partition_sum(system, collection, potential, delta, DyadicScale(coarse), n)
                report.rows.append(InequalityRow(f"n={n} eps 2^-{fine} -> 2^-{coarse}", small_eps.log_value, large_eps.log_value))
        return report

    def union_check(
        self,
        system: ShiftSystem,
        first: ISegmentCollection,
        second: ISegmentCollection,
        potential: IPotential,
        delta: DyadicScale,
        eps: Optional[DyadicScale],
        n_max: int,
    ) -> CheckReport:
        """Lambda(C u C') <= Lambda(C) + Lambda(C')."""
        union = UnionSegments(first, second)
        report = CheckReport("union", details={"collections": [first.name, second.name]})
        for n in range(1, n_max + 1):
            joint = self.partition_sum(system, union, potential, delta, eps, n).log_value
            a = self.partition_sum(system, first, potential, delta, eps, n).log_value
            b = self.partition_sum(system, second, potential, delta, eps, n).log_value
            report.rows.append(InequalityRow(f"n={n}", joint, log_add(a, b)))
        return report
