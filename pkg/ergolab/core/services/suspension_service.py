"""Suspension flows: flow metrics, continuous-time partition sums and Abramov checks."""

from collections import Counter
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Sequence, Tuple
import logging
import math

import numpy as np
from scipy.optimize import bisect, minimize_scalar
from scipy.special import entr, logsumexp

from ..interfaces.admissibility import State
from ..interfaces.base import ConfigurationError
from ..interfaces.decomposition import IDecompositionRule
from ..interfaces.flow import BracketingError, IFlowCollection
from ..interfaces.potential import IPotential
from ..domain.collections import PrefixSegments, SuffixSegments
from ..domain.flows import (
    AllFlowSegments,
    BracketCollection,
    FlowPoint,
    FlowSegment,
    FlowUnion,
    LiftedBase,
    SuspensionFlow,
    Time,
)
from ..domain.intervals import ValueInterval
from ..domain.measures import MarkovMeasure
from ..domain.reports import (
    AbramovReport,
    Distance,
    FlowCertificate,
    FlowPartitionSum,
    FlowPressureEstimate,
    TimeBallReport,
)
from ..domain.symbolic import DyadicScale, Word
from .equilibrium_service import EquilibriumService

# fiber words: (w, K, lo, hi, S) with S the entry times of fibers 0..K+1
FiberWord = Tuple[Word, int, Fraction, Fraction, List[Fraction]]


class SuspensionService:
    """Evaluates the flow-side objects of a suspension over a shift."""

    def __init__(
        self,
        equilibrium: EquilibriumService,
        grid_divisor: int = 4,
        sample_pairs: int = 200,
        seed: int = 0,
        bisection_tolerance: float = 1e-10,
    ) -> None:
        self.equilibrium = equilibrium
        self.potentials = equilibrium.potentials
        self.symbolic = equilibrium.symbolic
        self.grid_divisor = grid_divisor
        self.sample_pairs = sample_pairs
        self.seed = seed
        self.bisection_tolerance = bisection_tolerance
        self.logger = logging.getLogger(__name__)

    def flow(self, flow: SuspensionFlow, p: FlowPoint, t: Time) -> FlowPoint:
        """f_t(p) with exact rational arithmetic."""
        q = flow.advance(p, t)
        self.logger.debug(f"f_{flow.time(t)}{p} = {q}")
        return q

    def flow_metric(
        self, flow: SuspensionFlow, p: FlowPoint, q: FlowPoint, horizon: Optional[int] = None
    ) -> float:
        """min over chart representatives of max(d(x, y), |s - u| / r_min), capped at 1."""
        r_min = flow.roof.r_min
        best = 1.0
        for x, s in flow.chart_representatives(p):
            for y, u in flow.chart_representatives(q):
                base = self.symbolic.metric(x, y, horizon).value
                best = min(best, max(base, float(abs(s - u) / r_min)))
        return best

    def flow_d_t(
        self,
        flow: SuspensionFlow,
        p: FlowPoint,
        q: FlowPoint,
        t: Time,
        grid: Time,
        horizon: Optional[int] = None,
    ) -> Distance:
        """max of the flow metric over s in {0, grid, 2 grid, ...} and s = t.

        ``value`` is a lower bound on sup_{s <= t}; ``upper`` adds the drift
        2 grid / r_min the scan can miss between grid points.
        """
        t, grid = flow.time(t), flow.time(grid)
        if grid <= 0:
            raise ConfigurationError(f"Time grid must be positive, got {grid}")
        if t < 0:
            raise ConfigurationError(f"Bowen distances need t >= 0, got {t}")
        value = self.flow_metric(flow, p, q, horizon)
        elapsed = Fraction(0)
        while elapsed < t:
            step = min(grid, t - elapsed)
            p, q = flow.advance(p, step), flow.advance(q, step)
            elapsed += step
            value = max(value, self.flow_metric(flow, p, q, horizon))
        upper = min(1.0, value + float(2 * grid / flow.roof.r_min)) if t > 0 else value
        return Distance(value, upper, truncated=upper > value)

    def time_t_ball_check(
        self,
        flow: SuspensionFlow,
        x: FlowPoint,
        eps: DyadicScale,
        n: int,
        t: Time,
        pairs: Optional[int] = None,
        seed: Optional[int] = None,
    ) -> TimeBallReport:
        """Compare B_{nt}(x, eps; F) with B_n(x, eps; f_t) under d_t on sampled points."""
        t = flow.time(t)
        if n < 1 or t <= 0:
            raise ConfigurationError(f"Time-t balls need n >= 1 and t > 0, got n={n}, t={t}")
        pairs = self.sample_pairs if pairs is None else pairs
        rng = np.random.default_rng(self.seed if seed is None else seed)
        # a grid dividing t makes the map-side grids tile the flow-side grid
        grid = t / math.ceil(t / (eps.exact / self.grid_divisor))
        horizon = eps.exponent + 1
        report = TimeBallReport(n, t, eps, grid, pairs, inside=0)
        for i in range(pairs):
            y = self._nearby(flow, x, eps, n * t, rng)
            flow_side = self.flow_d_t(flow, x, y, n * t, grid, horizon).value <= eps.value
            xs, ys, map_distance = x, y, 0.0
            for _ in range(n):
                map_distance = max(map_distance, self.flow_d_t(flow, xs, ys, t, grid, horizon).value)
                xs, ys = flow.advance(xs, t), flow.advance(ys, t)
            map_side = map_distance <= eps.value
            report.inside += int(flow_side)
            if flow_side != map_side:
                report.disagreements.append({"pair": i, "y": str(y), "flow": flow_side, "map": map_side})
        self.logger.info(
            f"Time-{t} balls at {eps}, n={n}: {report.inside}/{pairs} inside, "
            f"{len(report.disagreements)} disagreements"
        )
        return report

    def _nearby(
        self, flow: SuspensionFlow, x: FlowPoint, eps: DyadicScale, span: Fraction, rng: np.random.Generator
    ) -> FlowPoint:
        system = flow.base
        reach = math.ceil(span / flow.roof.r_min) + eps.exponent + 2
        original = x.base.window(-reach, reach)
        window = list(original)
        if rng.random() < 0.5:
            j = int(rng.integers(len(window)))
            window[j] = (window[j] + 1 + int(rng.integers(system.k - 1))) % system.k
        if not system.accepts(window):
            window = list(original)
        base = system.close_point(window).shift(reach)
        r_min = flow.roof.r_min
        height = x.height + Fraction(int(rng.integers(-64, 65)), 64) * eps.exact * r_min
        ceiling = flow.roof.value(base) - eps.exact * r_min / 64
        return FlowPoint(base, min(max(height, Fraction(0)), ceiling))

    def flow_partition_sum(
        self,
        flow: SuspensionFlow,
        collection: Optional[IFlowCollection],
        potential: IPotential,
        delta: DyadicScale,
        eps: Optional[DyadicScale],
        t: Time,
        grid: Optional[Time] = None,
    ) -> FlowPartitionSum:
        """log Lambda(C, phi, delta, eps, t) over grid-separated flow segments of length t.

        Candidates are base windows of the visited fibers times heights on a
        grid whose spacing exceeds delta r_min, so the grid set is
        (t, delta)-separated. ``eps=None`` uses the plain integral Phi_0.
        """
        t = flow.time(t)
        grid = delta.exact / self.grid_divisor if grid is None else flow.time(grid)
        if t < 0:
            raise ConfigurationError(f"Flow partition sums need t >= 0, got {t}")
        if not 0 < grid <= delta.exact / 2:
            raise ConfigurationError(f"Time grid {grid} must lie in (0, delta/2] for delta={delta}")
        if t == 0:
            self.logger.debug("Duration 0: the empty segment, partition sum degenerate")
            return FlowPartitionSum(
                ValueInterval.point(-math.inf), t, delta, eps, grid, 0, method="empty", degenerate=True
            )
        collection = collection or AllFlowSegments()
        radius = delta.radius
        r_min = flow.roof.r_min
        spacing = grid * (math.floor(delta.exact * r_min / grid) + 1)

        fast = (
            collection.is_everything
            and flow.roof.depth == 1
            and potential.depth == 1
            and potential.is_locally_constant
        )
        if fast:
            terms = self._fiber_transfer(flow, potential, radius, t, spacing)
            method = "transfer"
        else:
            terms = self._fiber_enumeration(flow, collection, potential, radius, t, spacing)
            method = "enumeration"
        if not terms:
            return FlowPartitionSum(ValueInterval.point(-math.inf), t, delta, eps, grid, 0, method)

        value = float(logsumexp(terms))
        operations = len(terms) + 4 * (math.ceil(t / r_min) + 2)
        allowance = self._height_allowance(flow, delta, spacing)
        allowance += 2 * float(spacing) * potential.amplitude
        if eps is not None:
            allowance += self._eps_slack(flow, potential, eps, t)
        lower = ValueInterval.rounded(value, operations).lower
        upper = ValueInterval.rounded(value + allowance, operations + 4).upper
        log_value = ValueInterval(lower, upper).widen(potential.remainder * float(t))
        self.logger.debug(f"log Lambda({collection.name}, t={t}) = {log_value} via {method}")
        return FlowPartitionSum(log_value, t, delta, eps, grid, len(terms), method)

    def _heights(self, lo: Fraction, hi: Fraction, spacing: Fraction) -> List[Fraction]:
        j = math.ceil(lo / spacing)
        out = []
        while j * spacing < hi:
            out.append(j * spacing)
            j += 1
        return out

    def _fiber_transfer(
        self, flow: SuspensionFlow, potential: IPotential, radius: int, t: Fraction, spacing: Fraction
    ) -> List[float]:
        """Log weights of the candidates, summed over base windows by recursion on fibers.

        f(q, tau) is the log of the sum over continuations from automaton state
        q entering a fresh fiber with tau time units left.
        """
        system = flow.base
        psi = {a: potential.value((a,)) for a in system.alphabet.symbols}
        roof = {a: flow.roof.value_word((a,)) for a in system.alphabet.symbols}
        memo: Dict[Tuple[State, Fraction], float] = {}

        def tail(q: State) -> float:
            count = self.symbolic.continuations(system, q, radius)
            return math.log(count) if count else -math.inf

        def f(q: State, tau: Fraction) -> float:
            key = (q, tau)
            if key in memo:
                return memo[key]
            terms = []
            for a in system.alphabet.symbols:
                qa = system.safe_step(q, a)
                if qa is None:
                    continue
                if roof[a] <= tau:
                    rest, weight = f(qa, tau - roof[a]), psi[a] * float(roof[a])
                else:
                    rest, weight = tail(qa), psi[a] * float(tau)
                if rest > -math.inf:
                    terms.append(weight + rest)
            memo[key] = float(logsumexp(terms)) if terms else -math.inf
            return memo[key]

        contexts = Counter(system.run(left) for left in self.symbolic.enumerate_words(system, radius))
        out: List[float] = []
        for q, multiplicity in sorted(contexts.items(), key=lambda item: str(item[0])):
            for a in system.alphabet.symbols:
                qa = system.safe_step(q, a)
                if qa is None:
                    continue
                for h in self._heights(Fraction(0), roof[a], spacing):
                    first = roof[a] - h
                    if first <= t:
                        rest, weight = f(qa, t - first), psi[a] * float(first)
                    else:
                        rest, weight = tail(qa), psi[a] * float(t)
                    if rest > -math.inf:
                        out.append(math.log(multiplicity) + weight + rest)
        self.symbolic.budget.charge(len(memo) * system.k + len(out), "Fiber transfer sum")
        return out

    def _fiber_words(
        self, flow: SuspensionFlow, state: State, t: Fraction, look: int
    ) -> Iterator[FiberWord]:
        """Words read from ``state`` listing the fibers visited within time t.

        Each yielded word holds the K + 1 visited fibers and the lookahead the
        roof and ``look`` require; [lo, hi) are the starting heights for
        which exactly those fibers are visited.
        """
        system, roof = flow.base, flow.roof
        need = max(look, roof.depth - 1)
        stack: List[Tuple[Word, State]] = [((), state)]
        while stack:
            word, q = stack.pop()
            fibers = len(word) - need
            if fibers >= 1:
                entries = [Fraction(0)]
                for k in range(fibers):
                    entries.append(entries[-1] + roof.value_word(word[k:k + roof.depth]))
                top = roof.value_word(word[:roof.depth])
                k_last = fibers - 1
                lo = max(Fraction(0), entries[k_last] - t)
                hi = min(top, entries[fibers] - t)
                if lo < hi:
                    yield word, k_last, lo, hi, entries
                if entries[fibers] - t >= top:
                    continue
            for a in reversed(system.alphabet.symbols):
                nxt = system.safe_step(q, a)
                if nxt is not None:
                    stack.append((word + (a,), nxt))

    def _segment_integral(
        self, potential: IPotential, word: Word, k_last: int, entries: Sequence[Fraction], h: Fraction, t: Fraction
    ) -> float:
        """Integral of the fiberwise potential along the segment from height h over [0, t]."""
        d = potential.depth
        total = 0.0
        for k in range(k_last + 1):
            start = max(entries[k] - h, Fraction(0))
            end = min(entries[k + 1] - h, t)
            total += potential.value(word[k:k + d]) * float(end - start)
        return total

    def _fiber_enumeration(
        self,
        flow: SuspensionFlow,
        collection: IFlowCollection,
        potential: IPotential,
        radius: int,
        t: Fraction,
        spacing: Fraction,
    ) -> List[float]:
        """Class maxima of the segment integral over explicitly enumerated windows."""
        system = flow.base
        look = potential.depth - 1
        need = max(look, flow.roof.depth - 1)
        extra = max(0, radius - need)
        best: Dict[Tuple[Word, Fraction], float] = {}
        visited = 0
        for left in self.symbolic.enumerate_words(system, radius):
            state = system.run(left)
            for word, k_last, lo, hi, entries in self._fiber_words(flow, state, t, look):
                heights = self._heights(lo, hi, spacing)
                if not heights:
                    continue
                for full in self.symbolic.extensions(system, left + word, 0, extra):
                    visited += len(heights)
                    key_word = full[: 2 * radius + k_last + 1]
                    point = None if collection.is_everything else system.close_point(full).shift(radius)
                    for h in heights:
                        if point is not None and not collection.contains(
                            flow, FlowSegment(FlowPoint(point, h), t)
                        ):
                            continue
                        weight = self._segment_integral(potential, word, k_last, entries, h, t)
                        key = (key_word, h)
                        best[key] = max(best.get(key, -math.inf), weight)
        self.symbolic.budget.charge(visited, "Flow candidate enumeration")
        return list(best.values())

    def _height_allowance(self, flow: SuspensionFlow, delta: DyadicScale, spacing: Fraction) -> float:
        """log of the most heights a separated set can place per grid height."""
        step = delta.exact * flow.roof.r_min
        ratio = max(
            Fraction(math.ceil(v / step), math.ceil(v / spacing)) for v in flow.roof.table.values()
        )
        return math.log(max(ratio, Fraction(1)))

    def _eps_slack(self, flow: SuspensionFlow, potential: IPotential, eps: DyadicScale, t: Fraction) -> float:
        """Bound on Phi_eps - Phi_0 over a segment of length t."""
        r_min, r_max = flow.roof.r_min, flow.roof.r_max
        ends = 2 * float(eps.exact * r_min) * potential.amplitude
        fibers = float(t / r_min) + 2
        return ends + fibers * float(r_max) * self.potentials.variation(potential, eps).upper

    def flow_pressure(
        self,
        flow: SuspensionFlow,
        collection: Optional[IFlowCollection],
        potential: IPotential,
        delta: DyadicScale,
        eps: Optional[DyadicScale],
        times: Sequence[Time],
        grid: Optional[Time] = None,
    ) -> FlowPressureEstimate:
        """Slopes (log Lambda(t) - log Lambda(t - 2)) / 2 at each requested t."""
        times = sorted(flow.time(t) for t in times)
        if not times or times[0] < 3:
            raise ConfigurationError("Flow pressure estimates need every t >= 3")
        collection = collection or AllFlowSegments()
        cache: Dict[Fraction, FlowPartitionSum] = {}

        def value(t: Fraction) -> FlowPartitionSum:
            if t not in cache:
                cache[t] = self.flow_partition_sum(flow, collection, potential, delta, eps, t, grid)
            return cache[t]

        slopes: List[float] = []
        brackets: List[ValueInterval] = []
        for t in times:
            now, before = value(t).log_value, value(t - 2).log_value
            if now.upper == -math.inf:
                slopes.append(-math.inf)
                continue
            if before.upper == -math.inf:
                slopes.append(now.lower / float(t))
                brackets.append(ValueInterval(now.lower / float(t), now.upper / float(t)))
                continue
            slopes.append((now.lower - before.lower) / 2)
            brackets.append(ValueInterval((now.lower - before.upper) / 2, (now.upper - before.lower) / 2))
        values = [cache[t] for t in sorted(cache)]
        if all(v.is_empty for v in values):
            self.logger.info(f"Flow collection {collection.name} is empty up to t={times[-1]}")
            return FlowPressureEstimate(
                collection.name, delta, eps, times, values, [0.0] * len(times), 0.0,
                ValueInterval.point(0.0), empty_collection=True,
            )
        estimate = slopes[-1] if math.isfinite(slopes[-1]) else 0.0
        bracket = brackets[-1] if brackets else ValueInterval.point(0.0)
        self.logger.info(f"Flow pressure of {collection.name} at t={times[-1]}: {estimate:.8f}")
        return FlowPressureEstimate(collection.name, delta, eps, times, values, slopes, estimate, bracket)

    def _induced(self, flow: SuspensionFlow, potential: Optional[IPotential]) -> Tuple[Dict[Word, float], Dict[Word, float]]:
        """Tables of r and of the fiber integral psi r over admissible base words."""
        d = max(flow.roof.depth, potential.depth if potential is not None else 1)
        roof: Dict[Word, float] = {}
        integral: Dict[Word, float] = {}
        for word in self.symbolic.enumerate_words(flow.base, d):
            r = float(flow.roof.value_word(word))
            psi = potential.value(word[:potential.depth]) if potential is not None else 0.0
            roof[word] = r
            integral[word] = psi * r
        return roof, integral

    def flow_pressure_root(self, flow: SuspensionFlow, potential: Optional[IPotential] = None) -> float:
        """The c with P_base(psi r - c r) = 0; ``potential=None`` means phi = 0."""
        roof, integral = self._induced(flow, potential)

        def excess(c: float) -> float:
            table = {w: integral[w] - c * roof[w] for w in roof}
            return self.equilibrium.table_pressure(flow.base, table)

        p0 = excess(0.0)
        if p0 == 0.0:
            return 0.0
        r_min, r_max = float(flow.roof.r_min), float(flow.roof.r_max)
        lo, hi = sorted((p0 / r_max, p0 / r_min))
        pad = 1e-6 * (1 + abs(hi))
        lo, hi = lo - pad, hi + pad
        f_lo, f_hi = excess(lo), excess(hi)
        if f_lo * f_hi > 0:
            raise BracketingError(
                f"P_base(psi r - c r) has no sign change on [{lo}, {hi}]: values {f_lo}, {f_hi}"
            )
        root = float(bisect(excess, lo, hi, xtol=self.bisection_tolerance))
        self.logger.info(f"Flow pressure root on {flow.name}: {root:.12f}")
        return root

    def flow_variation(self, flow: SuspensionFlow, potential: IPotential, eps: DyadicScale) -> ValueInterval:
        """Var(phi, eps) for phi(x, s) = psi(x): base variation and the jump across the roof."""
        table = potential.table
        if eps.is_degenerate:
            spread = max(table.values()) - min(table.values())
            return ValueInterval.point(spread).widen(2 * potential.remainder)
        base = self.potentials.variation(potential, eps)
        d = potential.depth
        words = self.symbolic.enumerate_words(flow.base, d + 1)
        jump = max((abs(potential.value(w[:d]) - potential.value(w[1:])) for w in words), default=0.0)
        return ValueInterval(max(base.lower, jump), max(base.upper, jump))

    def _visited_entropy(self, flow: SuspensionFlow, measure: MarkovMeasure, t: Fraction, mean_roof: float) -> float:
        probabilities = []
        for word, _, lo, hi, _ in self._fiber_words(flow, flow.base.rule.initial_state, t, 0):
            mass = measure.mass(word)
            if mass > 0:
                probabilities.append(mass * float(hi - lo) / mean_roof)
        self.symbolic.budget.charge(len(probabilities), "Visited-fiber partition")
        return float(entr(np.array(probabilities)).sum())

    def abramov_check(
        self,
        flow: SuspensionFlow,
        measure: MarkovMeasure,
        times: Sequence[Time],
        start: Optional[Time] = None,
        tolerance: float = 0.03,
    ) -> AbramovReport:
        """h(f_t) = t h(mu) / integral of r, against visited-fiber partition entropies.

        The estimate for f_t is H(T0 + t) - H(T0), where H(T) is the entropy of
        the partition of the suspension by the fibers visited up to time T.
        """
        times = sorted(flow.time(t) for t in times)
        if not times or times[0] <= 0:
            raise ConfigurationError("Abramov checks need positive times")
        t0 = flow.time(start) if start is not None else Fraction(math.ceil(4 * flow.roof.r_max))
        masses = measure.cylinder_masses(flow.roof.depth)
        mean_roof = sum(mass * float(flow.roof.value_word(w)) for w, mass in masses.items())
        base_entropy = self.equilibrium.markov_entropy(measure)
        oracle = base_entropy / mean_roof

        h0 = self._visited_entropy(flow, measure, t0, mean_roof)
        unit = self._visited_entropy(flow, measure, t0 + 1, mean_roof) - h0
        estimates = [self._visited_entropy(flow, measure, t0 + t, mean_roof) - h0 for t in times]
        xs = np.array([float(t) for t in times])
        slope = float(np.polyfit(xs, estimates, 1)[0]) if len(times) >= 2 else estimates[0] / xs[0]
        linear = abs(slope - unit) <= tolerance * abs(unit) if unit else abs(slope) <= 1e-12

        root = self.flow_pressure_root(flow)
        report = AbramovReport(
            times, estimates, slope, unit, linear, base_entropy, mean_roof, oracle, root,
            optimum=self._bernoulli_optimum(flow, root),
        )
        self.logger.info(
            f"Abramov on {flow.name}: oracle {oracle:.8f}, slope {slope:.8f}, root {root:.8f}"
        )
        return report

    def _bernoulli_optimum(self, flow: SuspensionFlow, root: float) -> Optional[Dict[str, float]]:
        """max_p H(p) / (r(0)(1-p) + r(1)p) over Bernoulli measures on the full 2-shift."""
        system = flow.base
        full = system.k == 2 and all(system.accepts((a, b)) for a in range(2) for b in range(2))
        if not full or flow.roof.depth != 1:
            return None
        r0, r1 = float(flow.roof.value_word((0,))), float(flow.roof.value_word((1,)))

        def negative_rate(p: float) -> float:
            return -float(entr(p) + entr(1 - p)) / (r0 * (1 - p) + r1 * p)

        result = minimize_scalar(negative_rate, bounds=(1e-12, 1 - 1e-12), method="bounded",
                                 options={"xatol": 1e-12})
        entropy = -float(result.fun)
        return {"p": float(result.x), "entropy": entropy, "gap": abs(entropy - root)}

    def bracket_collection(self, collection: IFlowCollection) -> BracketCollection:
        """[C], the integer-time collection used for flow specification."""
        return BracketCollection(collection)

    def flow_hypothesis_report(
        self,
        flow: SuspensionFlow,
        potential: IPotential,
        rule: IDecompositionRule,
        delta: DyadicScale,
        eps: DyadicScale,
        times: Sequence[Time] = (4, 5, 6),
        grid: Optional[Time] = None,
    ) -> FlowCertificate:
        """Margins for P([P] u [S], phi, delta) + Var(phi, eps) < P(phi) with lifted P and S."""
        obstruction = FlowUnion(
            self.bracket_collection(LiftedBase(PrefixSegments(rule))),
            self.bracket_collection(LiftedBase(SuffixSegments(rule))),
        )
        estimate = self.flow_pressure(flow, obstruction, potential, delta, None, times, grid)
        variation = self.flow_variation(flow, potential, eps)
        root = self.flow_pressure_root(flow, potential)
        oracle = ValueInterval.around(root, 2 * self.bisection_tolerance).widen(
            potential.remainder * float(flow.roof.r_max)
        )
        margins = {
            "pressure_gap": oracle - (estimate.bracket + variation),
            "scale_free": oracle - estimate.bracket,
        }
        verdicts = {name: margin.certified_positive() for name, margin in margins.items()}
        self.logger.info(
            f"Flow certificate on {flow.name}: obstruction {estimate.estimate:.6f}, "
            f"Var {variation}, P {root:.8f}, verdicts {verdicts}"
        )
        return FlowCertificate(delta, eps, estimate, variation, oracle, margins, verdicts)
