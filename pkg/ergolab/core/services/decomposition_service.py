"""Decompositions, specification gluing, Bowen distortion and hypothesis certificates."""

from itertools import product
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union
import logging
import math

import networkx as nx

from ..interfaces.admissibility import DegenerateScaleError
from ..interfaces.base import ConfigurationError
from ..interfaces.collection import ISegmentCollection
from ..interfaces.decomposition import GluingError, IDecompositionRule, ScaleLadderError
from ..interfaces.measure import ReducibleMatrixError
from ..interfaces.potential import IPotential
from ..domain.collections import (
    AllSegments,
    GoodCore,
    GoodSegments,
    Intersection,
    OutsideDomain,
    PrefixSegments,
    SuffixSegments,
    Union as UnionSegments,
)
from ..domain.intervals import ValueInterval
from ..domain.reports import (
    BowenReport,
    CoreDensityReport,
    Decomposition,
    GluingFailure,
    GluingResult,
    GluingSpec,
    HypothesisCertificate,
    SpecificationReport,
)
from ..domain.symbolic import DyadicScale, Point, ShiftSystem, Word, word_to_string
from .entropy_service import EntropyService
from .equilibrium_service import EquilibriumService
from .pressure_service import PressureService

# failure witnesses kept per specification report
_MAX_WITNESSES = 20
# points whose Bowen sets the expansivity block inspects
_EXPANSIVITY_SAMPLES = 8


class DecompositionService:
    """Checks the decomposition hypotheses of a (system, potential, rule) triple."""

    def __init__(
        self, pressure: PressureService, equilibrium: EquilibriumService, entropy: EntropyService
    ) -> None:
        self.pressure = pressure
        self.equilibrium = equilibrium
        self.entropy = entropy
        self.potentials = pressure.potentials
        self.symbolic = pressure.symbolic
        self.logger = logging.getLogger(__name__)
        self._canonical: Dict[Tuple[ShiftSystem, Word], Point] = {}

    def decompose(
        self, rule: IDecompositionRule, segment: Union[Point, Sequence[int]], n: Optional[int] = None
    ) -> Decomposition:
        """(p, g, s) for the segment (x, n), with its membership evidence."""
        if isinstance(segment, Point):
            if n is None:
                raise ConfigurationError("Decomposing a point needs the segment length n")
            word = segment.window(0, n - 1) if n > 0 else ()
        else:
            word = tuple(segment) if n is None else tuple(segment)[:n]
        if not word:
            return Decomposition(0, 0, 0, True, True, True)
        p, g, s = rule.split(word)
        if p + g + s != len(word) or min(p, g, s) < 0:
            raise ConfigurationError(
                f"Rule {rule.name} split {word_to_string(word)} into ({p}, {g}, {s})"
            )
        return Decomposition(
            p, g, s,
            prefix_ok=rule.in_prefix(word[:p]),
            good_ok=rule.is_good(word[p:p + g]) if g else True,
            suffix_ok=rule.in_suffix(word[p + g:]),
        )

    def canonical_point(self, system: ShiftSystem, word: Sequence[int]) -> Point:
        """The point a glued segment shadows: the periodic extension when admissible."""
        word = tuple(word)
        key = (system, word)
        if key not in self._canonical:
            if system.is_cycle_admissible(word):
                self._canonical[key] = Point.periodic(word)
            else:
                self._canonical[key] = system.close_point(word)
        return self._canonical[key]

    def search_limit(self, system: ShiftSystem) -> int:
        """Longest connector any gluing needs: the size of the transition graph."""
        return system.transition_graph().number_of_nodes()

    def gluing_spec(self, system: ShiftSystem) -> GluingSpec:
        """Shortest connector for each ordered symbol pair, from the cycle states."""
        graph = system.transition_graph()
        recurrent = system.recurrent_states()
        preferred = [system.cycle_state()] + [q for q in recurrent if q != system.cycle_state()]
        limit = self.search_limit(system)
        connectors: Dict[Tuple[int, int], Word] = {}
        for a in system.alphabet.symbols:
            for b in system.alphabet.symbols:
                for q0 in preferred:
                    after = system.safe_step(q0, a)
                    if after is None:
                        continue
                    found = system.connector(after, lambda q: system.safe_step(q, b) is not None, limit)
                    if found is not None:
                        connectors[(a, b)] = found[0]
                        break
        tau = max((len(c) for c in connectors.values()), default=0)
        lengths = dict(nx.all_pairs_shortest_path_length(graph.subgraph(recurrent)))
        diameter = max((d for row in lengths.values() for d in row.values()), default=0)
        self.logger.debug(f"Gluing spec for {system.name}: tau={tau}, recurrent diameter={diameter}")
        return GluingSpec(tau, connectors, diameter, limit)

    def glue(
        self,
        system: ShiftSystem,
        segments: Sequence[Sequence[int]],
        delta: DyadicScale,
        gluing: Optional[GluingSpec] = None,
    ) -> GluingResult:
        """A point shadowing each segment in turn at scale delta, with its gap times.

        Each junction uses the table connector for its symbol pair when the
        concatenation stays admissible, and otherwise the shortest automaton
        connector within ``gluing.search_limit``.
        """
        r = delta.radius
        gluing = gluing or self.gluing_spec(system)
        words = [tuple(w) for w in segments]
        if not words:
            return GluingResult(Point.periodic(system.rule.default_cycle()), [], [], True)
        for word in words:
            system.check_word(word)
        if len(words) == 1:
            return GluingResult(self.canonical_point(system, words[0]), [], [0], True)

        windows = [self.canonical_point(system, w).window(-r, len(w) - 1 + r) for w in words]
        body: List[int] = list(windows[0])
        state = system.run(windows[0])
        starts, gaps, connectors, searched = [0], [], [], 0
        for window in windows[1:]:
            pair = (body[-1], window[0])
            connector = gluing.connector(*pair)
            entry = system.run(connector, state) if connector is not None else None
            if entry is None or system.run(window, entry) is None:
                found = system.connector(
                    state, lambda q, w=window: system.run(w, q) is not None, gluing.search_limit
                )
                if found is None:
                    raise GluingError(
                        f"No connector of length <= {gluing.gap_bound} joins symbol {pair[0]} to symbol "
                        f"{pair[1]} on {system.name}",
                        pair,
                    )
                connector, entry = found
                searched += 1
            gaps.append(2 * r + len(connector))
            connectors.append(connector)
            body.extend(connector)
            starts.append(len(body))
            body.extend(window)
            state = system.run(window, entry)

        point = system.close_point(tuple(body)).shift(r)
        shadowing_ok = all(
            self.symbolic.in_ball(point.shift(start), self.canonical_point(system, w), len(w), delta)
            for start, w in zip(starts, words)
            if w
        )
        return GluingResult(point, gaps, starts, shadowing_ok, connectors, searched)

    def specification_check(
        self,
        system: ShiftSystem,
        collection: ISegmentCollection,
        delta: DyadicScale,
        tau: Optional[int],
        k_max: int,
        n_max: int,
        rule: Optional[IDecompositionRule] = None,
        margins: Sequence[int] = (),
        n0: int = 1,
    ) -> SpecificationReport:
        """Glue every tuple of collection segments with k <= k_max and n_i <= n_max."""
        if k_max < 1 or n_max < 1:
            raise ConfigurationError("Specification checks need k_max >= 1 and n_max >= 1")
        gluing = self.gluing_spec(system)
        if tau is not None:
            gluing = gluing.within(tau)
        limit = gluing.gap_bound
        r = delta.radius
        pool = self._pool(system, collection, range(1, n_max + 1))
        cases = sum(len(pool) ** k for k in range(2, k_max + 1))
        self.symbolic.budget.require(cases, f"Specification check on {collection.name}")
        report = SpecificationReport(collection.name, delta, limit, k_max, n_max)
        failures = 0
        for k in range(2, k_max + 1):
            for combo in product(pool, repeat=k):
                report.cases += 1
                try:
                    result = self.glue(system, combo, delta, gluing)
                except GluingError as e:
                    failures += 1
                    if len(report.failures) < _MAX_WITNESSES:
                        report.failures.append(GluingFailure(list(combo), str(e)))
                    continue
                worst = max(result.gaps, default=0)
                report.worst_gap = max(report.worst_gap, worst)
                if not result.shadowing_ok or worst > limit + 2 * r:
                    failures += 1
                    if len(report.failures) < _MAX_WITNESSES:
                        report.failures.append(GluingFailure(list(combo), "shadowing or gap bound violated"))
                    continue
                if k >= 3 and not self._causal(system, combo, pool, result, delta, gluing):
                    report.causality_ok = False
        self.symbolic.budget.charge(report.cases, "Gluing cases")
        if rule is not None:
            for margin in margins:
                report.core_reduction[margin] = self._core_reduction(
                    system, rule, margin, delta, gluing, n_max, n0
                )
        self.logger.info(
            f"Specification on {collection.name} at {delta}: {report.cases} cases, "
            f"{failures} failures, worst gap {report.worst_gap}"
        )
        return report

    def _pool(self, system: ShiftSystem, collection: ISegmentCollection, lengths) -> List[Word]:
        pool: List[Word] = []
        for n in lengths:
            words = collection.words(n, lambda length: self.symbolic.enumerate_words(system, length))
            pool.extend(w for w in words if system.accepts(w))
        return pool

    def _causal(
        self,
        system: ShiftSystem,
        combo: Tuple[Word, ...],
        pool: List[Word],
        result: GluingResult,
        delta: DyadicScale,
        gluing: GluingSpec,
    ) -> bool:
        """Replacing the last segment must not move the earlier gaps."""
        alternative = pool[0] if combo[-1] != pool[0] else pool[-1]
        try:
            other = self.glue(system, combo[:-1] + (alternative,), delta, gluing)
        except GluingError:
            return True
        return other.gaps[:-1] == result.gaps[:-1]

    def _core_reduction(
        self,
        system: ShiftSystem,
        rule: IDecompositionRule,
        margin: int,
        delta: DyadicScale,
        gluing: GluingSpec,
        n_max: int,
        n0: int,
    ) -> Dict[str, object]:
        """Glue G^M segments through their good cores for n >= N(M) = 2M + n0."""
        threshold = 2 * margin + n0
        lengths = sorted({threshold, max(threshold, n_max)})
        pool = self._pool(system, GoodCore(rule, margin), lengths)
        bound = 2 * margin + gluing.gap_bound + 2 * delta.radius
        cases, worst, failures = 0, 0, 0
        for first, second in product(pool, repeat=2):
            a = self.decompose(rule, first)
            b = self.decompose(rule, second)
            cases += 1
            cores = (first[a.p:a.p + a.g], second[b.p:b.p + b.g])
            try:
                result = self.glue(system, cores, delta, gluing)
            except GluingError:
                failures += 1
                continue
            gap = a.s + max(result.gaps, default=0) + b.p
            worst = max(worst, gap)
            if not (result.shadowing_ok and a.verified and b.verified) or gap > bound:
                failures += 1
        return {
            "margin": margin,
            "threshold": threshold,
            "cases": cases,
            "worst_gap": worst,
            "gap_bound": bound,
            "failures": failures,
            "passed": failures == 0,
        }

    def bowen_distortion(
        self,
        system: ShiftSystem,
        potential: IPotential,
        collection: Optional[ISegmentCollection],
        eps: DyadicScale,
        n_max: int,
        rule: Optional[IDecompositionRule] = None,
        margins: Sequence[int] = (),
    ) -> BowenReport:
        """sup |Phi_0(x, n) - Phi_0(y, n)| over collection segments and y in B_n(x, eps)."""
        if eps.is_degenerate:
            raise DegenerateScaleError("Bowen distortion needs a scale below 1")
        collection = collection or AllSegments()
        per_n = self._distortion(system, potential, collection, eps, n_max)
        constant = per_n[-1]
        variation = self.potentials.variation(potential, eps)
        report = BowenReport(
            collection.name, eps, per_n, constant, variation,
            analytic_bound=potential.analytic_bowen_bound(eps.exponent),
        )
        if rule is not None:
            for margin in margins:
                report.core_constants[margin] = constant + ValueInterval.point(2 * margin) * variation
                report.core_empirical[margin] = self._distortion(
                    system, potential, GoodCore(rule, margin), eps, n_max
                )[-1]
        self.logger.info(f"Bowen constant on {collection.name} at {eps}: {constant}")
        return report

    def _distortion(
        self,
        system: ShiftSystem,
        potential: IPotential,
        collection: ISegmentCollection,
        eps: DyadicScale,
        n_max: int,
    ) -> List[ValueInterval]:
        r = eps.radius
        running = ValueInterval.point(0.0)
        out: List[ValueInterval] = []
        for n in range(1, n_max + 1):
            extrema = self.potentials.class_extrema(system, potential, n, r, r, collection)
            spread = max((hi - lo for lo, hi in extrema.classes.values()), default=0.0)
            current = ValueInterval(max(0.0, spread - 2 * extrema.slack), spread + 2 * extrema.slack)
            running = ValueInterval(max(running.lower, current.lower), max(running.upper, current.upper))
            out.append(running)
        return out

    def hypothesis_certificate(
        self,
        system: ShiftSystem,
        potential: IPotential,
        rule: IDecompositionRule,
        delta: DyadicScale,
        eps: DyadicScale,
        margins: Sequence[int],
        n_max: int,
        k_max: int = 2,
        spec_n_max: Optional[int] = None,
        oracle: Optional[ValueInterval] = None,
    ) -> HypothesisCertificate:
        """Margins of the specification, Bowen and pressure-gap conditions."""
        ladder = delta.exponent - eps.exponent
        if ladder < 6:
            raise ScaleLadderError(
                f"Certificates need eps > 40 delta (2^-{eps.exponent} vs 2^-{delta.exponent}: "
                f"the exponents must differ by at least 6)"
            )
        if eps.is_degenerate:
            raise DegenerateScaleError("Certificates need eps below 1")
        margins = sorted(set(margins)) or [0]
        spec_n = spec_n_max or min(n_max, 4)

        specification = {
            m: self.specification_check(system, GoodCore(rule, m), delta, None, k_max, spec_n, rule, [m])
            for m in margins
        }
        bowen = self.bowen_distortion(system, potential, GoodSegments(rule), eps, n_max, rule, margins)
        obstruction_set = UnionSegments(PrefixSegments(rule), SuffixSegments(rule), OutsideDomain(rule))
        obstruction = self.pressure.pressure(system, obstruction_set, potential, delta, None, n_max)
        variation = self.potentials.variation(potential, eps)
        sharp_scale = DyadicScale.ceiling(15 * delta.value)
        sharp_variation = self.potentials.variation(potential, sharp_scale)
        oracle = oracle or self.equilibrium.pressure_oracle(system, potential)

        gap = oracle - obstruction.interval
        margin_values = {
            "II": ValueInterval.point(bowen.analytic_bound) - bowen.constant,
            "III": gap - variation,
            "III-sharp": gap - sharp_variation,
            "scale-free": gap,
        }
        verdicts = {
            "I": all(report.passed for report in specification.values()),
            "II": bowen.constant.is_finite
            and bowen.certified_within_analytic_bound
            and bowen.cores_certified,
            "III": margin_values["III"].certified_positive(),
            "III-sharp": margin_values["III-sharp"].certified_positive(),
            "scale-free": margin_values["scale-free"].certified_positive(),
        }
        not_refuted = {
            "I": verdicts["I"],
            "II": bowen.constant.is_finite
            and bowen.within_analytic_bound is not False
            and bowen.cores_within_formula,
        }
        for name in ("III", "III-sharp", "scale-free"):
            not_refuted[name] = margin_values[name].upper > 0
        expansivity = self.expansivity_check(system, potential, eps, oracle)
        certificate = HypothesisCertificate(
            delta, eps, 2 ** ladder, specification, bowen, obstruction, variation,
            oracle, margin_values, verdicts, expansivity, not_refuted,
        )
        self.logger.info(
            f"Certificate for {potential.name} on {system.name} with {rule.name}: "
            + ", ".join(f"{k}={'pass' if v else 'fail'}" for k, v in verdicts.items())
        )
        return certificate

    def expansivity_check(
        self,
        system: ShiftSystem,
        potential: IPotential,
        eps: DyadicScale,
        oracle: Optional[ValueInterval] = None,
    ) -> Dict[str, Any]:
        """Bowen sets Gamma_eps of sample points and the equilibrium mass of NE(eps).

        The verdict is "not computed" when the equilibrium chain is unavailable.
        """
        length = max(1, eps.exponent)
        limit = system.rule.max_word_length
        if limit is not None:
            length = min(length, limit)
        samples = [Point.periodic(system.rule.default_cycle())]
        samples += [
            self.canonical_point(system, w)
            for w in self.symbolic.enumerate_words(system, length)[:_EXPANSIVITY_SAMPLES]
        ]
        descriptors = [self.entropy.gamma_set(system, x, eps) for x in samples]
        empty = all(d.is_singleton for d in descriptors)
        try:
            measure = self.equilibrium.rpf_solve(system, potential).measure
            mass: Optional[float] = self.entropy.ne_mass(system, measure, eps)
        except ReducibleMatrixError as e:
            self.logger.warning(f"Skipping the non-expansive mass on {system.name}: {e}")
            mass = None

        if empty:
            obstruction, below = None, True
        else:
            # NE(eps) is the whole space, so its pressure is the full pressure
            oracle = oracle or self.equilibrium.pressure_oracle(system, potential)
            obstruction, below = oracle, False
        if mass is None:
            verdict = "not computed"
        elif empty and mass == 0.0:
            verdict = "no obstruction"
        else:
            verdict = "obstructed"
        self.logger.debug(f"Expansivity at {eps} on {system.name}: {verdict}")
        return {
            "eps": str(eps),
            "samples": len(samples),
            "windows": sorted({d.window for d in descriptors if d.window is not None}),
            "non_expansive_set_empty": empty,
            "ne_mass": mass,
            "obstruction_pressure": obstruction,
            "below_pressure": below,
            "verdict": verdict,
        }

    def core_density_check(
        self,
        system: ShiftSystem,
        potential: IPotential,
        rule: IDecompositionRule,
        gamma: DyadicScale,
        alpha_1: float,
        alpha_2: float,
        n_max: int,
        margins: Sequence[int],
        collection: Optional[ISegmentCollection] = None,
        oracle: Optional[ValueInterval] = None,
    ) -> CoreDensityReport:
        """Least M with Lambda(C & G^M, 2 gamma, 2 gamma, n) >= (1 - alpha_2) Lambda(C, 2 gamma, 2 gamma, n)."""
        if not (0 <= alpha_1 < 1 and 0 < alpha_2 < 1):
            raise ConfigurationError("Core density needs 0 <= alpha_1 < 1 and 0 < alpha_2 < 1")
        collection = collection or AllSegments()
        double = gamma.double()
        oracle = oracle or self.equilibrium.pressure_oracle(system, potential)
        keep = math.log(1 - alpha_2)
        floor = math.log(alpha_1) if alpha_1 > 0 else -math.inf
        base = {
            n: self.pressure.partition_sum(system, collection, potential, double, double, n).log_value
            for n in range(1, n_max + 1)
        }
        rows: List[Dict[str, object]] = []
        least: Optional[int] = None
        for margin in sorted(set(margins)):
            core_set = Intersection(collection, GoodCore(rule, margin))
            holds_all = True
            for n in range(1, n_max + 1):
                whole = base[n]
                eligible = whole.upper > -math.inf and whole.upper >= floor + n * oracle.lower
                core = self.pressure.partition_sum(system, core_set, potential, double, double, n).log_value
                holds = (not eligible) or core.upper >= keep + whole.lower
                holds_all = holds_all and holds
                rows.append({
                    "M": margin,
                    "n": n,
                    "eligible": eligible,
                    "log_ratio": core.midpoint - whole.midpoint if whole.upper > -math.inf else 0.0,
                    "holds": holds,
                })
            if holds_all:
                least = margin
                break
        report = CoreDensityReport(gamma, alpha_1, alpha_2, rows, least)
        self.logger.info(f"Core density at {gamma}: least margin {least}")
        return report
