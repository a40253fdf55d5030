"""Result values and reports produced by the services."""

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

from .intervals import ValueInterval
from .symbolic import DyadicScale, Point, Word


class Verdict(Enum):
    """Outcome of a check."""
    PASS = "pass"
    FAIL = "fail"
    INCONCLUSIVE = "inconclusive"

    @classmethod
    def of(cls, passed: bool) -> "Verdict":
        return cls.PASS if passed else cls.FAIL


@dataclass(frozen=True)
class Distance:
    """A metric value found by scanning coordinates up to a horizon.

    ``value`` is exact unless ``truncated``; then the points agree on the whole
    scanned window and the true distance lies in [0, upper].
    """
    value: float
    upper: float
    truncated: bool = False


@dataclass
class ClassExtrema:
    """Birkhoff-sum extrema per separation class.

    ``classes`` maps each class window word to (lo, hi): the min and max of the
    tabulated Birkhoff sum over the weight group of the class. The true sums
    lie within ``slack`` of these values.
    """
    n: int
    class_radius: int
    group_radius: int
    classes: Dict[Word, Tuple[float, float]]
    slack: float = 0.0

    def __len__(self) -> int:
        return len(self.classes)


@dataclass
class PartitionSumValue:
    """log Lambda(C, phi, delta, eps, n) as a certified interval."""
    log_value: ValueInterval
    n: int
    delta: DyadicScale
    eps: Optional[DyadicScale]
    classes: int
    method: str = "classes"

    @property
    def is_empty(self) -> bool:
        return self.log_value.upper == float("-inf")


@dataclass
class PressureEstimate:
    """Ratio-method pressure estimate with its diagnostics."""
    collection: str
    delta: DyadicScale
    eps: Optional[DyadicScale]
    values: List[PartitionSumValue]
    ratios: List[float]
    estimate: float
    bracket: ValueInterval
    monotone: bool
    empty_collection: bool = False
    sparse: bool = False

    @property
    def interval(self) -> ValueInterval:
        """Bracket containing the estimate, used in certified comparisons."""
        return self.bracket


@dataclass
class InequalityRow:
    """One instance lhs <= rhs of a checked inequality."""
    label: str
    lhs: ValueInterval
    rhs: ValueInterval

    @property
    def holds(self) -> bool:
        """Not refuted: some values in the enclosures satisfy lhs <= rhs."""
        return self.lhs.holds_le(self.rhs)

    @property
    def certified(self) -> bool:
        """Every value in the enclosures satisfies lhs <= rhs."""
        return self.lhs.certified_le(self.rhs)

    @property
    def slack(self) -> float:
        return self.rhs.midpoint - self.lhs.midpoint


@dataclass
class CheckReport:
    """A family of inequalities; passes when none is refuted, certified when all are proved."""
    name: str
    rows: List[InequalityRow] = field(default_factory=list)
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(row.holds for row in self.rows)

    @property
    def certified(self) -> bool:
        return all(row.certified for row in self.rows)

    @property
    def counterexamples(self) -> List[InequalityRow]:
        return [row for row in self.rows if not row.holds]

    @property
    def min_slack(self) -> float:
        return min((row.slack for row in self.rows), default=0.0)


@dataclass(frozen=True)
class Decomposition:
    """(p, g, s) for one segment, with the membership evidence."""
    p: int
    g: int
    s: int
    prefix_ok: bool
    good_ok: bool
    suffix_ok: bool

    @property
    def n(self) -> int:
        return self.p + self.g + self.s

    @property
    def verified(self) -> bool:
        return self.prefix_ok and self.good_ok and self.suffix_ok


@dataclass
class GluingSpec:
    """Maximum gap and the connector for each ordered symbol pair.

    ``search_limit`` caps the connectors found by automaton search when a
    table connector does not fit the state reached; ``diameter`` is the
    longest shortest path between recurrent automaton states.
    """
    tau: int
    connectors: Dict[Tuple[int, int], Word]
    diameter: int = 0
    search_limit: int = 0

    def connector(self, a: int, b: int) -> Optional[Word]:
        return self.connectors.get((a, b))

    @property
    def gap_bound(self) -> int:
        return max(self.tau, self.search_limit)

    def within(self, tau: int) -> "GluingSpec":
        """The same table restricted to connectors of length at most tau."""
        kept = {pair: c for pair, c in self.connectors.items() if len(c) <= tau}
        return GluingSpec(
            max((len(c) for c in kept.values()), default=0),
            kept,
            self.diameter,
            min(self.search_limit, tau),
        )


@dataclass
class GluingResult:
    """A shadowing point with the start coordinate of every segment.

    ``connectors`` are the words placed between consecutive windows;
    ``searched`` counts the junctions where the table connector did not fit.
    """
    point: Point
    gaps: List[int]
    starts: List[int]
    shadowing_ok: bool
    connectors: List[Word] = field(default_factory=list)
    searched: int = 0


@dataclass
class GluingFailure:
    """A tuple of segments that could not be glued."""
    segments: List[Word]
    reason: str


@dataclass
class SpecificationReport:
    """Exhaustive gluing of collection segments."""
    collection: str
    delta: DyadicScale
    tau: int
    k_max: int
    n_max: int
    cases: int = 0
    worst_gap: int = 0
    failures: List[GluingFailure] = field(default_factory=list)
    causality_ok: bool = True
    core_reduction: Dict[int, Dict[str, Any]] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        reduction_ok = all(entry.get("passed", True) for entry in self.core_reduction.values())
        return not self.failures and self.causality_ok and reduction_ok


@dataclass
class BowenReport:
    """Distortion of Birkhoff sums over eps-Bowen balls."""
    collection: str
    eps: DyadicScale
    per_n: List[ValueInterval]
    constant: ValueInterval
    variation: ValueInterval
    core_constants: Dict[int, ValueInterval] = field(default_factory=dict)
    core_empirical: Dict[int, ValueInterval] = field(default_factory=dict)
    analytic_bound: Optional[float] = None

    @property
    def cores_within_formula(self) -> bool:
        """Empirical G^M constants stay below K + 2M Var(phi, eps)."""
        return all(
            self.core_empirical[m].holds_le(self.core_constants[m]) for m in self.core_empirical
        )

    @property
    def within_analytic_bound(self) -> Optional[bool]:
        """The analytic bound is not refuted by the empirical constant."""
        if self.analytic_bound is None:
            return None
        return self.constant.lower <= self.analytic_bound

    @property
    def certified_within_analytic_bound(self) -> bool:
        """The whole enclosure of the empirical constant lies under the analytic bound."""
        return self.analytic_bound is not None and self.constant.certified_le(self.analytic_bound)

    @property
    def cores_certified(self) -> bool:
        """Empirical G^M constants lie under analytic K + 2M inf Var(phi, eps) for every value."""
        if not self.core_empirical:
            return True
        if self.analytic_bound is None:
            return False
        floor = ValueInterval.point(self.variation.lower)
        return all(
            self.core_empirical[m].certified_le(ValueInterval.point(self.analytic_bound) + 2 * m * floor)
            for m in self.core_empirical
        )

    @property
    def monotone(self) -> bool:
        uppers = [v.upper for v in self.per_n]
        return all(a <= b for a, b in zip(uppers, uppers[1:]))


@dataclass
class HypothesisCertificate:
    """Margins and verdicts for the uniqueness hypotheses.

    ``verdicts`` hold only what the enclosures prove; ``not_refuted`` records
    the weaker state where the enclosures merely allow each condition.
    """
    delta: DyadicScale
    eps: DyadicScale
    scale_ratio: int
    specification: Dict[int, SpecificationReport]
    bowen: BowenReport
    obstruction_pressure: PressureEstimate
    variation: ValueInterval
    oracle_pressure: ValueInterval
    margins: Dict[str, ValueInterval]
    verdicts: Dict[str, bool]
    expansivity: Dict[str, Any] = field(default_factory=dict)
    not_refuted: Dict[str, bool] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.verdicts.get(name, False) for name in ("I", "II", "III"))


@dataclass
class CoreDensityReport:
    """Least good-core margin M capturing a fixed share of the partition sum."""
    gamma: DyadicScale
    alpha_1: float
    alpha_2: float
    rows: List[Dict[str, Any]]
    least_margin: Optional[int]

    @property
    def passed(self) -> bool:
        return self.least_margin is not None


@dataclass
class GibbsReport:
    """Per-n extrema of mu(B_n(x, r)) e^{nP - Phi(x, n)}."""
    kind: str
    scale: DyadicScale
    rows: List[Dict[str, float]]
    q_lower: float
    q_upper: float
    decaying: bool = False
    growing: bool = False
    q_budget: float = float("inf")

    @property
    def passed(self) -> bool:
        if not self.rows:
            return False
        if self.kind == "lower":
            return self.q_lower > 0 and not self.decaying
        return self.q_upper <= self.q_budget and not self.growing


@dataclass
class VariationalRow:
    """h + integral of phi for one candidate measure."""
    name: str
    entropy: float
    integral: float
    gap: float
    attains: bool


@dataclass
class VariationalReport:
    pressure: float
    rows: List[VariationalRow]
    tolerance: float

    @property
    def passed(self) -> bool:
        bounded = all(row.gap >= -self.tolerance for row in self.rows)
        return bounded and all(row.attains for row in self.rows if row.name == "rpf")


@dataclass
class GammaDescriptor:
    """The two-sided Bowen set of a point at scale eps."""
    base: Point
    eps: DyadicScale
    horizon: int
    window: Optional[Tuple[int, int]]
    exact: bool
    degenerate: bool

    @property
    def is_singleton(self) -> bool:
        return not self.degenerate and self.exact


@dataclass
class EntropyEstimate:
    """Block entropies H_n of a partition and their increments."""
    label: str
    block_entropies: List[float]
    increments: List[float]
    estimate: float
    subadditive: bool


@dataclass
class AdaptedPartitionDescriptor:
    """Window cylinders adapted to a (n, gamma) separated set."""
    n: int
    gamma: DyadicScale
    window: Tuple[int, int]
    inner_window: Tuple[int, int]
    elements: List[Word]
    disjoint: bool
    covering: bool

    @property
    def verified(self) -> bool:
        return self.disjoint and self.covering


@dataclass
class EntropyExpansivityReport:
    """Partition entropy against the measure entropy and h*."""
    eps: DyadicScale
    partition_depth: int
    partition_diameter: float
    partition_entropy: float
    measure_entropy: float
    h_star: float
    tolerance: float
    estimate: EntropyEstimate

    @property
    def inequality_holds(self) -> bool:
        return self.measure_entropy <= self.partition_entropy + self.h_star + self.tolerance

    @property
    def equality_holds(self) -> Optional[bool]:
        if self.h_star > 0:
            return None
        return abs(self.partition_entropy - self.measure_entropy) <= self.tolerance

    @property
    def passed(self) -> bool:
        return self.inequality_holds and self.equality_holds is not False


@dataclass
class HammingReport:
    n: int
    delta: DyadicScale
    beta: float
    partition_depth: int
    pairs: int
    claims: int
    counterexamples: List[Tuple[Word, Word]]

    @property
    def passed(self) -> bool:
        return not self.counterexamples


@dataclass
class StirlingReport:
    """Binomial tail sums against e^{n H(beta)} and the loose constant table."""
    n_max: int
    rows: List[Dict[str, Any]]
    constants: Dict[float, float]
    stabilizing: Dict[float, bool]
    monotone_in_beta: bool
    counterexamples: List[Tuple[int, float]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.monotone_in_beta and not self.counterexamples


@dataclass
class FlowPartitionSum:
    """log Lambda(C, phi, delta, eps, t) for a suspension flow.

    ``log_value.lower`` is the grid separated-set sum; the upper end adds the
    off-grid height allowance and the eps slack.
    """
    log_value: ValueInterval
    t: Fraction
    delta: DyadicScale
    eps: Optional[DyadicScale]
    grid: Fraction
    candidates: int
    method: str = "transfer"
    degenerate: bool = False

    @property
    def is_empty(self) -> bool:
        return self.log_value.upper == float("-inf")


@dataclass
class FlowPressureEstimate:
    """Two-step slopes (log Lambda(t) - log Lambda(t - 2)) / 2 per requested t."""
    collection: str
    delta: DyadicScale
    eps: Optional[DyadicScale]
    times: List[Fraction]
    values: List[FlowPartitionSum]
    slopes: List[float]
    estimate: float
    bracket: ValueInterval
    empty_collection: bool = False

    def errors(self, oracle: float) -> List[float]:
        return [abs(s - oracle) for s in self.slopes]


@dataclass
class TimeBallReport:
    """Flow Bowen balls of order nt against Bowen balls of the time-t map."""
    n: int
    t: Fraction
    eps: DyadicScale
    grid: Fraction
    pairs: int
    inside: int
    disagreements: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.disagreements


@dataclass
class AbramovReport:
    """Entropy of the suspension of a base measure: partition estimates and oracles."""
    times: List[Fraction]
    estimates: List[float]
    slope: float
    unit_estimate: float
    linear: bool
    base_entropy: float
    mean_roof: float
    oracle_entropy: float
    root: float
    optimum: Optional[Dict[str, float]] = None

    @property
    def below_root(self) -> bool:
        return self.oracle_entropy <= self.root + 1e-12

    @property
    def passed(self) -> bool:
        optimum_ok = self.optimum is None or self.optimum["gap"] <= 1e-4
        return self.linear and self.below_root and optimum_ok


@dataclass
class FlowCertificate:
    """Margins for P([P] u [S], phi, delta) + Var(phi, eps) < P(phi) on a suspension."""
    delta: DyadicScale
    eps: DyadicScale
    obstruction_pressure: FlowPressureEstimate
    variation: ValueInterval
    oracle_pressure: ValueInterval
    margins: Dict[str, ValueInterval]
    verdicts: Dict[str, bool]

    @property
    def passed(self) -> bool:
        return self.verdicts.get("pressure_gap", False)


@dataclass
class RateBound:
    """sup over candidate measures in A of h + integral of phi - P(phi).

    The sup runs over Markov measures of the given order only, so ``value``
    is a lower bound on the supremum over all invariant measures.
    """
    value: float
    entropy: float
    integral: float
    pressure: float
    order: int
    argmax: Dict[str, float]
    converged: bool = True
    candidate_class: str = "markov"


@dataclass
class DecayValue:
    """(1/n) log mu{x : E_n(x) in A} with its enclosure."""
    n: int
    value: Optional[float]
    lower: float
    upper: float
    method: str
    hits: Optional[int] = None
    samples: Optional[int] = None


@dataclass
class DecayProfile:
    constraint: str
    values: List[DecayValue]
    extrapolated: Optional[float] = None
    infeasible: bool = False


@dataclass
class RateReport:
    """Empirical decay against the variational bound plus C log n / n."""
    bound: RateBound
    decay: DecayProfile
    fitted_constant: float
    c_max: float
    margins: Dict[int, ValueInterval]

    @property
    def passed(self) -> bool:
        return self.fitted_constant <= self.c_max and all(m.upper >= 0 for m in self.margins.values())


@dataclass
class ReportEnvelope:
    """What one experiment run produced; ``body`` is the deterministic part."""
    tool_version: str
    experiment: str
    config_hash: str
    verdicts: Dict[str, bool]
    margins: Dict[str, ValueInterval]
    body: Dict[str, Any]
    timestamps: Dict[str, str] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values())
