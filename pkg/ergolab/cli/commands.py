"""Experiment runner behind the CLI subcommands."""

from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple
import logging
import math

from .. import __version__
from ..config.experiment import ExperimentConfig
from ..config.settings import AppSettings
from ..core.container import Container, build_container
from ..core.domain.collections import GoodSegments, PrefixSegments, SuffixSegments, Union as UnionSegments
from ..core.domain.flows import SuspensionFlow
from ..core.domain.intervals import ValueInterval
from ..core.domain.measures import MarkovMeasure, bernoulli_measure, cycle_measure
from ..core.domain.reports import ReportEnvelope
from ..core.domain.symbolic import DyadicScale, Point, ShiftSystem, word_from_string, word_to_string
from ..core.interfaces.base import ConfigurationError
from ..core.interfaces.decomposition import DomainError, GluingError, IDecompositionRule
from ..core.interfaces.measure import ICylinderMass
from ..core.interfaces.potential import IPotential
from ..core.interfaces.report_store import IReportStore
from ..core.services.decomposition_service import DecompositionService
from ..core.services.entropy_service import EntropyService
from ..core.services.equilibrium_service import EquilibriumService
from ..core.services.ldp_service import LDPService
from ..core.services.pressure_service import PressureService
from ..core.services.suspension_service import SuspensionService
from ..core.services.symbolic_service import SymbolicService
from ..infrastructure.decompositions import build_decomposition
from ..infrastructure.potentials import build_potential
from ..infrastructure.rules import build_rule

Table = Tuple[List[str], List[List[Any]]]


@dataclass
class ExperimentOutcome:
    """Deterministic result of one experiment before it is wrapped in an envelope."""
    body: Dict[str, Any]
    verdicts: Dict[str, bool]
    margins: Dict[str, ValueInterval] = field(default_factory=dict)
    tables: Dict[str, Table] = field(default_factory=dict)


def _slack(value: float) -> ValueInterval:
    return ValueInterval.point(value) if not math.isnan(value) else ValueInterval(-math.inf, math.inf)


class ExperimentRunner:
    """Builds the objects an experiment names and runs its checks."""

    def __init__(self, container: Container) -> None:
        self.container = container
        self.settings = container.get(AppSettings)
        self.symbolic = container.get(SymbolicService)
        self.pressure = container.get(PressureService)
        self.equilibrium = container.get(EquilibriumService)
        self.decomposition = container.get(DecompositionService)
        self.entropy = container.get(EntropyService)
        self.suspension = container.get(SuspensionService)
        self.ldp = container.get(LDPService)
        self.logger = logging.getLogger(__name__)

    def build_system(self, config: ExperimentConfig) -> ShiftSystem:
        return ShiftSystem(build_rule(config.system.to_spec()))

    def build_potential(self, config: ExperimentConfig, system: ShiftSystem) -> IPotential:
        return build_potential(
            config.potential.to_spec(), lambda d: self.symbolic.enumerate_words(system, d), system.k
        )

    def build_decomposition(self, config: ExperimentConfig, system: ShiftSystem) -> IDecompositionRule:
        return build_decomposition(config.decomposition.to_spec(), system.rule)

    def run(self, config: ExperimentConfig) -> ExperimentOutcome:
        handlers: Dict[str, Callable[[ExperimentConfig], ExperimentOutcome]] = {
            "pressure": self._pressure,
            "certify": self._certify,
            "gibbs": self._gibbs,
            "entropy": self._entropy,
            "flow-pressure": self._flow_pressure,
            "ldp": self._ldp,
            "glue": self._glue,
            "decompose": self._decompose,
        }
        self.logger.info(f"Running {config.experiment} experiment")
        return handlers[config.experiment](config)

    def _pressure(self, config: ExperimentConfig) -> ExperimentOutcome:
        system = self.build_system(config)
        potential = self.build_potential(config, system)
        delta, eps = config.scales.delta_scale, config.scales.eps_scale
        n_max = config.budgets.n_max
        estimate = self.pressure.pressure(system, None, potential, delta, eps, n_max)
        oracle = self.equilibrium.pressure_oracle(system, potential)
        gamma = DyadicScale.parse(config.checks.gamma) if config.checks.gamma is not None else delta
        lower = self.pressure.lower_bound_check(system, potential, gamma, min(n_max, 20), oracle)

        allowance = config.checks.tolerance + oracle.width
        error = abs(estimate.estimate - oracle.midpoint)
        verdicts = {"oracle": error <= allowance, "lower_bound": lower.passed}
        margins = {"oracle": _slack(allowance - error), "lower_bound": _slack(lower.min_slack)}
        body: Dict[str, Any] = {
            "system": system.describe(),
            "potential": potential.describe(),
            "estimate": estimate,
            "oracle": oracle,
            "lower_bound": lower,
        }
        # partition sums over the finer windows grow by 2^(2m) per step, so these stay short
        short = min(n_max, 4)
        monotone = self.pressure.monotonicity_check(
            system, None, potential, [delta.exponent, delta.exponent + 1], short
        )
        rule = self.build_decomposition(config, system)
        union = self.pressure.union_check(
            system, GoodSegments(rule), UnionSegments(PrefixSegments(rule), SuffixSegments(rule)),
            potential, delta, eps, short,
        )
        verdicts.update({"monotonicity": monotone.passed, "union": union.passed})
        body.update({"monotonicity": monotone, "union": union})
        if config.checks.splits:
            product = self.pressure.product_bound_check(system, potential, gamma, config.checks.splits)
            verdicts["product_bound"] = product.passed
            margins["product_bound"] = _slack(product.min_slack)
            body["product_bound"] = product
        if eps is not None:
            sandwich = self.pressure.sandwich_check(
                system, None, potential, delta, eps, range(1, min(n_max, 10) + 1)
            )
            verdicts["sandwich"] = sandwich.passed
            margins["sandwich"] = _slack(sandwich.min_slack)
            body["sandwich"] = sandwich
        rows = [[v.n, v.log_value.lower, v.log_value.upper, v.method] for v in estimate.values]
        return ExperimentOutcome(
            body, verdicts, margins, {"partition_sums": (["n", "log_lower", "log_upper", "method"], rows)}
        )

    def _certify(self, config: ExperimentConfig) -> ExperimentOutcome:
        system = self.build_system(config)
        potential = self.build_potential(config, system)
        rule = self.build_decomposition(config, system)
        certificate = self.decomposition.hypothesis_certificate(
            system,
            potential,
            rule,
            config.scales.delta_scale,
            config.scales.eps_scale,
            config.checks.margins,
            config.budgets.n_max,
            config.checks.k_max,
            config.checks.spec_n_max,
        )
        # gamma = eps/4 from the scale ladder; core density is reported, not gated
        gamma = DyadicScale(config.scales.eps_scale.exponent + 2)
        density = self.decomposition.core_density_check(
            system, potential, rule, gamma, 0.0, 0.5, min(config.budgets.n_max, 4),
            config.checks.margins, oracle=certificate.oracle_pressure,
        )
        body = {
            "system": system.describe(),
            "potential": potential.describe(),
            "decomposition": rule.describe(),
            "ladder": config.scales.ladder(),
            "certificate": certificate,
            "core_density": density,
        }
        rows = [
            [
                name, margin.lower, margin.upper,
                certificate.verdicts.get(name), certificate.not_refuted.get(name),
            ]
            for name, margin in sorted(certificate.margins.items())
        ]
        return ExperimentOutcome(
            body,
            {"certificate": certificate.passed},
            dict(certificate.margins),
            {"margins": (["condition", "lower", "upper", "certified", "not_refuted"], rows)},
        )

    def rho_scale(self, config: ExperimentConfig, fallback: DyadicScale) -> DyadicScale:
        return DyadicScale.parse(config.checks.rho) if config.checks.rho is not None else fallback

    def build_measure(
        self, config: ExperimentConfig, system: ShiftSystem, potential: IPotential, rho: DyadicScale
    ) -> Tuple[ICylinderMass, Optional[int]]:
        """The RPF chain, or mu_n at scale rho with its known depth for "empirical:n".

        The marginal depth is half of what mu_n supports, so the shift average
        runs over enough positions to be close to invariant.
        """
        n = config.checks.empirical_n
        if n is None:
            return self.equilibrium.rpf_solve(system, potential).measure, None
        depth = (n - rho.radius) // 2
        if depth < 1:
            raise ConfigurationError(f"Empirical measure mu_{n} at {rho} needs n >= {rho.radius + 2}")
        return self.equilibrium.empirical_equilibrium(system, potential, rho, n, depth), depth

    def _known_lengths(self, n_max: int, depth: Optional[int], radius: int) -> int:
        """Largest n whose ball windows of the given radius the measure can weigh."""
        if depth is None:
            return n_max
        top = min(n_max, depth - 2 * radius)
        if top < 1:
            raise ConfigurationError(f"A measure known to depth {depth} cannot weigh balls of radius {radius}")
        if top < n_max:
            self.logger.warning(f"Empirical measure limits the checks to n <= {top}")
        return top

    def _gibbs(self, config: ExperimentConfig) -> ExperimentOutcome:
        system = self.build_system(config)
        potential = self.build_potential(config, system)
        rule = self.build_decomposition(config, system)
        checks = config.checks
        gamma = DyadicScale.parse(checks.gamma) if checks.gamma is not None else config.scales.delta_scale
        rho = self.rho_scale(config, gamma)
        measure, depth = self.build_measure(config, system, potential, rho)
        n_top = self._known_lengths(config.budgets.n_max, depth, max(gamma.radius, rho.radius))
        n_range = range(1, n_top + 1)
        pressure = self.equilibrium.pressure_oracle(system, potential).midpoint
        upper = self.equilibrium.gibbs_upper_check(system, potential, gamma, n_range, measure, pressure)
        lower = self.equilibrium.gibbs_lower_check(
            system, potential, rule, checks.margins[0], rho, n_range, measure, pressure
        )
        energy = self.ldp.upper_energy_check(system, potential, measure, gamma, n_top, upper.q_upper)
        variational = self.equilibrium.variational_check(
            system, potential, [cycle_measure(system.rule.default_cycle())]
        )
        body = {
            "system": system.describe(),
            "potential": potential.describe(),
            "measure": checks.measure,
            "scale": str(gamma),
            "rho": str(rho),
            "pressure": pressure,
            "gibbs_upper": upper,
            "gibbs_lower": lower,
            "upper_energy": energy,
            "variational": variational,
        }
        verdicts = {
            "gibbs_upper": upper.passed,
            "gibbs_lower": lower.passed,
            "upper_energy": energy.passed,
            "variational": variational.passed,
        }
        margins = {"upper_energy": _slack(energy.min_slack)}
        tables = {f"gibbs_{r.kind}": self._rows_table(r.rows) for r in (upper, lower) if r.rows}
        return ExperimentOutcome(body, verdicts, margins, tables)

    def _entropy(self, config: ExperimentConfig) -> ExperimentOutcome:
        system = self.build_system(config)
        potential = self.build_potential(config, system)
        delta = config.scales.delta_scale
        eps = config.scales.eps_scale or delta
        checks = config.checks
        measure, depth = self.build_measure(config, system, potential, self.rho_scale(config, eps))
        n_max = config.budgets.n_max
        body: Dict[str, Any] = {"system": system.describe(), "measure": checks.measure}
        verdicts: Dict[str, bool] = {}
        margins: Dict[str, ValueInterval] = {}
        if isinstance(measure, MarkovMeasure):
            aee = self.entropy.aee_check(system, measure, eps, checks.partition_depth, n_max)
            estimate = aee.estimate
            body["aee"] = aee
            verdicts["aee"] = aee.passed
            gap = aee.partition_entropy - aee.measure_entropy
            margins["aee_equality"] = _slack(aee.tolerance - abs(gap))
        else:
            # the measure entropy of mu_n is unknown, so only the block entropies are checked
            n_known = self._known_lengths(n_max, depth - checks.partition_depth + 1, 0)
            estimate = self.entropy.plugin_entropy(measure, checks.partition_depth, n_known)
            chain = self.entropy.chain_rule_check(measure, 1, checks.partition_depth, n_known)
            body.update({"plugin_entropy": estimate, "chain_rule": chain})
            verdicts["chain_rule"] = chain.passed
        stirling = self.entropy.stirling_bound_check(min(n_max, 12), checks.betas)
        # depth-b cylinders only separate orbits at scales below 2^-b
        hamming_scale = DyadicScale(max(delta.exponent, checks.partition_depth + 1))
        hamming = self.entropy.hamming_check(
            system, checks.partition_depth, hamming_scale, checks.betas[0], checks.hamming_n
        )
        gamma = DyadicScale.parse(checks.gamma) if checks.gamma is not None else DyadicScale(eps.exponent + 2)
        bowen_set = self.entropy.gamma_set(system, Point.periodic(system.rule.default_cycle()), eps)
        ne_mass = self.entropy.ne_mass(system, measure, eps)
        adapted = self.entropy.adapted_partition(system, min(n_max, 4), gamma)
        body.update({
            "stirling": stirling,
            "hamming": hamming,
            "gamma_set": bowen_set,
            "ne_mass": ne_mass,
            "adapted_partition": {
                "n": adapted.n,
                "gamma": str(adapted.gamma),
                "window": adapted.window,
                "inner_window": adapted.inner_window,
                "elements": len(adapted.elements),
                "verified": adapted.verified,
            },
        })
        verdicts.update({
            "stirling": stirling.passed,
            "hamming": hamming.passed,
            "expansive": bowen_set.is_singleton and ne_mass == 0.0,
            "adapted_partition": adapted.verified,
        })
        rows = [
            [n, h, inc]
            for n, (h, inc) in enumerate(zip(estimate.block_entropies, estimate.increments), start=1)
        ]
        return ExperimentOutcome(
            body, verdicts, margins, {"block_entropies": (["n", "entropy", "increment"], rows)}
        )

    def _flow_pressure(self, config: ExperimentConfig) -> ExperimentOutcome:
        system = self.build_system(config)
        potential = self.build_potential(config, system)
        roof = config.roof.to_roof(system.k)
        flow = SuspensionFlow(system, roof, horizon=self.settings.numerics.flow_horizon)
        delta, eps = config.scales.delta_scale, config.scales.eps_scale
        options = config.flow
        times = [t for t in options.times if t <= config.budgets.t_max]
        if not times:
            self.logger.warning(f"No flow time within t_max={config.budgets.t_max}; using {min(options.times)}")
            times = [min(options.times)]
        root = self.suspension.flow_pressure_root(flow, potential)
        estimate = self.suspension.flow_pressure(flow, None, potential, delta, eps, times, options.grid)
        measure = self.equilibrium.rpf_solve(system, potential).measure
        abramov = self.suspension.abramov_check(flow, measure, options.abramov_times)
        base = flow.point(Point.periodic(system.rule.default_cycle()))
        balls = self.suspension.time_t_ball_check(
            flow, base, eps or delta, options.ball_n, options.ball_t, options.pairs, config.seed
        )
        error = abs(estimate.estimate - root)
        body: Dict[str, Any] = {
            "flow": flow.describe(),
            "potential": potential.describe(),
            "root": root,
            "estimate": estimate,
            "errors": estimate.errors(root),
            "abramov": abramov,
            "time_balls": balls,
        }
        verdicts = {"oracle": error <= options.tolerance, "abramov": abramov.passed, "time_balls": balls.passed}
        margins = {"oracle": _slack(options.tolerance - error)}
        if options.certify:
            if eps is None:
                raise ConfigurationError("Flow certificates need scales.eps")
            rule = self.build_decomposition(config, system)
            certificate = self.suspension.flow_hypothesis_report(
                flow, potential, rule, delta, eps, times, options.grid
            )
            body["certificate"] = certificate
            verdicts["certificate"] = certificate.passed
            margins.update({f"certificate_{k}": v for k, v in certificate.margins.items()})
        rows = [
            [str(v.t), v.log_value.lower, v.log_value.upper, v.method, v.candidates] for v in estimate.values
        ]
        return ExperimentOutcome(
            body, verdicts, margins,
            {"flow_partition_sums": (["t", "log_lower", "log_upper", "method", "candidates"], rows)},
        )

    def _ldp(self, config: ExperimentConfig) -> ExperimentOutcome:
        system = self.build_system(config)
        potential = self.build_potential(config, system)
        options = config.constraint
        constraints = options.to_constraints()
        measure: Optional[MarkovMeasure] = None
        if options.measure == "bernoulli":
            probabilities = options.probabilities or [1.0 / system.k] * system.k
            measure = bernoulli_measure(probabilities)
        report = self.ldp.ldp_upper_check(
            system, potential, constraints, config.budgets.n_max, measure,
            options.order, options.c_max, options.n_min,
        )
        body = {
            "system": system.describe(),
            "potential": potential.describe(),
            "constraints": constraints.describe(),
            "report": report,
        }
        rows = [[v.n, v.value, v.lower, v.upper, v.method] for v in report.decay.values]
        return ExperimentOutcome(
            body,
            {"ldp_upper": report.passed},
            {f"n={n}": m for n, m in sorted(report.margins.items())},
            {"decay": (["n", "rate", "lower", "upper", "method"], rows)},
        )

    def _glue(self, config: ExperimentConfig) -> ExperimentOutcome:
        system = self.build_system(config)
        rule = self.build_decomposition(config, system)
        delta = config.scales.delta_scale
        spec = self.decomposition.gluing_spec(system)
        report = self.decomposition.specification_check(
            system, GoodSegments(rule), delta, None, config.checks.k_max,
            config.checks.spec_n_max or config.budgets.n_max, rule,
        )
        glued: List[Dict[str, Any]] = []
        for segments in config.checks.segments:
            words = [word_from_string(s) for s in segments]
            try:
                result = self.decomposition.glue(system, words, delta, spec)
                glued.append({"segments": segments, "result": result, "ok": result.shadowing_ok})
            except GluingError as e:
                glued.append({"segments": segments, "error": str(e), "pair": e.pair, "ok": False})
        body = {
            "system": system.describe(),
            "decomposition": rule.describe(),
            "tau": spec.tau,
            "diameter": spec.diameter,
            "search_limit": spec.search_limit,
            "connectors": {f"{a}{b}": word_to_string(c) for (a, b), c in sorted(spec.connectors.items())},
            "specification": report,
            "glued": glued,
        }
        verdicts = {"specification": report.passed, "explicit": all(g["ok"] for g in glued)}
        rows = [[" ".join(word_to_string(w) for w in f.segments), f.reason] for f in report.failures]
        return ExperimentOutcome(body, verdicts, {}, {"failures": (["segments", "reason"], rows)})

    def _decompose(self, config: ExperimentConfig) -> ExperimentOutcome:
        system = self.build_system(config)
        rule = self.build_decomposition(config, system)
        if config.checks.words:
            words = [word_from_string(w) for w in config.checks.words]
        else:
            words = self.symbolic.enumerate_words(system, min(config.budgets.n_max, 10))
        rows: List[List[Any]] = []
        outside = 0
        verified = True
        for word in words:
            try:
                d = self.decomposition.decompose(rule, word)
            except DomainError as e:
                outside += 1
                rows.append([word_to_string(word), None, None, None, False, str(e)])
                continue
            verified = verified and d.verified
            rows.append([word_to_string(word), d.p, d.g, d.s, d.verified, ""])
        body = {
            "system": system.describe(),
            "decomposition": rule.describe(),
            "segments": len(words),
            "outside_domain": outside,
        }
        return ExperimentOutcome(
            body, {"decomposition": verified}, {},
            {"decompositions": (["word", "p", "g", "s", "verified", "note"], rows)},
        )

    def _rows_table(self, rows: Sequence[Dict[str, Any]]) -> Table:
        headers = sorted({k for row in rows for k in row})
        return headers, [[row.get(h) for h in headers] for row in rows]


def effective_settings(config: ExperimentConfig, settings: AppSettings, env_budget: bool) -> AppSettings:
    """The environment budget wins over the config's, which wins over the settings file."""
    if config.budgets.word_budget is not None and not env_budget:
        settings.budget.word_budget = config.budgets.word_budget
    settings.numerics.seed = config.seed
    return settings


def run_experiment(
    config: ExperimentConfig,
    settings: AppSettings,
    store: Optional[IReportStore] = None,
    report_name: Optional[str] = None,
) -> ReportEnvelope:
    """Run one experiment and, given a store, persist its envelope and tables."""
    started = datetime.now(timezone.utc).isoformat()
    runner = ExperimentRunner(build_container(settings))
    outcome = runner.run(config)
    body = dict(outcome.body)
    body["config"] = config.semantic_dump()
    envelope = ReportEnvelope(
        tool_version=__version__,
        experiment=config.experiment,
        config_hash=config.hash,
        verdicts=outcome.verdicts,
        margins=outcome.margins,
        body=body,
        timestamps={"started": started, "finished": datetime.now(timezone.utc).isoformat()},
    )
    if store is not None:
        stem = Path(report_name).stem if report_name else config.experiment
        store.acquire_lock()
        try:
            store.write_json(f"{stem}.json", {"envelope": envelope, "passed": envelope.passed})
            for name, (headers, rows) in outcome.tables.items():
                store.write_csv(f"{stem}_{name}.csv", headers, rows)
        finally:
            store.release_lock()
    return envelope
