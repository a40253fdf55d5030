"""Experiment configuration files, validated with pydantic."""

from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

import toml
import yaml
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..core.domain.constraints import ConstraintSet
from ..core.domain.flows import RoofFunction, as_time
from ..core.domain.symbolic import DyadicScale, word_from_string
from ..core.interfaces.base import ConfigurationError, ErgolabError
from ..utils.serialization import config_hash

CONFIG_VERSION = 1

# exponents must differ by 6 so that eps = 64 delta > 40 delta
LADDER_GAP = 6

ScaleText = Union[str, int]
TimeText = Union[str, int, float]

Experiment = Literal[
    "pressure", "certify", "gibbs", "entropy", "flow-pressure", "ldp", "glue", "decompose"
]


def _scale(value: ScaleText) -> DyadicScale:
    try:
        return DyadicScale.parse(value)
    except ErgolabError as e:
        raise ValueError(str(e))


class Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class SystemConfig(Section):
    """Admissibility rule of the base shift."""
    rule: Literal["full", "sft", "beta", "sgap"] = "full"
    alphabet: Optional[int] = Field(None, ge=2)
    matrix: Optional[List[List[int]]] = None
    forbidden: Optional[List[str]] = None
    digits: Optional[Union[str, List[int]]] = None
    periodic: bool = True
    truncation: Optional[int] = Field(None, ge=1)
    gaps: Optional[List[int]] = None
    cap: Optional[int] = Field(None, ge=0)

    @model_validator(mode="after")
    def _rule_fields(self) -> "SystemConfig":
        if self.rule == "beta" and not self.digits:
            raise ValueError("beta shifts need 'digits'")
        if self.rule == "sgap" and not self.gaps:
            raise ValueError("S-gap shifts need 'gaps'")
        return self

    def to_spec(self) -> Dict[str, Any]:
        return self.model_dump(exclude_none=True)


class PotentialConfig(Section):
    kind: Literal["zero", "constant", "locally_constant", "holder", "geometric"] = "zero"
    name: str = ""
    value: float = 0.0
    depth: Optional[int] = Field(None, ge=1)
    values: Dict[str, float] = Field(default_factory=dict)
    default: Optional[float] = None
    c_holder: Optional[float] = Field(None, ge=0)
    alpha: Optional[float] = Field(None, gt=0)
    amplitude: float = 1.0

    def to_spec(self) -> Dict[str, Any]:
        return self.model_dump(exclude_none=True)


class DecompositionConfig(Section):
    kind: Literal["trivial", "beta_suffix", "user_table"] = "trivial"
    prefixes: List[str] = Field(default_factory=list)
    suffixes: List[str] = Field(default_factory=list)
    overrides: Dict[str, List[int]] = Field(default_factory=dict)
    strict: bool = False

    @field_validator("overrides")
    @classmethod
    def _triples(cls, value: Dict[str, List[int]]) -> Dict[str, List[int]]:
        for word, split in value.items():
            if len(split) != 3 or sum(split) != len(word) or min(split) < 0:
                raise ValueError(f"override for '{word}' must be a (p, g, s) triple summing to {len(word)}")
        return value

    def to_spec(self) -> Dict[str, Any]:
        return self.model_dump()


class ScaleConfig(Section):
    """Separation scale delta and weight scale eps, written "2^-m" or as exponents."""
    delta: ScaleText = "2^-1"
    eps: Optional[ScaleText] = None

    @field_validator("delta", "eps")
    @classmethod
    def _dyadic(cls, value: Optional[ScaleText]) -> Optional[ScaleText]:
        if value is not None:
            _scale(value)
        return value

    @property
    def delta_scale(self) -> DyadicScale:
        return _scale(self.delta)

    @property
    def eps_scale(self) -> Optional[DyadicScale]:
        return None if self.eps is None else _scale(self.eps)

    def ladder(self) -> Dict[str, str]:
        """delta, eps and the derived gamma = eps/4, rho = eps/8, rho' = rho - delta."""
        delta, eps = self.delta_scale, self.eps_scale
        if eps is None:
            raise ConfigurationError("The scale ladder needs eps")
        rho = Fraction(1, 2 ** (eps.exponent + 3))
        return {
            "delta": str(delta),
            "eps": str(eps),
            "gamma": str(DyadicScale(eps.exponent + 2)),
            "rho": str(DyadicScale(eps.exponent + 3)),
            "rho_prime": str(rho - delta.exact),
        }


class RoofConfig(Section):
    """Either one value per symbol, a single constant, or a table over words of one length."""
    values: Optional[List[TimeText]] = None
    constant: Optional[TimeText] = None
    table: Optional[Dict[str, TimeText]] = None

    @model_validator(mode="after")
    def _one_form(self) -> "RoofConfig":
        given = [f for f in ("values", "constant", "table") if getattr(self, f) is not None]
        if len(given) != 1:
            raise ValueError("give exactly one of 'values', 'constant' or 'table'")
        return self

    def to_roof(self, alphabet_size: int) -> RoofFunction:
        if self.constant is not None:
            return RoofFunction.constant(self.constant, alphabet_size)
        if self.values is not None:
            if len(self.values) != alphabet_size:
                raise ConfigurationError(
                    f"roof.values has {len(self.values)} entries for an alphabet of size {alphabet_size}"
                )
            return RoofFunction.from_values(self.values)
        table = {word_from_string(w): as_time(v) for w, v in (self.table or {}).items()}
        depths = {len(w) for w in table}
        if len(depths) != 1:
            raise ConfigurationError("roof.table words must share one length")
        return RoofFunction(depths.pop(), table, name="roof table")


class FlowConfig(Section):
    times: List[int] = Field(default_factory=lambda: [4, 6])
    abramov_times: List[int] = Field(default_factory=lambda: [1, 2, 3, 4])
    ball_n: int = Field(2, ge=1)
    ball_t: TimeText = 1
    pairs: Optional[int] = Field(None, ge=1)
    tolerance: float = Field(5e-2, gt=0)
    certify: bool = False
    grid: Optional[TimeText] = None

    @field_validator("times")
    @classmethod
    def _late_enough(cls, value: List[int]) -> List[int]:
        if not value or min(value) < 3:
            raise ValueError("flow pressure times must all be at least 3")
        return value

    @field_validator("grid")
    @classmethod
    def _positive_grid(cls, value: Optional[TimeText]) -> Optional[TimeText]:
        if value is not None:
            try:
                grid = as_time(value)
            except ErgolabError as e:
                raise ValueError(str(e))
            if grid <= 0:
                raise ValueError(f"flow time grid must be positive, got {value}")
        return value


class ConstraintRow(Section):
    word: Optional[str] = None
    coefficients: Optional[Dict[str, float]] = None
    sense: Literal["<=", ">=", "=="] = ">="
    bound: float

    @model_validator(mode="after")
    def _terms(self) -> "ConstraintRow":
        if (self.word is None) == (self.coefficients is None):
            raise ValueError("give exactly one of 'word' or 'coefficients'")
        return self


class ConstraintConfig(Section):
    name: str = ""
    rows: List[ConstraintRow] = Field(default_factory=list)
    order: Optional[int] = Field(None, ge=1)
    c_max: float = Field(2.0, ge=0)
    n_min: int = Field(2, ge=2)
    measure: Literal["equilibrium", "bernoulli"] = "equilibrium"
    probabilities: Optional[List[float]] = None

    def to_constraints(self) -> ConstraintSet:
        return ConstraintSet.from_rows([r.model_dump(exclude_none=True) for r in self.rows], self.name)


class ChecksConfig(Section):
    """Parameters of the individual checks; unused ones are ignored by each experiment."""
    tolerance: float = Field(1e-6, gt=0)
    margins: List[int] = Field(default_factory=lambda: [0, 1, 2])
    k_max: int = Field(2, ge=1)
    spec_n_max: Optional[int] = Field(None, ge=1)
    gamma: Optional[ScaleText] = None
    rho: Optional[ScaleText] = None
    measure: str = Field("rpf", pattern=r"^(rpf|empirical:[1-9][0-9]*)$")
    partition_depth: int = Field(1, ge=1)
    betas: List[float] = Field(default_factory=lambda: [0.1, 0.25])
    hamming_n: int = Field(6, ge=1)
    splits: List[List[int]] = Field(default_factory=list)
    segments: List[List[str]] = Field(default_factory=list)
    words: List[str] = Field(default_factory=list)

    @field_validator("gamma", "rho")
    @classmethod
    def _dyadic(cls, value: Optional[ScaleText]) -> Optional[ScaleText]:
        if value is not None:
            _scale(value)
        return value

    @property
    def empirical_n(self) -> Optional[int]:
        """n of the empirical measure mu_n, or None for the RPF chain."""
        if self.measure == "rpf":
            return None
        return int(self.measure.split(":", 1)[1])


class BudgetConfig(Section):
    n_max: int = Field(12, ge=1)
    t_max: int = Field(30, ge=1)
    word_budget: Optional[int] = Field(None, ge=1)


class ExperimentConfig(Section):
    """A complete experiment: what to compute, on which system, at which scales."""
    version: int = CONFIG_VERSION
    experiment: Experiment
    description: str = ""
    system: SystemConfig = Field(default_factory=SystemConfig)
    potential: PotentialConfig = Field(default_factory=PotentialConfig)
    decomposition: DecompositionConfig = Field(default_factory=DecompositionConfig)
    scales: ScaleConfig = Field(default_factory=ScaleConfig)
    roof: Optional[RoofConfig] = None
    flow: FlowConfig = Field(default_factory=FlowConfig)
    constraint: ConstraintConfig = Field(default_factory=ConstraintConfig)
    checks: ChecksConfig = Field(default_factory=ChecksConfig)
    budgets: BudgetConfig = Field(default_factory=BudgetConfig)
    seed: int = 0

    @field_validator("version")
    @classmethod
    def _known_version(cls, value: int) -> int:
        if value != CONFIG_VERSION:
            raise ValueError(f"unsupported config version {value}, expected {CONFIG_VERSION}")
        return value

    @model_validator(mode="after")
    def _experiment_sections(self) -> "ExperimentConfig":
        if self.experiment == "flow-pressure" and self.roof is None:
            raise ValueError("roof: flow experiments need a [roof] section")
        if self.experiment == "certify":
            eps = self.scales.eps_scale
            if eps is None:
                raise ValueError("scales.eps: certificates need a weight scale")
            gap = self.scales.delta_scale.exponent - eps.exponent
            if gap < LADDER_GAP:
                raise ValueError(
                    f"scales.delta: eps > 40 delta needs exponents {LADDER_GAP} apart, got {gap}"
                )
        return self

    @classmethod
    def load(cls, path: Path) -> "ExperimentConfig":
        """Read a TOML (or YAML) experiment file."""
        return cls.model_validate(read_document(path))

    def semantic_dump(self) -> Dict[str, Any]:
        return self.model_dump(mode="json", exclude={"description"})

    @property
    def hash(self) -> str:
        """sha256 of the canonical JSON of the validated config, defaults included."""
        return config_hash(self.semantic_dump())


def read_document(path: Path) -> Dict[str, Any]:
    path = Path(path)
    if not path.exists():
        raise ConfigurationError(f"Config file {path} does not exist")
    try:
        if path.suffix in (".yaml", ".yml"):
            data = yaml.safe_load(path.read_text(encoding="utf-8"))
        else:
            data = toml.load(path)
    except (toml.TomlDecodeError, yaml.YAMLError) as e:
        raise ConfigurationError(f"Cannot parse {path}: {e}")
    if not isinstance(data, dict):
        raise ConfigurationError(f"{path} does not hold a table of settings")
    return data
