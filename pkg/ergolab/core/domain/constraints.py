"""Linear constraint sets on cylinder masses of invariant measures."""

from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Mapping, Sequence

from ..interfaces.base import ConfigurationError
from .symbolic import Word, word_from_string, word_to_string

_SENSES = ("<=", ">=", "==")


@dataclass(frozen=True)
class LinearConstraint:
    """sum_w c_w nu[w] (sense) bound over words of a single length."""
    coefficients: Mapping[Word, float]
    sense: str
    bound: float

    def __post_init__(self) -> None:
        if self.sense not in _SENSES:
            raise ConfigurationError(f"Constraint sense must be one of {_SENSES}, got '{self.sense}'")
        if not self.coefficients:
            raise ConfigurationError("A constraint needs at least one coefficient")
        if len({len(w) for w in self.coefficients}) != 1:
            raise ConfigurationError("Constraint words must share one length")

    @property
    def depth(self) -> int:
        return len(next(iter(self.coefficients)))

    def value(self, masses: Mapping[Word, float]) -> float:
        return sum(c * masses.get(w, 0.0) for w, c in self.coefficients.items())

    def satisfied(self, masses: Mapping[Word, float], tolerance: float = 1e-12) -> bool:
        v = self.value(masses)
        if self.sense == "<=":
            return v <= self.bound + tolerance
        if self.sense == ">=":
            return v >= self.bound - tolerance
        return abs(v - self.bound) <= tolerance

    def describe(self) -> Dict[str, Any]:
        return {
            "coefficients": {word_to_string(w): c for w, c in sorted(self.coefficients.items())},
            "sense": self.sense,
            "bound": self.bound,
        }


class ConstraintSet:
    """A closed convex set A of measures cut out by linear constraints."""

    def __init__(self, constraints: Sequence[LinearConstraint] = (), name: str = "") -> None:
        self.constraints = list(constraints)
        self.name = name or (" & ".join(_label(c) for c in self.constraints) or "all")

    @classmethod
    def frequency(cls, symbol: int, sense: str, bound: float) -> "ConstraintSet":
        """{nu : nu[symbol] (sense) bound}."""
        return cls([LinearConstraint({(symbol,): 1.0}, sense, bound)])

    @classmethod
    def from_rows(cls, rows: Iterable[Mapping[str, Any]], name: str = "") -> "ConstraintSet":
        """Rows {"word": "1", "sense": ">=", "bound": 0.75} or with a "coefficients" table."""
        constraints: List[LinearConstraint] = []
        for row in rows:
            if "coefficients" in row:
                coefficients = {word_from_string(str(w)): float(c) for w, c in row["coefficients"].items()}
            elif "word" in row:
                coefficients = {word_from_string(str(row["word"])): 1.0}
            else:
                raise ConfigurationError("Constraint rows need 'word' or 'coefficients'")
            constraints.append(LinearConstraint(coefficients, str(row.get("sense", ">=")), float(row["bound"])))
        return cls(constraints, name)

    @property
    def depth(self) -> int:
        return max((c.depth for c in self.constraints), default=0)

    @property
    def is_everything(self) -> bool:
        return not self.constraints

    def satisfied(self, masses_by_depth: Mapping[int, Mapping[Word, float]], tolerance: float = 1e-12) -> bool:
        """Check every constraint against the marginal of its own depth."""
        return all(c.satisfied(masses_by_depth[c.depth], tolerance) for c in self.constraints)

    def describe(self) -> Dict[str, Any]:
        return {"name": self.name, "constraints": [c.describe() for c in self.constraints]}


def _label(constraint: LinearConstraint) -> str:
    terms = " + ".join(
        f"{c:g} nu[{word_to_string(w)}]" if c != 1 else f"nu[{word_to_string(w)}]"
        for w, c in sorted(constraint.coefficients.items())
    )
    return f"{terms} {constraint.sense} {constraint.bound:g}"
