"""Locally constant potentials given by an exact value table."""

from typing import Any, Dict, Mapping

from ...core.interfaces.potential import IPotential, PotentialTableError, Word
from ...core.domain.symbolic import word_to_string


class LocallyConstantPotential(IPotential):
    """phi(x) = table(x_0 .. x_{depth-1}) exactly."""

    def __init__(self, depth: int, table: Mapping[Word, float], name: str = "") -> None:
        if depth < 1:
            raise PotentialTableError(f"Potential depth must be positive, got {depth}")
        clean: Dict[Word, float] = {}
        for word, value in table.items():
            word = tuple(word)
            if len(word) != depth:
                raise PotentialTableError(
                    f"Table word {word_to_string(word)} does not have length {depth}"
                )
            clean[word] = float(value)
        self._depth = depth
        self._table = clean
        self._name = name or f"lc-depth{depth}"

    @classmethod
    def constant(cls, value: float, alphabet_size: int) -> "LocallyConstantPotential":
        return cls(1, {(a,): value for a in range(alphabet_size)}, name=f"const({value:g})")

    @property
    def name(self) -> str:
        return self._name

    @property
    def depth(self) -> int:
        return self._depth

    @property
    def table(self) -> Dict[Word, float]:
        return self._table

    @property
    def remainder(self) -> float:
        return 0.0

    def modulus(self, exponent: int) -> float:
        if exponent >= self._depth:
            return 0.0
        return self.table_variation(exponent)

    def describe(self) -> Dict[str, Any]:
        return {
            "kind": "locally_constant",
            "name": self._name,
            "depth": self._depth,
            "values": {word_to_string(w): v for w, v in sorted(self._table.items())},
        }
