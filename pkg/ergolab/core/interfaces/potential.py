"""Potential interface for tabulated potential functions on shift spaces."""

from abc import ABC, abstractmethod
from typing import Any, Dict, List, Tuple

from .base import ErgolabError

Word = Tuple[int, ...]


class IPotential(ABC):
    """Interface for potentials phi(x) = table(x_0 .. x_{depth-1}) +/- remainder."""

    @property
    @abstractmethod
    def name(self) -> str:
        """Return the potential variant name."""
        pass

    @property
    @abstractmethod
    def depth(self) -> int:
        """Return the number of forward coordinates the table reads."""
        pass

    @property
    @abstractmethod
    def table(self) -> Dict[Word, float]:
        """Return the value table keyed by admissible depth-words."""
        pass

    @property
    @abstractmethod
    def remainder(self) -> float:
        """Return the certified bound |phi - table| (0 for locally constant)."""
        pass

    @property
    def is_locally_constant(self) -> bool:
        """Return True when the table is exact."""
        return self.remainder == 0.0

    @abstractmethod
    def modulus(self, exponent: int) -> float:
        """Return a certified upper bound on Var(phi, 2^-exponent)."""
        pass

    def value(self, word: Word) -> float:
        """Return the tabulated value for a depth-word."""
        try:
            return self.table[tuple(word)]
        except KeyError:
            raise PotentialTableError(
                f"Potential {self.name} has no entry for word {''.join(map(str, word))}"
            )

    def table_variation(self, exponent: int) -> float:
        """Max |table(u) - table(v)| over words sharing their first min(exponent, depth) symbols."""
        keep = min(exponent, self.depth)
        spans: Dict[Word, List[float]] = {}
        for word, value in self.table.items():
            span = spans.setdefault(word[:keep], [value, value])
            span[0] = min(span[0], value)
            span[1] = max(span[1], value)
        return max((hi - lo for lo, hi in spans.values()), default=0.0)

    def analytic_bowen_bound(self, exponent: int) -> float:
        """Return 2 sum_{j>=0} Var(phi, 2^-(exponent+j)), a Bowen constant at that scale."""
        return 2 * sum(self.modulus(exponent + j) for j in range(max(0, self.depth - exponent)))

    @property
    def fingerprint(self) -> Tuple[Any, ...]:
        """Return a hashable value identifying the potential by its contents."""
        return (self.depth, self.remainder, tuple(sorted(self.table.items())))

    @property
    def amplitude(self) -> float:
        """Return max |table value|."""
        return max(abs(v) for v in self.table.values()) if self.table else 0.0

    @abstractmethod
    def describe(self) -> Dict[str, Any]:
        """Return a JSON-friendly description of the potential."""
        pass


class PotentialTableError(ErgolabError):
    """Raised when a potential table is incomplete or violates its modulus."""
