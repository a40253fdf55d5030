"""Hölder potentials tabulated at finite depth with a certified modulus."""

from typing import Any, Dict, Iterable, Mapping, Optional

from ...core.interfaces.potential import IPotential, PotentialTableError, Word
from ...core.domain.symbolic import word_to_string

# relative slack allowed when checking table values against the modulus
_MODULUS_SLACK = 1e-12


class HolderTabulatedPotential(IPotential):
    """phi(x) lies within C_h 2^(-alpha D) of table(x_0 .. x_{D-1}).

    The modulus Var(phi, 2^-m) <= C_h 2^(-alpha m) is part of the contract;
    table values are checked against it when the potential is built.
    """

    def __init__(
        self,
        depth: int,
        table: Mapping[Word, float],
        c_holder: float,
        alpha: float,
        name: str = "",
    ) -> None:
        if depth < 1:
            raise PotentialTableError(f"Tabulation depth must be positive, got {depth}")
        if c_holder < 0:
            raise PotentialTableError("Hölder constant must be non-negative")
        if not 0 < alpha <= 1:
            raise PotentialTableError(f"Hölder exponent must lie in (0, 1], got {alpha}")
        clean = {tuple(w): float(v) for w, v in table.items()}
        if any(len(w) != depth for w in clean):
            raise PotentialTableError(f"All table words must have length {depth}")
        self._depth = depth
        self._table = clean
        self.c_holder = float(c_holder)
        self.alpha = float(alpha)
        self._name = name or f"holder-depth{depth}"
        self._check_modulus()

    def _check_modulus(self) -> None:
        for m in range(self._depth):
            observed = self.table_variation(m)
            bound = self.c_holder * 2.0 ** (-self.alpha * m)
            if observed > bound * (1 + _MODULUS_SLACK) + _MODULUS_SLACK:
                raise PotentialTableError(
                    f"Table varies by {observed:.6g} at scale 2^-{m}, above the modulus {bound:.6g}"
                )

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
        return self.c_holder * 2.0 ** (-self.alpha * self._depth)

    def modulus(self, exponent: int) -> float:
        tabulated = self.table_variation(exponent) + 2 * self.remainder
        return min(tabulated, self.c_holder * 2.0 ** (-self.alpha * exponent))

    def analytic_bowen_bound(self, exponent: int) -> float:
        """2 sum_j Var(phi, 2^-j eps) for eps = 2^-exponent, from the modulus."""
        ratio = 2.0 ** (-self.alpha)
        return 2 * self.c_holder * 2.0 ** (-self.alpha * exponent) / (1 - ratio)

    def describe(self) -> Dict[str, Any]:
        return {
            "kind": "holder",
            "name": self._name,
            "depth": self._depth,
            "c_holder": self.c_holder,
            "alpha": self.alpha,
            "values": {word_to_string(w): v for w, v in sorted(self._table.items())},
        }


def geometric_potential(
    words: Iterable[Word],
    alphabet_size: int,
    depth: int,
    amplitude: float = 1.0,
    alpha: float = 1.0,
    name: Optional[str] = None,
) -> HolderTabulatedPotential:
    """Tabulate phi(x) = a sum_{j>=0} x_j 2^(-alpha (j+1)) on the given depth-words.

    Each entry is the truncated sum plus the midpoint of the possible tail.
    """
    if amplitude < 0:
        raise PotentialTableError("Amplitude of a geometric potential must be non-negative")
    ratio = 2.0 ** (-alpha)
    c_holder = amplitude * (alphabet_size - 1) * ratio / (1 - ratio)
    tail_mid = 0.5 * c_holder * 2.0 ** (-alpha * depth)
    table: Dict[Word, float] = {}
    for word in words:
        head = sum(a * 2.0 ** (-alpha * (j + 1)) for j, a in enumerate(word))
        table[tuple(word)] = amplitude * head + tail_mid
    return HolderTabulatedPotential(
        depth,
        table,
        c_holder,
        alpha,
        name=name or f"geometric(a={amplitude:g},alpha={alpha:g},D={depth})",
    )
