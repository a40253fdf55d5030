"""Concrete potentials and the factory that builds them from configs."""

from typing import Any, Callable, Dict, List

from ...core.interfaces.potential import IPotential, PotentialTableError, Word
from ...core.interfaces.base import ConfigurationError
from ...core.domain.symbolic import word_from_string, word_to_string
from .holder import HolderTabulatedPotential, geometric_potential
from .locally_constant import LocallyConstantPotential

__all__ = [
    "HolderTabulatedPotential",
    "LocallyConstantPotential",
    "build_potential",
    "geometric_potential",
]


def build_potential(
    spec: Dict[str, Any],
    words: Callable[[int], List[Word]],
    alphabet_size: int,
) -> IPotential:
    """Create a potential from its config section.

    ``words(d)`` lists the admissible words of length d; tables must cover
    all of them (entries missing from ``values`` fall back to ``default``).
    """
    kind = spec.get("kind", "zero")
    if kind == "zero":
        return LocallyConstantPotential.constant(0.0, alphabet_size)
    if kind == "constant":
        return LocallyConstantPotential.constant(float(spec.get("value", 0.0)), alphabet_size)
    if kind == "geometric":
        depth = int(spec.get("depth") or 8)
        return geometric_potential(
            words(depth),
            alphabet_size,
            depth,
            amplitude=float(spec.get("amplitude", 1.0)),
            alpha=float(spec.get("alpha", 1.0)),
        )
    if kind not in ("locally_constant", "holder"):
        raise ConfigurationError(f"Unknown potential kind '{kind}'")

    depth = int(spec.get("depth") or 1)
    table = _complete_table(spec, words(depth), depth)
    if kind == "locally_constant":
        return LocallyConstantPotential(depth, table, name=spec.get("name", ""))
    if spec.get("c_holder") is None or spec.get("alpha") is None:
        raise ConfigurationError("A Hölder potential needs c_holder and alpha")
    return HolderTabulatedPotential(
        depth, table, float(spec["c_holder"]), float(spec["alpha"]), name=spec.get("name", "")
    )


def _complete_table(spec: Dict[str, Any], admissible: List[Word], depth: int) -> Dict[Word, float]:
    raw = {word_from_string(key): float(value) for key, value in (spec.get("values") or {}).items()}
    default = spec.get("default")
    table: Dict[Word, float] = {}
    for word in admissible:
        if word in raw:
            table[word] = raw[word]
        elif default is not None:
            table[word] = float(default)
        else:
            raise PotentialTableError(
                f"Potential table has no entry for admissible word {word_to_string(word)}"
            )
    extra = [w for w in raw if w not in table]
    if extra:
        raise PotentialTableError(
            "Potential table lists inadmissible or mis-sized words: "
            + ", ".join(word_to_string(w) for w in sorted(extra))
        )
    return table
