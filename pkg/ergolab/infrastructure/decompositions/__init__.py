"""Concrete decomposition rules and the factory that builds them from configs."""

from typing import Any, Dict

from ...core.interfaces.admissibility import IAdmissibilityRule
from ...core.interfaces.base import ConfigurationError
from ...core.interfaces.decomposition import IDecompositionRule
from ...core.domain.symbolic import word_from_string
from ..rules.beta import BetaShiftRule
from .beta_suffix import BetaSuffixDecomposition
from .trivial import TrivialDecomposition
from .user_table import UserTableDecomposition

__all__ = [
    "BetaSuffixDecomposition",
    "TrivialDecomposition",
    "UserTableDecomposition",
    "build_decomposition",
]


def build_decomposition(spec: Dict[str, Any], rule: IAdmissibilityRule) -> IDecompositionRule:
    """Create a decomposition rule for the given admissibility rule."""
    kind = spec.get("kind", "trivial")
    if kind == "trivial":
        return TrivialDecomposition()
    if kind == "beta_suffix":
        if not isinstance(rule, BetaShiftRule):
            raise ConfigurationError("The beta-suffix decomposition needs a beta shift")
        return BetaSuffixDecomposition(rule)
    if kind == "user_table":
        overrides = {
            word_from_string(key): tuple(value)
            for key, value in (spec.get("overrides") or {}).items()
        }
        return UserTableDecomposition(
            prefixes=[word_from_string(w) for w in spec.get("prefixes") or []],
            suffixes=[word_from_string(w) for w in spec.get("suffixes") or []],
            overrides=overrides,
            strict=bool(spec.get("strict", False)),
        )
    raise ConfigurationError(f"Unknown decomposition '{kind}'")
