"""Concrete admissibility rules and the factory that builds them from configs."""

from typing import Any, Dict

from ...core.interfaces.admissibility import IAdmissibilityRule
from ...core.interfaces.base import ConfigurationError
from ...core.domain.symbolic import word_from_string
from .beta import BetaShiftRule
from .full import FullShiftRule
from .sft import SFTRule
from .sgap import SGapRule

__all__ = ["BetaShiftRule", "FullShiftRule", "SFTRule", "SGapRule", "build_rule"]


def build_rule(spec: Dict[str, Any]) -> IAdmissibilityRule:
    """Create a rule from a system description (``rule`` selects the variant)."""
    variant = spec.get("rule", "full")
    if variant == "full":
        return FullShiftRule(int(spec.get("alphabet") or 2))
    if variant == "sft":
        if spec.get("matrix"):
            return SFTRule(spec["matrix"])
        forbidden = [word_from_string(w) for w in spec.get("forbidden") or []]
        return SFTRule.forbidding(int(spec.get("alphabet") or 2), forbidden)
    if variant == "beta":
        digits = spec.get("digits")
        if isinstance(digits, str):
            digits = word_from_string(digits)
        if not digits:
            raise ConfigurationError("Beta shift needs the digits of the expansion of 1")
        return BetaShiftRule(
            digits,
            periodic=bool(spec.get("periodic", True)),
            truncation=int(spec.get("truncation") or (64 if spec.get("periodic", True) else len(digits))),
        )
    if variant == "sgap":
        return SGapRule(spec.get("gaps") or [], cap=spec.get("cap"))
    raise ConfigurationError(f"Unknown admissibility rule '{variant}'")
