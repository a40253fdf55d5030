"""Full shift on k symbols."""

from typing import Any, Dict, Optional

from ...core.interfaces.admissibility import IAdmissibilityRule, State, Word
from ...core.interfaces.base import ConfigurationError


class FullShiftRule(IAdmissibilityRule):
    """Every word is admissible."""

    def __init__(self, k: int) -> None:
        if k < 2:
            raise ConfigurationError(f"Full shift needs at least 2 symbols, got {k}")
        self._k = k

    @property
    def name(self) -> str:
        return f"full-{self._k}"

    @property
    def alphabet_size(self) -> int:
        return self._k

    @property
    def initial_state(self) -> State:
        return 0

    def step(self, state: State, symbol: int) -> Optional[State]:
        return 0 if 0 <= symbol < self._k else None

    def default_cycle(self) -> Word:
        return (0,)

    def describe(self) -> Dict[str, Any]:
        return {"rule": "full"}
