"""S-gap shifts: runs of 0s between consecutive 1s have lengths in S."""

from typing import Any, Dict, FrozenSet, Iterable, Optional

from ...core.interfaces.admissibility import IAdmissibilityRule, State, Word
from ...core.interfaces.base import ConfigurationError

_LEAD = "lead"
_GAP = "gap"


class SGapRule(IAdmissibilityRule):
    """Binary shift whose 0-runs between 1s belong to a finite gap set.

    ``cap`` bounds the gaps used for enumeration; gaps above it are dropped.
    Leading and trailing 0-runs of a word only need to fit inside some gap.
    """

    def __init__(self, gaps: Iterable[int], cap: Optional[int] = None) -> None:
        gap_set = {int(g) for g in gaps}
        if not gap_set:
            raise ConfigurationError("S-gap shift needs a nonempty gap set")
        if any(g < 0 for g in gap_set):
            raise ConfigurationError("Gap lengths must be non-negative")
        if cap is not None:
            gap_set = {g for g in gap_set if g <= cap}
            if not gap_set:
                raise ConfigurationError(f"No gap length survives the cap {cap}")
        self.gaps: FrozenSet[int] = frozenset(gap_set)
        self.cap = cap
        self.max_gap = max(self.gaps)

    @property
    def name(self) -> str:
        return "sgap{" + ",".join(str(g) for g in sorted(self.gaps)) + "}"

    @property
    def alphabet_size(self) -> int:
        return 2

    @property
    def initial_state(self) -> State:
        return (_LEAD, 0)

    def step(self, state: State, symbol: int) -> Optional[State]:
        kind, zeros = state
        if symbol == 0:
            if zeros + 1 > self.max_gap:
                return None
            return (kind, zeros + 1)
        if symbol == 1:
            if kind == _GAP and zeros not in self.gaps:
                return None
            return (_GAP, 0)
        return None

    def default_cycle(self) -> Word:
        return (1,) + (0,) * min(self.gaps)

    def describe(self) -> Dict[str, Any]:
        return {"rule": "sgap", "gaps": sorted(self.gaps), "cap": self.cap}
