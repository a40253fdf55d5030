"""Beta shifts defined by the quasi-greedy expansion of 1."""

from typing import Any, Dict, Optional, Sequence

from ...core.interfaces.admissibility import (
    AdmissibilityError,
    IAdmissibilityRule,
    State,
    Word,
)
from ...core.interfaces.base import ConfigurationError


class BetaShiftRule(IAdmissibilityRule):
    """A word is admissible when each of its suffixes is lexicographically <= d.

    The automaton state is the length of the current match with a prefix of
    the expansion d. A periodic expansion folds the state modulo the period;
    a truncated one refuses to compare past ``truncation`` digits.
    """

    def __init__(self, digits: Sequence[int], periodic: bool = True, truncation: int = 64) -> None:
        digits = tuple(int(d) for d in digits)
        if not digits:
            raise ConfigurationError("Beta expansion needs at least one digit")
        if digits[0] < 1:
            raise ConfigurationError("Leading digit of the expansion of 1 must be positive")
        if any(d < 0 or d > digits[0] for d in digits):
            raise ConfigurationError("Expansion digits must lie in 0..d_0")
        if truncation < 1:
            raise ConfigurationError("Truncation depth must be positive")
        if not periodic and truncation > len(digits):
            raise ConfigurationError(
                f"Truncation depth {truncation} exceeds the {len(digits)} supplied digits"
            )
        self.digits = digits
        self.periodic = periodic
        self.truncation = truncation
        self._validate_self_maximal()

    def _validate_self_maximal(self) -> None:
        length = self.truncation if not self.periodic else max(self.truncation, 2 * len(self.digits))
        seq = [self.digit(i) for i in range(length)]
        for shift in range(1, length):
            tail = seq[shift:]
            if tail > seq[: len(tail)]:
                raise ConfigurationError(
                    f"Expansion is not its own lexicographic maximum (shift {shift} is larger)"
                )

    def digit(self, j: int) -> int:
        if self.periodic:
            return self.digits[j % len(self.digits)]
        if j >= self.truncation:
            raise AdmissibilityError(
                f"Comparison needs digit {j} beyond the truncation depth {self.truncation}"
            )
        return self.digits[j]

    def prefix(self, length: int) -> Word:
        """The first ``length`` digits of the expansion."""
        return tuple(self.digit(j) for j in range(length))

    def match_length(self, word: Sequence[int]) -> int:
        """Unfolded match state after reading ``word`` from state 0."""
        j = 0
        for a in word:
            d = self.digit(j)
            if a < d:
                j = 0
            elif a == d:
                j += 1
            else:
                raise AdmissibilityError("Word is not admissible for the beta shift")
        return j

    @property
    def name(self) -> str:
        body = "".join(str(d) for d in self.digits)
        return f"beta[{body}{'...' if self.periodic else ''}]"

    @property
    def alphabet_size(self) -> int:
        return self.digits[0] + 1

    @property
    def initial_state(self) -> State:
        return 0

    @property
    def max_word_length(self) -> Optional[int]:
        return None if self.periodic else self.truncation

    def step(self, state: State, symbol: int) -> Optional[State]:
        d = self.digit(state)
        if symbol < 0 or symbol > d:
            return None
        if symbol < d:
            return 0
        nxt = state + 1
        if self.periodic:
            return nxt % len(self.digits)
        return nxt

    def default_cycle(self) -> Word:
        return (0,)

    def describe(self) -> Dict[str, Any]:
        return {
            "rule": "beta",
            "digits": list(self.digits),
            "periodic": self.periodic,
            "truncation": self.truncation,
        }
