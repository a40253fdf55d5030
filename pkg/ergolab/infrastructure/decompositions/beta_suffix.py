"""Suffix decomposition of beta shifts along the expansion of 1."""

from typing import Any, Dict, List, Tuple

from ...core.interfaces.admissibility import AdmissibilityError
from ...core.interfaces.decomposition import DomainError, IDecompositionRule, Word
from ..rules.beta import BetaShiftRule


class BetaSuffixDecomposition(IDecompositionRule):
    """p = 0 and s is the match length with the expansion of 1 after reading the word.

    Good words are those that leave the beta automaton in its initial state;
    S holds the prefixes of the expansion, one word per length.
    """

    def __init__(self, rule: BetaShiftRule) -> None:
        self.rule = rule

    @property
    def name(self) -> str:
        return "beta-suffix"

    def split(self, word: Word) -> Tuple[int, int, int]:
        try:
            s = self.rule.match_length(word)
        except AdmissibilityError as e:
            raise DomainError(str(e)) from e
        return 0, len(word) - s, s

    def prefix_words(self, length: int) -> List[Word]:
        return [()] if length == 0 else []

    def suffix_words(self, length: int) -> List[Word]:
        max_length = self.rule.max_word_length
        if max_length is not None and length > max_length:
            return []
        return [self.rule.prefix(length)]

    def in_suffix(self, word: Word) -> bool:
        max_length = self.rule.max_word_length
        if max_length is not None and len(word) > max_length:
            return False
        return tuple(word) == self.rule.prefix(len(word))

    def describe(self) -> Dict[str, Any]:
        return {"decomposition": "beta_suffix", "digits": list(self.rule.digits)}
