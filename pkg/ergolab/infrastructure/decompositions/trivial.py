"""Trivial decomposition: every segment is good."""

from typing import Any, Dict, List, Tuple

from ...core.interfaces.decomposition import IDecompositionRule, Word


class TrivialDecomposition(IDecompositionRule):
    """P and S contain only empty segments, so (p, g, s) = (0, n, 0)."""

    @property
    def name(self) -> str:
        return "trivial"

    def split(self, word: Word) -> Tuple[int, int, int]:
        return 0, len(word), 0

    def prefix_words(self, length: int) -> List[Word]:
        return [()] if length == 0 else []

    def suffix_words(self, length: int) -> List[Word]:
        return [()] if length == 0 else []

    def describe(self) -> Dict[str, Any]:
        return {"decomposition": "trivial"}
