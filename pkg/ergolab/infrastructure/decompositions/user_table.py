"""Decompositions described by explicit prefix and suffix word lists."""

from typing import Any, Dict, Iterable, List, Mapping, Optional, Set, Tuple

from ...core.interfaces.base import ConfigurationError
from ...core.interfaces.decomposition import DomainError, IDecompositionRule, Word
from ...core.domain.symbolic import word_to_string


class UserTableDecomposition(IDecompositionRule):
    """Greedy split: the longest listed prefix, then the longest listed suffix of the rest.

    Explicit ``overrides`` fix (p, g, s) for individual words. With ``strict``
    the domain D is limited to the overridden words.
    """

    def __init__(
        self,
        prefixes: Iterable[Word] = (),
        suffixes: Iterable[Word] = (),
        overrides: Optional[Mapping[Word, Tuple[int, int, int]]] = None,
        strict: bool = False,
    ) -> None:
        self.prefixes: Set[Word] = {tuple(w) for w in prefixes} | {()}
        self.suffixes: Set[Word] = {tuple(w) for w in suffixes} | {()}
        self.overrides: Dict[Word, Tuple[int, int, int]] = {}
        for word, split in (overrides or {}).items():
            word = tuple(word)
            p, g, s = (int(v) for v in split)
            if min(p, g, s) < 0 or p + g + s != len(word):
                raise ConfigurationError(
                    f"Override for {word_to_string(word)} must be non-negative and sum to {len(word)}"
                )
            self.prefixes.add(word[:p])
            self.suffixes.add(word[p + g:])
            self.overrides[word] = (p, g, s)
        self.strict = strict
        if strict and not self.overrides:
            raise ConfigurationError("A strict user decomposition needs explicit overrides")

    @property
    def name(self) -> str:
        return "user-table"

    def split(self, word: Word) -> Tuple[int, int, int]:
        word = tuple(word)
        if word in self.overrides:
            return self.overrides[word]
        if self.strict and word:
            raise DomainError(f"Segment {word_to_string(word)} lies outside the tabulated domain")
        n = len(word)
        p = max(len(w) for w in self.prefixes if word[: len(w)] == w)
        rest = word[p:]
        s = max(len(w) for w in self.suffixes if len(w) <= len(rest) and rest[len(rest) - len(w):] == w)
        return p, n - p - s, s

    def prefix_words(self, length: int) -> List[Word]:
        return sorted(w for w in self.prefixes if len(w) == length)

    def suffix_words(self, length: int) -> List[Word]:
        return sorted(w for w in self.suffixes if len(w) == length)

    def in_prefix(self, word: Word) -> bool:
        return tuple(word) in self.prefixes

    def in_suffix(self, word: Word) -> bool:
        return tuple(word) in self.suffixes

    def describe(self) -> Dict[str, Any]:
        return {
            "decomposition": "user_table",
            "prefixes": sorted(word_to_string(w) for w in self.prefixes if w),
            "suffixes": sorted(word_to_string(w) for w in self.suffixes if w),
            "overrides": {word_to_string(w): list(v) for w, v in sorted(self.overrides.items())},
            "strict": self.strict,
        }
