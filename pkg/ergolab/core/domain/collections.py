"""Collections of orbit segments, decided on the central word of a segment."""

from typing import Iterable, List, Sequence, Set

from ..interfaces.collection import ISegmentCollection, Word, WordSource
from ..interfaces.decomposition import DomainError, IDecompositionRule
from .symbolic import word_to_string


class AllSegments(ISegmentCollection):
    """Every orbit segment."""

    @property
    def name(self) -> str:
        return "all"

    def contains(self, word: Word) -> bool:
        return True

    def words(self, length: int, all_words: WordSource) -> List[Word]:
        return all_words(length)

    @property
    def is_everything(self) -> bool:
        return True


class EmptySegments(ISegmentCollection):
    """No orbit segment at all."""

    @property
    def name(self) -> str:
        return "empty"

    def contains(self, word: Word) -> bool:
        return False

    def words(self, length: int, all_words: WordSource) -> List[Word]:
        return []


class ExplicitSegments(ISegmentCollection):
    """A finite list of central words."""

    def __init__(self, members: Iterable[Sequence[int]], name: str = "explicit") -> None:
        self.members: Set[Word] = {tuple(w) for w in members}
        self._name = name

    @property
    def name(self) -> str:
        return self._name

    def contains(self, word: Word) -> bool:
        return tuple(word) in self.members

    def words(self, length: int, all_words: WordSource) -> List[Word]:
        admissible = set(all_words(length)) if self.members else set()
        return sorted(w for w in self.members if len(w) == length and w in admissible)

    def __repr__(self) -> str:
        return f"ExplicitSegments({sorted(word_to_string(w) for w in self.members)})"


class GoodSegments(ISegmentCollection):
    """Segments whose decomposition has no prefix and no suffix."""

    def __init__(self, rule: IDecompositionRule) -> None:
        self.rule = rule

    @property
    def name(self) -> str:
        return f"G[{self.rule.name}]"

    def contains(self, word: Word) -> bool:
        try:
            return self.rule.is_good(word)
        except DomainError:
            return False


class GoodCore(ISegmentCollection):
    """G^M: segments in the domain with p <= M and s <= M."""

    def __init__(self, rule: IDecompositionRule, margin: int) -> None:
        if margin < 0:
            raise ValueError("Good-core margin M must be non-negative")
        self.rule = rule
        self.margin = margin

    @property
    def name(self) -> str:
        return f"G^{self.margin}[{self.rule.name}]"

    def contains(self, word: Word) -> bool:
        try:
            p, _, s = self.rule.split(word)
        except DomainError:
            return False
        return p <= self.margin and s <= self.margin


class PrefixSegments(ISegmentCollection):
    """The prefix collection P of a decomposition."""

    def __init__(self, rule: IDecompositionRule) -> None:
        self.rule = rule

    @property
    def name(self) -> str:
        return f"P[{self.rule.name}]"

    def contains(self, word: Word) -> bool:
        return self.rule.in_prefix(word)

    def words(self, length: int, all_words: WordSource) -> List[Word]:
        return sorted(self.rule.prefix_words(length))


class SuffixSegments(ISegmentCollection):
    """The suffix collection S of a decomposition."""

    def __init__(self, rule: IDecompositionRule) -> None:
        self.rule = rule

    @property
    def name(self) -> str:
        return f"S[{self.rule.name}]"

    def contains(self, word: Word) -> bool:
        return self.rule.in_suffix(word)

    def words(self, length: int, all_words: WordSource) -> List[Word]:
        return sorted(self.rule.suffix_words(length))


class OutsideDomain(ISegmentCollection):
    """D^c: segments the decomposition does not cover."""

    def __init__(self, rule: IDecompositionRule) -> None:
        self.rule = rule

    @property
    def name(self) -> str:
        return f"D^c[{self.rule.name}]"

    def contains(self, word: Word) -> bool:
        try:
            self.rule.split(word)
        except DomainError:
            return True
        return False


class Complement(ISegmentCollection):
    """Segments not in the wrapped collection."""

    def __init__(self, inner: ISegmentCollection) -> None:
        self.inner = inner

    @property
    def name(self) -> str:
        return f"not({self.inner.name})"

    def contains(self, word: Word) -> bool:
        return not self.inner.contains(word)


class Union(ISegmentCollection):
    """Segments belonging to any of the members."""

    def __init__(self, *members: ISegmentCollection) -> None:
        if not members:
            raise ValueError("A union needs at least one collection")
        self.members = members

    @property
    def name(self) -> str:
        return " | ".join(m.name for m in self.members)

    def contains(self, word: Word) -> bool:
        return any(m.contains(word) for m in self.members)

    def words(self, length: int, all_words: WordSource) -> List[Word]:
        found: Set[Word] = set()
        for member in self.members:
            found.update(member.words(length, all_words))
        return sorted(found)

    @property
    def is_everything(self) -> bool:
        return any(m.is_everything for m in self.members)


class Intersection(ISegmentCollection):
    """Segments belonging to every member."""

    def __init__(self, *members: ISegmentCollection) -> None:
        if not members:
            raise ValueError("An intersection needs at least one collection")
        self.members = members

    @property
    def name(self) -> str:
        return " & ".join(m.name for m in self.members)

    def contains(self, word: Word) -> bool:
        return all(m.contains(word) for m in self.members)

    def words(self, length: int, all_words: WordSource) -> List[Word]:
        narrow = [m for m in self.members if not m.is_everything]
        if not narrow:
            return all_words(length)
        first, rest = narrow[0], narrow[1:]
        return [w for w in first.words(length, all_words) if all(m.contains(w) for m in rest)]

    @property
    def is_everything(self) -> bool:
        return all(m.is_everything for m in self.members)
