"""Segment collection interface: predicates C_n on finite orbit segments."""

from abc import ABC, abstractmethod
from typing import Callable, List, Tuple

Word = Tuple[int, ...]
WordSource = Callable[[int], List[Word]]


class ISegmentCollection(ABC):
    """Interface for collections C of orbit segments, decided on central words."""

    @property
    @abstractmethod
    def name(self) -> str:
        """Return a short human-readable name."""
        pass

    @abstractmethod
    def contains(self, word: Word) -> bool:
        """Return True if the segment with this central word lies in C."""
        pass

    def words(self, length: int, all_words: WordSource) -> List[Word]:
        """Return the sorted central words of C_n.

        ``all_words`` enumerates every admissible word of a length; collections
        that can generate their members directly override this.
        """
        return [w for w in all_words(length) if self.contains(w)]

    @property
    def is_everything(self) -> bool:
        """Return True if C contains every segment."""
        return False
