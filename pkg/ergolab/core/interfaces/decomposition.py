"""Decomposition interface: prefix/good/suffix splits of orbit segments."""

from abc import ABC, abstractmethod
from typing import Any, Dict, List, Tuple

from .base import ErgolabError

Word = Tuple[int, ...]


class IDecompositionRule(ABC):
    """Interface for rules assigning (p, g, s) with p + g + s = n to each word."""

    @property
    @abstractmethod
    def name(self) -> str:
        """Return the rule name."""
        pass

    @abstractmethod
    def split(self, word: Word) -> Tuple[int, int, int]:
        """Return (p, g, s) for an admissible word; raise DomainError outside D."""
        pass

    @abstractmethod
    def prefix_words(self, length: int) -> List[Word]:
        """Return the words of P of the given length."""
        pass

    @abstractmethod
    def suffix_words(self, length: int) -> List[Word]:
        """Return the words of S of the given length."""
        pass

    def in_prefix(self, word: Word) -> bool:
        """Return True if the word belongs to P."""
        return tuple(word) in self.prefix_words(len(word))

    def in_suffix(self, word: Word) -> bool:
        """Return True if the word belongs to S."""
        return tuple(word) in self.suffix_words(len(word))

    def is_good(self, word: Word) -> bool:
        """Return True if the word belongs to G."""
        p, g, s = self.split(word)
        return p == 0 and s == 0

    @abstractmethod
    def describe(self) -> Dict[str, Any]:
        """Return a JSON-friendly description of the rule."""
        pass


class DomainError(ErgolabError):
    """Raised when a segment lies outside the domain D of a decomposition."""


class GluingError(ErgolabError):
    """Raised when no admissible connector joins two segments within the gap bound."""

    def __init__(self, message: str, pair: Tuple[int, int]) -> None:
        super().__init__(message)
        self.pair = pair


class ScaleLadderError(ErgolabError):
    """Raised when the scales of a certificate are too close on the dyadic ladder."""
