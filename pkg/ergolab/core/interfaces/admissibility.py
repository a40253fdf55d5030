"""Admissibility rule interface: the language of a two-sided shift space."""

from abc import ABC, abstractmethod
from typing import Any, Dict, Hashable, Optional, Tuple

from .base import ErgolabError

State = Hashable
Word = Tuple[int, ...]


class IAdmissibilityRule(ABC):
    """Interface for the rules that decide which finite words are admissible.

    Every rule is presented by a deterministic automaton: a word is admissible
    exactly when reading it from ``initial_state`` never fails. The automaton
    also drives connector searches and the spectral presentations.
    """

    @property
    @abstractmethod
    def name(self) -> str:
        """Return the rule variant name."""
        pass

    @property
    @abstractmethod
    def alphabet_size(self) -> int:
        """Return the number of symbols k (symbols are 0..k-1)."""
        pass

    @property
    @abstractmethod
    def initial_state(self) -> State:
        """Return the automaton state before any symbol is read."""
        pass

    @abstractmethod
    def step(self, state: State, symbol: int) -> Optional[State]:
        """Read one symbol; return the next state or None if inadmissible."""
        pass

    @abstractmethod
    def default_cycle(self) -> Word:
        """Return a word whose bi-infinite repetition is admissible."""
        pass

    @property
    def max_word_length(self) -> Optional[int]:
        """Return the longest word length the rule can decide, if bounded."""
        return None

    @abstractmethod
    def describe(self) -> Dict[str, Any]:
        """Return a JSON-friendly description of the rule."""
        pass


class AdmissibilityError(ErgolabError):
    """Raised when a word or point violates the rule, or cannot be decided."""


class InsufficientWindowError(ErgolabError):
    """Raised when a point description does not determine a requested coordinate."""


class DegenerateScaleError(ErgolabError):
    """Raised when a scale of 1 is used where a proper Bowen ball is required."""
