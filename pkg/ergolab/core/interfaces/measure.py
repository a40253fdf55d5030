"""Measure interface: anything that assigns masses to cylinder words."""

from abc import ABC, abstractmethod
from typing import Dict, Optional, Tuple

from .base import ErgolabError

Word = Tuple[int, ...]


class ICylinderMass(ABC):
    """Interface for shift-invariant measures queried through cylinder masses."""

    @property
    @abstractmethod
    def depth(self) -> Optional[int]:
        """Return the longest word length with a known mass (None if unbounded)."""
        pass

    @abstractmethod
    def mass(self, word: Word) -> float:
        """Return the mass of the cylinder [word] placed at any coordinate."""
        pass

    @abstractmethod
    def cylinder_masses(self, length: int) -> Dict[Word, float]:
        """Return the positive masses of all words of the given length."""
        pass


class DepthError(ErgolabError):
    """Raised when a measure is queried beyond the depth it describes."""


class ReducibleMatrixError(ErgolabError):
    """Raised when a transition matrix is not irreducible."""


class InfeasibleConstraintError(ErgolabError):
    """Raised when no invariant measure satisfies a constraint set."""
