"""Flow segment collection interface for suspension flows."""

from abc import ABC, abstractmethod
from typing import Any, Optional

from .base import ErgolabError


class IFlowCollection(ABC):
    """Interface for collections of flow orbit segments (p, t)."""

    @property
    @abstractmethod
    def name(self) -> str:
        """Return a short human-readable name."""
        pass

    @abstractmethod
    def contains(self, flow: Any, segment: Any) -> bool:
        """Return True if the FlowSegment lies in the collection."""
        pass

    def exact_bracket(self, flow: Any, segment: Any) -> Optional[bool]:
        """Decide membership in the bracket [C] directly, or return None.

        Collections whose membership has a closed form in (s, t) override this;
        the others are handled by breakpoint enumeration.
        """
        return None

    @property
    def is_everything(self) -> bool:
        """Return True if the collection contains every segment."""
        return False


class HorizonError(ErgolabError):
    """Raised when a flow time exceeds the configured horizon."""


class BracketingError(ErgolabError):
    """Raised when a root finder cannot bracket a sign change."""
