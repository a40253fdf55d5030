"""Report store interface for persisting experiment reports."""

from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Dict, List, Sequence

from .base import ErgolabError


class IReportStore(ABC):
    """Interface for the output directory that receives reports."""

    @property
    @abstractmethod
    def root_path(self) -> Path:
        """Return the output directory."""
        pass

    @abstractmethod
    def acquire_lock(self) -> None:
        """Claim the output directory for a single experiment."""
        pass

    @abstractmethod
    def release_lock(self) -> None:
        """Release the output directory."""
        pass

    @abstractmethod
    def write_json(self, name: str, payload: Dict[str, Any]) -> Path:
        """Write a JSON document deterministically and return its path."""
        pass

    @abstractmethod
    def write_csv(self, name: str, headers: List[str], rows: Sequence[Sequence[Any]]) -> Path:
        """Write a CSV table and return its path."""
        pass


class LockError(ErgolabError):
    """Raised when another experiment already writes to the output directory."""
