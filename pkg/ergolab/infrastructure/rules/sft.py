"""Shifts of finite type given by a 0/1 transition matrix."""

from typing import Any, Dict, List, Optional, Sequence

import networkx as nx
import numpy as np

from ...core.interfaces.admissibility import IAdmissibilityRule, State, Word
from ...core.interfaces.base import ConfigurationError

_START = -1


class SFTRule(IAdmissibilityRule):
    """Symbol b may follow a exactly when matrix[a][b] == 1."""

    def __init__(self, matrix: Sequence[Sequence[int]]) -> None:
        array = np.asarray(matrix, dtype=int)
        if array.ndim != 2 or array.shape[0] != array.shape[1]:
            raise ConfigurationError("SFT transition matrix must be square")
        if array.shape[0] < 2:
            raise ConfigurationError("SFT needs at least 2 symbols")
        if not np.isin(array, (0, 1)).all():
            raise ConfigurationError("SFT transition matrix entries must be 0 or 1")
        for a in range(array.shape[0]):
            if not array[a].any():
                raise ConfigurationError(f"Symbol {a} has no successor (row {a} is zero)")
            if not array[:, a].any():
                raise ConfigurationError(f"Symbol {a} has no predecessor (column {a} is zero)")
        self.matrix = array

    @classmethod
    def forbidding(cls, k: int, forbidden: Sequence[Word]) -> "SFTRule":
        """Build the one-step SFT forbidding the given two-symbol words."""
        matrix = np.ones((k, k), dtype=int)
        for word in forbidden:
            if len(word) != 2:
                raise ConfigurationError("Only two-symbol forbidden words define a one-step SFT")
            matrix[word[0], word[1]] = 0
        return cls(matrix.tolist())

    @property
    def name(self) -> str:
        rows = ";".join("".join(str(v) for v in row) for row in self.matrix)
        return f"sft[{rows}]"

    @property
    def alphabet_size(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def initial_state(self) -> State:
        return _START

    def step(self, state: State, symbol: int) -> Optional[State]:
        if not 0 <= symbol < self.alphabet_size:
            return None
        if state == _START or self.matrix[state, symbol]:
            return symbol
        return None

    def symbol_graph(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        graph.add_nodes_from(range(self.alphabet_size))
        for a, b in zip(*np.nonzero(self.matrix)):
            graph.add_edge(int(a), int(b))
        return graph

    def default_cycle(self) -> Word:
        edges = nx.find_cycle(self.symbol_graph(), source=0)
        return tuple(int(u) for u, _ in edges)

    def describe(self) -> Dict[str, Any]:
        rows: List[List[int]] = self.matrix.tolist()
        return {"rule": "sft", "matrix": rows}
