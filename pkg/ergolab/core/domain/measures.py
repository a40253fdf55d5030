"""Shift-invariant measures described by cylinder masses or Markov chains."""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..interfaces.measure import DepthError, ICylinderMass
from .symbolic import Word, word_to_string


class CylinderMeasure(ICylinderMass):
    """A measure known through its masses on admissible words of one depth."""

    def __init__(self, depth: int, masses: Dict[Word, float], label: str = "cylinder") -> None:
        if depth < 1:
            raise DepthError(f"Cylinder measure depth must be positive, got {depth}")
        if any(len(w) != depth for w in masses):
            raise DepthError(f"All words of a depth-{depth} measure must have length {depth}")
        if any(m < 0 for m in masses.values()):
            raise ValueError("Cylinder masses must be non-negative")
        self._depth = depth
        self.masses = {tuple(w): float(m) for w, m in masses.items() if m > 0}
        self.label = label
        self._marginals: Dict[int, Dict[Word, float]] = {depth: self.masses}

    @property
    def depth(self) -> Optional[int]:
        return self._depth

    @property
    def total(self) -> float:
        return float(sum(self.masses.values()))

    def normalized(self) -> "CylinderMeasure":
        total = self.total
        if total <= 0:
            raise ValueError("Cannot normalize a zero measure")
        return CylinderMeasure(self._depth, {w: m / total for w, m in self.masses.items()}, self.label)

    def marginal(self, k: int) -> "CylinderMeasure":
        """Depth-k marginal obtained by summing over trailing symbols."""
        return CylinderMeasure(k, self.cylinder_masses(k), self.label)

    def cylinder_masses(self, length: int) -> Dict[Word, float]:
        if length > self._depth:
            raise DepthError(f"Measure '{self.label}' is only known to depth {self._depth}")
        if length not in self._marginals:
            out: Dict[Word, float] = {}
            for w, m in self.masses.items():
                key = w[:length]
                out[key] = out.get(key, 0.0) + m
            self._marginals[length] = out
        return self._marginals[length]

    def leading_marginal(self, k: int) -> Dict[Word, float]:
        """Depth-k marginal obtained by summing over leading symbols."""
        if k > self._depth:
            raise DepthError(f"Measure '{self.label}' is only known to depth {self._depth}")
        out: Dict[Word, float] = {}
        for w, m in self.masses.items():
            key = w[self._depth - k:]
            out[key] = out.get(key, 0.0) + m
        return out

    def mass(self, word: Word) -> float:
        word = tuple(word)
        if not word:
            return self.total
        return self.cylinder_masses(len(word)).get(word, 0.0)

    @property
    def shift_defect(self) -> float:
        """Total variation between the two depth-(k-1) marginals."""
        if self._depth < 2:
            return 0.0
        trailing = self.cylinder_masses(self._depth - 1)
        leading = self.leading_marginal(self._depth - 1)
        keys = set(trailing) | set(leading)
        return 0.5 * sum(abs(trailing.get(w, 0.0) - leading.get(w, 0.0)) for w in keys)

    def to_dict(self) -> Dict[str, float]:
        return {word_to_string(w): m for w, m in sorted(self.masses.items())}


@dataclass
class MarkovMeasure(ICylinderMass):
    """Stationary Markov chain on labelled states.

    The symbol at a coordinate is the first symbol of the current state's
    label, so higher-block presentations describe the same shift measure.
    """
    labels: List[Word]
    stationary: np.ndarray
    transition: np.ndarray
    name: str = "markov"
    _cache: Dict[int, Dict[Word, float]] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        self.stationary = np.asarray(self.stationary, dtype=float)
        self.transition = np.asarray(self.transition, dtype=float)
        n = len(self.labels)
        if self.transition.shape != (n, n) or self.stationary.shape != (n,):
            raise ValueError("Markov measure dimensions do not match its labels")
        if np.any(self.transition < -1e-15) or np.any(self.stationary < -1e-15):
            raise ValueError("Markov measure entries must be non-negative")
        if not np.allclose(self.transition.sum(axis=1), 1.0, atol=1e-10):
            raise ValueError("Rows of the transition matrix must sum to 1")
        if abs(self.stationary.sum() - 1.0) > 1e-10:
            raise ValueError("Stationary vector must sum to 1")

    @property
    def depth(self) -> Optional[int]:
        return None

    @property
    def symbols(self) -> List[int]:
        return [label[0] for label in self.labels]

    @property
    def stationarity_defect(self) -> float:
        return float(np.abs(self.stationary @ self.transition - self.stationary).max())

    def mass(self, word: Word) -> float:
        """Forward algorithm over the states consistent with the word."""
        word = tuple(word)
        if not word:
            return 1.0
        symbols = np.array(self.symbols)
        vec = np.where(symbols == word[0], self.stationary, 0.0)
        for a in word[1:]:
            vec = (vec @ self.transition) * (symbols == a)
            if not vec.any():
                return 0.0
        return float(vec.sum())

    def cylinder_masses(self, length: int) -> Dict[Word, float]:
        if length in self._cache:
            return self._cache[length]
        symbols = np.array(self.symbols)
        alphabet = sorted(set(self.symbols))
        layer: List[Tuple[Word, np.ndarray]] = []
        for a in alphabet:
            vec = np.where(symbols == a, self.stationary, 0.0)
            if vec.sum() > 0:
                layer.append(((a,), vec))
        for _ in range(length - 1):
            nxt: List[Tuple[Word, np.ndarray]] = []
            for word, vec in layer:
                step = vec @ self.transition
                for a in alphabet:
                    out = step * (symbols == a)
                    if out.sum() > 0:
                        nxt.append((word + (a,), out))
            layer = nxt
        masses = {word: float(vec.sum()) for word, vec in layer} if length > 0 else {(): 1.0}
        self._cache[length] = masses
        return masses


@dataclass
class RPFSolution:
    """Leading eigendata of a weighted transition matrix and its equilibrium chain."""
    eigenvalue: float
    left: np.ndarray
    right: np.ndarray
    measure: MarkovMeasure
    residual: float
    spectral_gap_warning: bool
    second_modulus: float

    @property
    def pressure(self) -> float:
        return float(np.log(self.eigenvalue))


def bernoulli_measure(probabilities: Sequence[float], name: str = "") -> MarkovMeasure:
    """Product measure with the given one-symbol probabilities."""
    probs = np.asarray(probabilities, dtype=float)
    k = len(probs)
    label = name or "bernoulli(" + ",".join(f"{p:.6g}" for p in probs) + ")"
    return MarkovMeasure(
        labels=[(a,) for a in range(k)],
        stationary=probs,
        transition=np.tile(probs, (k, 1)),
        name=label,
    )


def cycle_measure(block: Sequence[int]) -> MarkovMeasure:
    """Uniform measure on the periodic orbit of ``block``."""
    block = tuple(block)
    n = len(block)
    transition = np.zeros((n, n))
    for i in range(n):
        transition[i, (i + 1) % n] = 1.0
    return MarkovMeasure(
        labels=[(a,) for a in block],
        stationary=np.full(n, 1.0 / n),
        transition=transition,
        name=f"cycle({word_to_string(block)})",
    )


@dataclass
class Presentation:
    """Vertex-labelled graph of (automaton state, depth-word) pairs.

    ``labels[i]`` is the depth-word read from vertex i and ``weights[i]`` its
    tabulated potential value; edge i -> j appends one symbol.
    """
    vertices: List[Tuple[object, Word]]
    adjacency: np.ndarray
    weights: np.ndarray

    @property
    def labels(self) -> List[Word]:
        return [word for _, word in self.vertices]

    @property
    def size(self) -> int:
        return len(self.vertices)

    def weighted_matrix(self) -> np.ndarray:
        """B_ij = e^{phi(i)} A_ij."""
        return np.exp(self.weights)[:, None] * self.adjacency

    def restrict(self, indices: Sequence[int]) -> "Presentation":
        idx = list(indices)
        return Presentation(
            [self.vertices[i] for i in idx],
            self.adjacency[np.ix_(idx, idx)],
            self.weights[idx],
        )
