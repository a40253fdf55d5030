"""Words, metrics, Bowen balls and separated sets on shift spaces."""

from typing import Dict, List, Optional, Tuple
import logging

from ..interfaces.admissibility import AdmissibilityError, InsufficientWindowError, State
from ..interfaces.collection import ISegmentCollection
from ..domain.collections import AllSegments
from ..domain.reports import Distance
from ..domain.symbolic import DyadicScale, Point, ShiftSystem, Word, WordBudget, word_to_string


class SymbolicService:
    """Enumerates languages and evaluates the two-sided dyadic metric."""

    def __init__(self, budget: WordBudget, metric_horizon: int = 64) -> None:
        self.budget = budget
        self.metric_horizon = metric_horizon
        self.logger = logging.getLogger(__name__)
        self._layers: Dict[Tuple[ShiftSystem, int], List[Tuple[Word, State]]] = {}
        self._counts: Dict[Tuple[ShiftSystem, State, int], int] = {}

    def enumerate_words(self, system: ShiftSystem, n: int) -> List[Word]:
        """Admissible words of length n in lexicographic order."""
        return [word for word, _ in self._layer(system, n)]

    def _layer(self, system: ShiftSystem, n: int) -> List[Tuple[Word, State]]:
        if n < 0:
            raise ValueError(f"Word length must be non-negative, got {n}")
        limit = system.rule.max_word_length
        if limit is not None and n > limit:
            raise AdmissibilityError(
                f"{system.name} cannot decide words longer than its truncation depth {limit}"
            )
        key = (system, n)
        if key in self._layers:
            return self._layers[key]
        if n == 0:
            layer = [((), system.rule.initial_state)]
        else:
            self.budget.require(system.k ** n, f"Enumerating words of length {n} on {system.name}")
            layer = []
            for word, state in self._layer(system, n - 1):
                for a in system.alphabet.symbols:
                    nxt = system.safe_step(state, a)
                    if nxt is not None:
                        layer.append((word + (a,), nxt))
            self.budget.charge(len(layer), f"Enumerating words of length {n}")
            self.logger.debug(f"{system.name}: {len(layer)} admissible words of length {n}")
        self._layers[key] = layer
        return layer

    def extensions(self, system: ShiftSystem, word: Word, left: int, right: int) -> List[Word]:
        """Admissible words u + word + v with |u| = left and |v| = right, sorted."""
        word = tuple(word)
        out: List[Word] = []
        for prefix in self.enumerate_words(system, left):
            state = system.run(prefix + word)
            if state is None:
                continue
            stack: List[Tuple[Word, State]] = [(prefix + word, state)]
            # depth-first in reverse symbol order keeps the output sorted
            while stack:
                current, q = stack.pop()
                if len(current) == left + len(word) + right:
                    out.append(current)
                    continue
                for a in reversed(system.alphabet.symbols):
                    nxt = system.safe_step(q, a)
                    if nxt is not None:
                        stack.append((current + (a,), nxt))
        self.budget.charge(len(out), "Extending words")
        return out

    def extension_count(self, system: ShiftSystem, word: Word, left: int, right: int) -> int:
        """Number of admissible words u + word + v with |u| = left and |v| = right."""
        total = 0
        for prefix in self.enumerate_words(system, left):
            state = system.run(prefix + tuple(word))
            if state is not None:
                total += self.continuations(system, state, right)
        return total

    def continuations(self, system: ShiftSystem, state: State, length: int) -> int:
        """Number of admissible words of the given length readable from ``state``."""
        key = (system, state, length)
        if key not in self._counts:
            if length == 0:
                count = 1
            else:
                count = 0
                for a in system.alphabet.symbols:
                    nxt = system.safe_step(state, a)
                    if nxt is not None:
                        count += self.continuations(system, nxt, length - 1)
            self._counts[key] = count
        return self._counts[key]

    def metric(self, x: Point, y: Point, horizon: Optional[int] = None) -> Distance:
        """d(x, y) = 2^-j for the least |i| = j with x_i != y_i, scanning |i| <= horizon."""
        return self.d_n(x, y, 1, horizon)

    def d_n(self, x: Point, y: Point, n: int, horizon: Optional[int] = None) -> Distance:
        """Bowen distance max_{0 <= k < n} d(sigma^k x, sigma^k y)."""
        if n < 1:
            raise ValueError(f"Bowen distance needs n >= 1, got {n}")
        horizon = self.metric_horizon if horizon is None else horizon
        if horizon < 0:
            raise ValueError("Metric horizon must be non-negative")
        for j in range(horizon + 1):
            coords = range(0, n) if j == 0 else (-j, n - 1 + j)
            try:
                if any(x.symbol(i) != y.symbol(i) for i in coords):
                    value = 2.0 ** -j
                    return Distance(value, value)
            except InsufficientWindowError:
                return Distance(0.0, 2.0 ** -j, truncated=True)
        return Distance(0.0, 2.0 ** -(horizon + 1), truncated=True)

    def ball_window(self, n: int, scale: DyadicScale) -> Tuple[int, int]:
        """Coordinates on which points of the closed Bowen ball B_n(x, scale) agree with x."""
        if n < 1:
            raise ValueError(f"Bowen balls need n >= 1, got {n}")
        r = scale.radius
        return -r, n - 1 + r

    def in_ball(self, x: Point, y: Point, n: int, scale: DyadicScale) -> bool:
        lo, hi = self.ball_window(n, scale)
        return x.window(lo, hi) == y.window(lo, hi)

    def separated_set(
        self,
        system: ShiftSystem,
        collection: Optional[ISegmentCollection],
        n: int,
        scale: DyadicScale,
    ) -> List[Word]:
        """A maximal (n, scale)-separated set of collection points, as window words.

        Each returned word spans the ball window [-r, n-1+r]; two points are
        separated exactly when these windows differ, so one point per window
        word is both maximal and spanning.
        """
        r = scale.radius
        return self.class_words(system, collection or AllSegments(), n, r, r)

    def class_words(
        self,
        system: ShiftSystem,
        collection: ISegmentCollection,
        n: int,
        left: int,
        right: int,
    ) -> List[Word]:
        """Admissible windows [-left, n-1+right] whose central n-word lies in the collection."""
        if collection.is_everything:
            return self.enumerate_words(system, n + left + right)
        out: List[Word] = []
        for word in collection.words(n, lambda length: self.enumerate_words(system, length)):
            if not system.accepts(word):
                self.logger.debug(f"Skipping inadmissible collection word {word_to_string(word)}")
                continue
            out.extend(self.extensions(system, word, left, right))
        return sorted(out)

    def random_point(self, system: ShiftSystem, rng: object, length: int) -> Point:
        """Close a random admissible word of the given length into a point."""
        return system.close_point(system.random_word(rng, length))
