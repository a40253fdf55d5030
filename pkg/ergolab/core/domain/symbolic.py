"""Symbolic domain values: words, dyadic scales, points and shift systems."""

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union
import logging
import math
import re

import networkx as nx

from ..interfaces.admissibility import (
    AdmissibilityError,
    DegenerateScaleError,
    IAdmissibilityRule,
    InsufficientWindowError,
    State,
)
from ..interfaces.base import BudgetExceededError, ConfigurationError

Word = Tuple[int, ...]

_SCALE_PATTERN = re.compile(r"^\s*2\s*(\^|\*\*)\s*\(?\s*-\s*(\d+)\s*\)?\s*$")


def word_from_string(text: str) -> Word:
    """Parse "0110" (or "0,1,10" for large alphabets) into a word."""
    text = text.strip()
    if not text:
        return ()
    if "," in text:
        return tuple(int(part) for part in text.split(","))
    return tuple(int(ch) for ch in text)


def word_to_string(word: Sequence[int]) -> str:
    """Render a word compactly; symbols above 9 are comma separated."""
    if any(a > 9 for a in word):
        return ",".join(str(a) for a in word)
    return "".join(str(a) for a in word)


@dataclass(frozen=True)
class Alphabet:
    """Symbols 0..size-1."""
    size: int

    def __post_init__(self) -> None:
        if self.size < 2:
            raise ConfigurationError(f"Alphabet size must be at least 2, got {self.size}")

    @property
    def symbols(self) -> range:
        return range(self.size)


@dataclass(frozen=True, order=True)
class DyadicScale:
    """A scale 2^-m on the dyadic ladder.

    With the metric d(x, y) = 2^-min{|i| : x_i != y_i}, the closed Bowen ball
    of order n and radius 2^-m is the set of points agreeing with x on the
    coordinate window [-(m-1), n-1+(m-1)].
    """
    exponent: int

    def __post_init__(self) -> None:
        if self.exponent < 0:
            raise ConfigurationError(f"Dyadic exponent must be non-negative, got {self.exponent}")

    @property
    def value(self) -> float:
        return 2.0 ** -self.exponent

    @property
    def exact(self) -> Fraction:
        return Fraction(1, 2 ** self.exponent)

    @property
    def is_degenerate(self) -> bool:
        """Scale 1: every pair of points is within distance 1."""
        return self.exponent == 0

    @property
    def radius(self) -> int:
        """Window radius m-1 of the Bowen balls at this scale."""
        if self.exponent == 0:
            raise DegenerateScaleError("Scale 1 has no window: the Bowen ball is the whole space")
        return self.exponent - 1

    def halve(self) -> "DyadicScale":
        return DyadicScale(self.exponent + 1)

    def double(self) -> "DyadicScale":
        if self.exponent == 0:
            raise ConfigurationError("Cannot double the scale 1")
        return DyadicScale(self.exponent - 1)

    @classmethod
    def ceiling(cls, value: float) -> "DyadicScale":
        """Return the smallest dyadic scale >= value (capped at 1)."""
        if value <= 0:
            raise ConfigurationError(f"Scale must be positive, got {value}")
        if value >= 1:
            return cls(0)
        m = int(math.floor(-math.log2(value)))
        while 2.0 ** -(m + 1) >= value:
            m += 1
        while m > 0 and 2.0 ** -m < value:
            m -= 1
        return cls(m)

    @classmethod
    def parse(cls, text: Union[str, int, float]) -> "DyadicScale":
        """Parse "2^-m", "2**-m", "1/8", "0.125" or a bare exponent."""
        if isinstance(text, int):
            return cls(text)
        if isinstance(text, float):
            return cls._from_value(Fraction(text))
        match = _SCALE_PATTERN.match(text)
        if match:
            return cls(int(match.group(2)))
        stripped = text.strip()
        if stripped.isdigit():
            return cls(int(stripped))
        try:
            return cls._from_value(Fraction(stripped))
        except (ValueError, ZeroDivisionError):
            raise ConfigurationError(f"Cannot parse dyadic scale '{text}'")

    @classmethod
    def _from_value(cls, value: Fraction) -> "DyadicScale":
        if value <= 0 or value > 1:
            raise ConfigurationError(f"Scale {value} is not in (0, 1]")
        m = 0
        while Fraction(1, 2 ** m) > value:
            m += 1
        if Fraction(1, 2 ** m) != value:
            raise ConfigurationError(f"Scale {value} is not dyadic")
        return cls(m)

    def __str__(self) -> str:
        return f"2^-{self.exponent}"


@dataclass(frozen=True)
class Point:
    """A finitely described point of a two-sided shift.

    Coordinates left of ``central`` repeat ``left_tail`` (ending just before
    the central block); coordinates right of it repeat ``right_tail``. An
    empty tail means the point is only known on the central block.
    """
    central: Word
    left_tail: Word = ()
    right_tail: Word = ()
    origin: int = 0

    @classmethod
    def periodic(cls, block: Sequence[int], origin: int = 0) -> "Point":
        block = tuple(block)
        if not block:
            raise ConfigurationError("A periodic point needs a nonempty block")
        return cls(block, block, block, origin)

    def symbol(self, i: int) -> int:
        j = i + self.origin
        n = len(self.central)
        if 0 <= j < n:
            return self.central[j]
        if j >= n:
            if not self.right_tail:
                raise InsufficientWindowError(f"Coordinate {i} lies beyond the known right data")
            return self.right_tail[(j - n) % len(self.right_tail)]
        if not self.left_tail:
            raise InsufficientWindowError(f"Coordinate {i} lies beyond the known left data")
        return self.left_tail[j % len(self.left_tail)]

    def window(self, lo: int, hi: int) -> Word:
        """Return the coordinates lo..hi inclusive."""
        return tuple(self.symbol(i) for i in range(lo, hi + 1))

    def shift(self, k: int = 1) -> "Point":
        """Return sigma^k x, i.e. (sigma^k x)_i = x_{i+k}."""
        return Point(self.central, self.left_tail, self.right_tail, self.origin + k)

    def __str__(self) -> str:
        left = f"({word_to_string(self.left_tail)})^inf" if self.left_tail else ""
        right = f"({word_to_string(self.right_tail)})^inf" if self.right_tail else ""
        core = word_to_string(self.central)
        return f"{left}[{core}@{self.origin}]{right}"


class WordBudget:
    """Running count of enumerated words, capped by the configured budget."""

    def __init__(self, limit: int) -> None:
        self.limit = limit
        self.used = 0

    def require(self, count: int, what: str) -> None:
        """Fail up front when a planned enumeration cannot fit."""
        if count > self.limit:
            raise BudgetExceededError(
                f"{what} needs {count} words, above the budget of {self.limit}"
            )

    def charge(self, count: int, what: str = "enumeration") -> None:
        self.used += count
        if self.used > self.limit:
            raise BudgetExceededError(
                f"{what} exceeded the word budget of {self.limit} ({self.used} words)"
            )


class ShiftSystem:
    """An alphabet together with an admissibility rule."""

    def __init__(self, rule: IAdmissibilityRule) -> None:
        self.rule = rule
        self.alphabet = Alphabet(rule.alphabet_size)
        self.logger = logging.getLogger(__name__)
        self._graph: Optional[nx.DiGraph] = None
        self._recurrent: Optional[List[State]] = None
        self._cycle_state: Optional[State] = None

    @property
    def k(self) -> int:
        return self.alphabet.size

    @property
    def name(self) -> str:
        return self.rule.name

    def run(self, word: Iterable[int], state: Optional[State] = None) -> Optional[State]:
        """Read a word from ``state`` (default: initial); None if inadmissible."""
        s = self.rule.initial_state if state is None else state
        for a in word:
            if not 0 <= a < self.k:
                return None
            s = self.rule.step(s, a)
            if s is None:
                return None
        return s

    def accepts(self, word: Sequence[int]) -> bool:
        return self.run(word) is not None

    def check_word(self, word: Sequence[int]) -> None:
        if not self.accepts(word):
            raise AdmissibilityError(
                f"Word {word_to_string(word)} is not admissible for {self.name}"
            )

    def transition_graph(self) -> nx.DiGraph:
        """Automaton states reachable from the initial state; edges carry symbols."""
        if self._graph is not None:
            return self._graph
        graph = nx.DiGraph()
        start = self.rule.initial_state
        graph.add_node(start)
        frontier = [start]
        while frontier:
            state = frontier.pop(0)
            for a in self.alphabet.symbols:
                try:
                    nxt = self.rule.step(state, a)
                except AdmissibilityError:
                    continue
                if nxt is None:
                    continue
                if nxt not in graph:
                    graph.add_node(nxt)
                    frontier.append(nxt)
                if graph.has_edge(state, nxt):
                    graph[state][nxt]["symbols"].append(a)
                else:
                    graph.add_edge(state, nxt, symbols=[a])
        self._graph = graph
        self.logger.debug(f"Built transition graph for {self.name}: {graph.number_of_nodes()} states")
        return graph

    def recurrent_states(self) -> List[State]:
        """States lying on a cycle of the transition graph."""
        if self._recurrent is None:
            graph = self.transition_graph()
            states: List[State] = []
            for component in nx.strongly_connected_components(graph):
                node = next(iter(component))
                if len(component) > 1 or graph.has_edge(node, node):
                    states.extend(component)
            self._recurrent = sorted(states, key=str)
        return self._recurrent

    def cycle_state(self) -> State:
        """The state fixed by reading the rule's default cycle repeatedly."""
        if self._cycle_state is not None:
            return self._cycle_state
        cycle = self.rule.default_cycle()
        state = self.run(cycle)
        for _ in range(self.transition_graph().number_of_nodes() + 1):
            if state is None:
                break
            nxt = self.run(cycle, state)
            if nxt == state:
                self._cycle_state = state
                return state
            state = nxt
        raise AdmissibilityError(f"Default cycle of {self.name} does not settle on a state")

    def path_symbols(self, path: Sequence[State]) -> Word:
        graph = self.transition_graph()
        return tuple(min(graph[u][v]["symbols"]) for u, v in zip(path, path[1:]))

    def connector(
        self,
        state: State,
        accept: Callable[[State], bool],
        max_length: Optional[int] = None,
    ) -> Optional[Tuple[Word, State]]:
        """Shortest word leading from ``state`` to a state satisfying ``accept``.

        Ties are broken lexicographically on the connecting symbols.
        """
        graph = self.transition_graph()
        if state not in graph:
            return None
        paths = nx.single_source_shortest_path(graph, state, cutoff=max_length)
        best: Optional[Tuple[int, Word, State]] = None
        for target, path in paths.items():
            if not accept(target):
                continue
            symbols = self.path_symbols(path)
            key = (len(symbols), symbols, target)
            if best is None or key[:2] < best[:2]:
                best = key
        if best is None:
            return None
        return best[1], best[2]

    def cycle_at(self, state: State) -> Word:
        """Shortest nonempty word returning ``state`` to itself."""
        if state == self.cycle_state():
            return self.rule.default_cycle()
        graph = self.transition_graph()
        best: Optional[Word] = None
        for succ in graph.successors(state):
            try:
                path = nx.shortest_path(graph, succ, state)
            except nx.NetworkXNoPath:
                continue
            symbols = self.path_symbols([state] + path)
            if best is None or (len(symbols), symbols) < (len(best), best):
                best = symbols
        if best is None:
            raise AdmissibilityError(f"State {state} of {self.name} lies on no cycle")
        return best

    def is_cycle_admissible(self, block: Sequence[int]) -> bool:
        """True if the bi-infinite repetition of ``block`` is admissible."""
        if not block:
            return False
        repeats = self.transition_graph().number_of_nodes() + 1
        return self.run(tuple(block) * repeats) is not None

    def close_point(self, word: Sequence[int]) -> Point:
        """Embed an admissible word in an eventually periodic admissible point.

        Coordinate 0 of the result is the first symbol of ``word``.
        """
        word = tuple(word)
        self.check_word(word)
        recurrent = self.recurrent_states()
        preferred = [self.cycle_state()] + [s for s in recurrent if s != self.cycle_state()]
        left: Optional[Tuple[State, Word, State]] = None
        for q0 in preferred:
            found = self.connector(q0, lambda q: self.run(word, q) is not None)
            if found is not None:
                left = (q0, found[0], found[1])
                break
        if left is None:
            raise AdmissibilityError(f"Word {word_to_string(word)} cannot be entered from a cycle")
        q0, conn_left, entry = left
        after = self.run(word, entry)
        recurrent_set = set(recurrent)
        found_right = self.connector(after, lambda q: q == self.cycle_state())
        if found_right is None:
            found_right = self.connector(after, lambda q: q in recurrent_set)
        if found_right is None:
            raise AdmissibilityError(f"Word {word_to_string(word)} cannot be continued to a cycle")
        conn_right, q1 = found_right
        return Point(
            central=conn_left + word + conn_right,
            left_tail=self.cycle_at(q0),
            right_tail=self.cycle_at(q1),
            origin=len(conn_left),
        )

    def random_word(self, rng: "object", length: int) -> Word:
        """Uniform random walk on the automaton (``rng`` is a numpy Generator)."""
        state = self.rule.initial_state
        word: List[int] = []
        for _ in range(length):
            options = [a for a in self.alphabet.symbols if self.safe_step(state, a) is not None]
            if not options:
                raise AdmissibilityError(f"Random walk on {self.name} reached a dead end")
            a = options[int(rng.integers(len(options)))]  # type: ignore[attr-defined]
            word.append(a)
            state = self.rule.step(state, a)
        return tuple(word)

    def safe_step(self, state: State, a: int) -> Optional[State]:
        try:
            return self.rule.step(state, a)
        except AdmissibilityError:
            return None

    def describe(self) -> Dict[str, object]:
        return {"alphabet": self.k, **self.rule.describe()}
