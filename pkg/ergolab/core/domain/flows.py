"""Suspension flows over shifts, with exact rational time."""

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union
import logging

from ..interfaces.base import ConfigurationError
from ..interfaces.collection import ISegmentCollection
from ..interfaces.flow import HorizonError, IFlowCollection
from .symbolic import Point, ShiftSystem, Word, word_to_string

Time = Union[Fraction, int, str, float]


def as_time(value: Time, denominator_bound: int = 10 ** 6) -> Fraction:
    """Convert a duration to an exact rational with a bounded denominator."""
    if isinstance(value, float):
        value = str(value)
    try:
        t = Fraction(value)
    except (ValueError, ZeroDivisionError):
        raise ConfigurationError(f"Cannot read '{value}' as a rational time")
    if t.denominator > denominator_bound:
        raise ConfigurationError(
            f"Time {t} has denominator above the bound {denominator_bound}"
        )
    return t


@dataclass(frozen=True)
class RoofFunction:
    """A strictly positive locally constant roof r(x) = table(x_0 .. x_{depth-1})."""
    depth: int
    table: Dict[Word, Fraction]
    name: str = "roof"

    def __post_init__(self) -> None:
        if self.depth < 1:
            raise ConfigurationError(f"Roof depth must be at least 1, got {self.depth}")
        if not self.table:
            raise ConfigurationError("Roof table is empty")
        for word, value in self.table.items():
            if len(word) != self.depth:
                raise ConfigurationError(
                    f"Roof entry {word_to_string(word)} does not have length {self.depth}"
                )
            if value <= 0:
                raise ConfigurationError(
                    f"Roof value {value} at {word_to_string(word)} is not positive"
                )

    @classmethod
    def constant(cls, value: Time, alphabet_size: int) -> "RoofFunction":
        v = as_time(value)
        return cls(1, {(a,): v for a in range(alphabet_size)}, name=f"constant {v}")

    @classmethod
    def from_values(cls, values: Sequence[Time]) -> "RoofFunction":
        """Depth-1 roof with r(x) = values[x_0]."""
        table = {(a,): as_time(v) for a, v in enumerate(values)}
        label = ", ".join(f"r({a})={v}" for (a,), v in table.items())
        return cls(1, table, name=label)

    @property
    def r_min(self) -> Fraction:
        return min(self.table.values())

    @property
    def r_max(self) -> Fraction:
        return max(self.table.values())

    @property
    def is_constant(self) -> bool:
        return self.r_min == self.r_max

    def value_word(self, word: Sequence[int]) -> Fraction:
        try:
            return self.table[tuple(word[:self.depth])]
        except KeyError:
            raise ConfigurationError(
                f"Roof {self.name} has no entry for {word_to_string(word[:self.depth])}"
            )

    def value(self, x: Point) -> Fraction:
        return self.value_word(x.window(0, self.depth - 1))

    def describe(self) -> Dict[str, object]:
        return {
            "name": self.name,
            "depth": self.depth,
            "table": {word_to_string(w): str(v) for w, v in sorted(self.table.items())},
        }


@dataclass(frozen=True)
class FlowPoint:
    """(x, s) with 0 <= s < r(x)."""
    base: Point
    height: Fraction

    def __str__(self) -> str:
        return f"({self.base}, {self.height})"


@dataclass(frozen=True)
class FlowSegment:
    """The orbit segment {f_s p : 0 <= s <= duration}; duration 0 is the empty segment."""
    start: FlowPoint
    duration: Fraction

    @property
    def is_empty(self) -> bool:
        return self.duration == 0


class SuspensionFlow:
    """The flow f_t on {(x, s) : 0 <= s < r(x)} with (x, r(x)) identified to (sigma x, 0)."""

    def __init__(
        self,
        base: ShiftSystem,
        roof: RoofFunction,
        horizon: Time = 10 ** 4,
        denominator_bound: int = 10 ** 6,
    ) -> None:
        self.base = base
        self.roof = roof
        self.denominator_bound = denominator_bound
        self.horizon = as_time(horizon, denominator_bound)
        self.logger = logging.getLogger(__name__)

    @property
    def name(self) -> str:
        return f"{self.base.name} under {self.roof.name}"

    def time(self, value: Time) -> Fraction:
        return as_time(value, self.denominator_bound)

    def point(self, base: Point, height: Time = 0) -> FlowPoint:
        h = self.time(height)
        if not 0 <= h < self.roof.value(base):
            raise ConfigurationError(
                f"Height {h} lies outside [0, {self.roof.value(base)}) over {base}"
            )
        return FlowPoint(base, h)

    def advance(self, p: FlowPoint, t: Time) -> FlowPoint:
        """f_t(p), computed exactly by accumulating roof crossings."""
        t = self.time(t)
        if abs(t) > self.horizon:
            raise HorizonError(f"Time {t} exceeds the flow horizon {self.horizon}")
        x, u = p.base, p.height + t
        while u >= self.roof.value(x):
            u -= self.roof.value(x)
            x = x.shift(1)
        while u < 0:
            x = x.shift(-1)
            u += self.roof.value(x)
        return FlowPoint(x, u)

    def entry_times(self, p: FlowPoint, duration: Time) -> List[Fraction]:
        """Times S_k - s at which the orbit of p enters fiber k, while at most ``duration``."""
        duration = self.time(duration)
        times = [-p.height]
        x = p.base
        while True:
            nxt = times[-1] + self.roof.value(x)
            if nxt > duration:
                return times
            times.append(nxt)
            x = x.shift(1)

    def visited(self, p: FlowPoint, duration: Time) -> Word:
        """Base symbols of the fibers met by the segment of p of the given length."""
        duration = self.time(duration)
        if duration == 0:
            return ()
        count = len(self.entry_times(p, duration))
        return p.base.window(0, count - 1)

    def base_segment(self, p: FlowPoint, duration: Time) -> Word:
        """Base symbols whose roof crossing happens at a time in [0, duration)."""
        duration = self.time(duration)
        return tuple(
            p.base.symbol(k)
            for k, entry in enumerate(self.entry_times(p, duration))
            if 0 <= entry < duration
        )

    def chart_representatives(self, p: FlowPoint) -> List[Tuple[Point, Fraction]]:
        """p in its own fiber and in the fiber below, at height s + r(sigma^-1 x)."""
        below = p.base.shift(-1)
        return [(p.base, p.height), (below, p.height + self.roof.value(below))]

    def describe(self) -> Dict[str, object]:
        return {"base": self.base.describe(), "roof": self.roof.describe(), "horizon": str(self.horizon)}


class AllFlowSegments(IFlowCollection):
    """Every flow segment."""

    @property
    def name(self) -> str:
        return "all"

    def contains(self, flow: SuspensionFlow, segment: FlowSegment) -> bool:
        return True

    def exact_bracket(self, flow: SuspensionFlow, segment: FlowSegment) -> Optional[bool]:
        return True

    @property
    def is_everything(self) -> bool:
        return True


class DurationRange(IFlowCollection):
    """Segments whose duration lies in [lo, hi]."""

    def __init__(self, lo: Time, hi: Time) -> None:
        self.lo = as_time(lo)
        self.hi = as_time(hi)
        if self.lo > self.hi:
            raise ConfigurationError(f"Empty duration range [{self.lo}, {self.hi}]")

    @property
    def name(self) -> str:
        return f"duration[{self.lo},{self.hi}]"

    def contains(self, flow: SuspensionFlow, segment: FlowSegment) -> bool:
        return self.lo <= segment.duration <= self.hi

    def exact_bracket(self, flow: SuspensionFlow, segment: FlowSegment) -> Optional[bool]:
        # n + s + t sweeps [n, n + 2]
        n = segment.duration
        return n <= self.hi and n + 2 >= self.lo


class LiftedBase(IFlowCollection):
    """Segments whose base orbit segment lies in a collection of the base shift."""

    def __init__(self, inner: ISegmentCollection) -> None:
        self.inner = inner

    @property
    def name(self) -> str:
        return f"lift({self.inner.name})"

    def contains(self, flow: SuspensionFlow, segment: FlowSegment) -> bool:
        return self.inner.contains(flow.base_segment(segment.start, segment.duration))

    @property
    def is_everything(self) -> bool:
        return self.inner.is_everything


class FlowUnion(IFlowCollection):

    def __init__(self, *members: IFlowCollection) -> None:
        if not members:
            raise ConfigurationError("A union needs at least one collection")
        self.members = members

    @property
    def name(self) -> str:
        return " | ".join(m.name for m in self.members)

    def contains(self, flow: SuspensionFlow, segment: FlowSegment) -> bool:
        return any(m.contains(flow, segment) for m in self.members)

    def exact_bracket(self, flow: SuspensionFlow, segment: FlowSegment) -> Optional[bool]:
        answers = [m.exact_bracket(flow, segment) for m in self.members]
        if any(a is True for a in answers):
            return True
        if all(a is False for a in answers):
            return False
        return None

    @property
    def is_everything(self) -> bool:
        return any(m.is_everything for m in self.members)


class BracketCollection(IFlowCollection):
    """[C]: (p, n) such that (f_{-s} p, n + s + t) lies in C for some s, t in [0, 1].

    Membership of a segment built from base words changes only when s or t
    crosses a roof crossing, so the quantifiers reduce to the breakpoints in
    [0, 1] and one point between each consecutive pair.
    """

    def __init__(self, inner: IFlowCollection) -> None:
        self.inner = inner
        self.evaluations = 0

    @property
    def name(self) -> str:
        return f"[{self.inner.name}]"

    @property
    def is_everything(self) -> bool:
        return self.inner.is_everything

    def contains(self, flow: SuspensionFlow, segment: FlowSegment) -> bool:
        decided = self.inner.exact_bracket(flow, segment)
        if decided is not None:
            return decided
        p, n = segment.start, segment.duration
        for s in self._backward_points(flow, p):
            start = flow.advance(p, -s)
            for t in self._forward_points(flow, p, n):
                self.evaluations += 1
                if self.inner.contains(flow, FlowSegment(start, n + s + t)):
                    return True
        return False

    def _backward_points(self, flow: SuspensionFlow, p: FlowPoint) -> List[Fraction]:
        breaks = []
        x, b = p.base, p.height
        while b <= 1:
            breaks.append(b)
            x = x.shift(-1)
            b += flow.roof.value(x)
        return _refine(breaks)

    def _forward_points(self, flow: SuspensionFlow, p: FlowPoint, n: Fraction) -> List[Fraction]:
        breaks = [e - n for e in flow.entry_times(p, n + 1) if e >= n]
        return _refine(breaks)


def _refine(breaks: Sequence[Fraction]) -> List[Fraction]:
    """Breakpoints in [0, 1] with both ends and every midpoint."""
    points = sorted({Fraction(0), Fraction(1)} | {b for b in breaks if 0 <= b <= 1})
    mids = [(a + b) / 2 for a, b in zip(points, points[1:])]
    return sorted(points + mids)
