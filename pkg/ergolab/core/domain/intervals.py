"""Certified value intervals with outward rounding."""

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union
import math

from mpmath import iv, mpf

Number = Union[int, float]

# unit roundoff of binary64
ULP = 2.0 ** -52


def _down(x: mpf) -> float:
    value = float(x)
    if math.isfinite(value) and mpf(value) > x:
        value = math.nextafter(value, -math.inf)
    return value


def _up(x: mpf) -> float:
    value = float(x)
    if math.isfinite(value) and mpf(value) < x:
        value = math.nextafter(value, math.inf)
    return value


@dataclass(frozen=True)
class ValueInterval:
    """Closed interval [lower, upper] of floats enclosing a real quantity."""
    lower: float
    upper: float

    def __post_init__(self) -> None:
        if math.isnan(self.lower) or math.isnan(self.upper):
            raise ValueError("Interval endpoints must not be NaN")
        if self.lower > self.upper:
            raise ValueError(f"Empty interval [{self.lower}, {self.upper}]")

    @classmethod
    def point(cls, value: Number) -> "ValueInterval":
        return cls(float(value), float(value))

    @classmethod
    def around(cls, value: float, pad: float) -> "ValueInterval":
        """Float result known up to an absolute error ``pad``."""
        if not math.isfinite(value):
            return cls(value, value)
        return cls(math.nextafter(value - pad, -math.inf), math.nextafter(value + pad, math.inf))

    @classmethod
    def rounded(cls, value: float, operations: int = 1) -> "ValueInterval":
        """Enclose a float computed with ``operations`` roundings."""
        pad = (operations + 4) * ULP * max(abs(value), 1.0)
        return cls.around(value, pad)

    @classmethod
    def exact_sum(cls, values: Iterable[float]) -> "ValueInterval":
        """Sum floats exactly; the result is a point whenever it is representable."""
        total = sum((Fraction(v) for v in values), Fraction(0))
        approx = float(total)
        lower = approx if Fraction(approx) <= total else math.nextafter(approx, -math.inf)
        upper = approx if Fraction(approx) >= total else math.nextafter(approx, math.inf)
        return cls(lower, upper)

    @classmethod
    def hull_of(cls, intervals: Iterable["ValueInterval"]) -> "ValueInterval":
        items = list(intervals)
        if not items:
            raise ValueError("Hull of no intervals")
        return cls(min(i.lower for i in items), max(i.upper for i in items))

    @property
    def width(self) -> float:
        return self.upper - self.lower

    @property
    def midpoint(self) -> float:
        if not (math.isfinite(self.lower) and math.isfinite(self.upper)):
            return self.lower if self.lower == self.upper else (
                self.upper if math.isfinite(self.upper) else self.lower
            )
        return 0.5 * (self.lower + self.upper)

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.lower) and math.isfinite(self.upper)

    def contains(self, value: Number) -> bool:
        return self.lower <= value <= self.upper

    def _iv(self) -> "iv.mpf":
        return iv.mpf([self.lower, self.upper])

    @classmethod
    def _from_iv(cls, value: "iv.mpf") -> "ValueInterval":
        return cls(_down(mpf(value.a)), _up(mpf(value.b)))

    def __add__(self, other: Union["ValueInterval", Number]) -> "ValueInterval":
        other = _lift(other)
        if not (self.is_finite and other.is_finite):
            return ValueInterval(self.lower + other.lower, self.upper + other.upper)
        return self._from_iv(self._iv() + other._iv())

    __radd__ = __add__

    def __neg__(self) -> "ValueInterval":
        return ValueInterval(-self.upper, -self.lower)

    def __sub__(self, other: Union["ValueInterval", Number]) -> "ValueInterval":
        return self + (-_lift(other))

    def __rsub__(self, other: Number) -> "ValueInterval":
        return _lift(other) - self

    def __mul__(self, other: Union["ValueInterval", Number]) -> "ValueInterval":
        other = _lift(other)
        if not (self.is_finite and other.is_finite):
            products = [a * b for a in (self.lower, self.upper) for b in (other.lower, other.upper)]
            products = [0.0 if math.isnan(p) else p for p in products]
            return ValueInterval(min(products), max(products))
        return self._from_iv(self._iv() * other._iv())

    __rmul__ = __mul__

    def exp(self) -> "ValueInterval":
        if not self.is_finite:
            return ValueInterval(math.exp(self.lower), math.exp(self.upper))
        return self._from_iv(iv.exp(self._iv()))

    def log(self) -> "ValueInterval":
        if self.lower < 0:
            raise ValueError("Logarithm of an interval reaching below 0")
        lower = -math.inf if self.lower == 0 else _down(mpf(iv.log(iv.mpf(self.lower)).a))
        upper = -math.inf if self.upper == 0 else _up(mpf(iv.log(iv.mpf(self.upper)).b))
        return ValueInterval(lower, upper)

    def widen(self, pad: float) -> "ValueInterval":
        if pad < 0:
            raise ValueError("Negative padding")
        if pad == 0:
            return self
        return ValueInterval(
            math.nextafter(self.lower - pad, -math.inf) if math.isfinite(self.lower) else self.lower,
            math.nextafter(self.upper + pad, math.inf) if math.isfinite(self.upper) else self.upper,
        )

    def hull(self, other: "ValueInterval") -> "ValueInterval":
        return ValueInterval(min(self.lower, other.lower), max(self.upper, other.upper))

    def holds_le(self, other: Union["ValueInterval", Number]) -> bool:
        """self <= other is not refuted by the enclosures."""
        return self.lower <= _lift(other).upper

    def certified_le(self, other: Union["ValueInterval", Number]) -> bool:
        """self <= other for every value in both enclosures."""
        return self.upper <= _lift(other).lower

    def certified_positive(self) -> bool:
        return self.lower > 0

    def to_dict(self) -> dict:
        return {"lower": self.lower, "upper": self.upper}

    def __str__(self) -> str:
        if self.lower == self.upper:
            return f"{self.lower:.12g}"
        return f"[{self.lower:.12g}, {self.upper:.12g}]"


def _lift(value: Union[ValueInterval, Number]) -> ValueInterval:
    if isinstance(value, ValueInterval):
        return value
    return ValueInterval.point(value)
