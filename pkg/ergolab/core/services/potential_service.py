"""Birkhoff sums, two-scale weights and variations of potentials."""

from typing import Dict, List, Optional, Tuple
import logging

from ..interfaces.collection import ISegmentCollection
from ..interfaces.potential import IPotential, PotentialTableError
from ..domain.collections import AllSegments
from ..domain.intervals import ValueInterval
from ..domain.reports import ClassExtrema
from ..domain.symbolic import DyadicScale, Point, ShiftSystem, Word, word_to_string
from .symbolic_service import SymbolicService


class PotentialService:
    """Evaluates Phi_0, Phi_eps and Var(phi, eps) with certified enclosures."""

    def __init__(self, symbolic: SymbolicService) -> None:
        self.symbolic = symbolic
        self.logger = logging.getLogger(__name__)

    def check_table(self, system: ShiftSystem, potential: IPotential) -> None:
        """Raise unless the table covers exactly the admissible depth-words."""
        words = set(self.symbolic.enumerate_words(system, potential.depth))
        missing = sorted(words - set(potential.table))
        if missing:
            raise PotentialTableError(
                f"Potential {potential.name} misses admissible words: "
                + ", ".join(word_to_string(w) for w in missing[:5])
            )

    def tabulated_sum(self, potential: IPotential, word: Word, start: int, n: int) -> float:
        """sum_{k<n} table(word[start+k : start+k+depth]) in floating point."""
        d = potential.depth
        table = potential.table
        return sum(table[word[start + k:start + k + d]] for k in range(n))

    def birkhoff_sum(self, potential: IPotential, x: Point, n: int) -> ValueInterval:
        """Phi_0(x, n) = sum_{k<n} phi(sigma^k x)."""
        if n < 0:
            raise ValueError(f"Birkhoff sums need n >= 0, got {n}")
        if n == 0:
            return ValueInterval.point(0.0)
        d = potential.depth
        window = x.window(0, n + d - 2)
        total = ValueInterval.exact_sum(potential.value(window[k:k + d]) for k in range(n))
        return total.widen(n * potential.remainder)

    def phi_eps(
        self,
        system: ShiftSystem,
        potential: IPotential,
        x: Point,
        n: int,
        eps: DyadicScale,
    ) -> ValueInterval:
        """Phi_eps(x, n): sup of Phi_0(y, n) over the closed Bowen ball B_n(x, eps)."""
        r = eps.radius
        d = potential.depth
        base = self.birkhoff_sum(potential, x, n)
        free = max(0, n + d - 2 - (n - 1 + r))
        if free == 0:
            return base
        fixed = x.window(-r, n - 1 + r)
        sums = [
            ValueInterval.exact_sum(potential.value(filled[r + k:r + k + d]) for k in range(n))
            for filled in self.symbolic.extensions(system, fixed, 0, free)
        ]
        if not sums:
            raise PotentialTableError(f"No admissible completion of the window of {x}")
        slack = n * potential.remainder
        lower = max(max(s.lower for s in sums) - slack, base.lower)
        upper = max(s.upper for s in sums) + slack
        return ValueInterval(lower, max(upper, lower))

    def variation(self, potential: IPotential, eps: DyadicScale) -> ValueInterval:
        """Var(phi, eps) over pairs at distance <= eps."""
        m = eps.exponent
        tabulated = potential.table_variation(m)
        if potential.is_locally_constant:
            return ValueInterval.point(tabulated)
        eta = potential.remainder
        upper = potential.modulus(m)
        return ValueInterval(min(max(0.0, tabulated - 2 * eta), upper), upper)

    def class_extrema(
        self,
        system: ShiftSystem,
        potential: IPotential,
        n: int,
        class_radius: int,
        group_radius: Optional[int] = None,
        collection: Optional[ISegmentCollection] = None,
    ) -> ClassExtrema:
        """Extrema of tabulated Birkhoff sums per separation class.

        Classes are the admissible windows [-class_radius, n-1+class_radius]
        whose central word lies in the collection. A class's weight group is
        the set of points sharing its window of radius ``group_radius``
        (the class itself when None); lo/hi range over that group.
        """
        collection = collection or AllSegments()
        rc = class_radius
        rg = rc if group_radius is None else min(group_radius, rc)
        d = potential.depth
        right = max(rc, d - 1)
        hulls = self.symbolic.class_words(system, collection, n, rc, right)

        def class_key(hull: Word) -> Word:
            return hull[:n + 2 * rc]

        def group_key(hull: Word) -> Word:
            return hull[rc - rg:rc + n + rg]

        groups: Dict[Word, List[float]] = {}
        class_groups: Dict[Word, Word] = {}
        for hull in hulls:
            psi = self.tabulated_sum(potential, hull, rc, n)
            g = group_key(hull)
            span = groups.get(g)
            if span is None:
                groups[g] = [psi, psi]
            else:
                span[0] = min(span[0], psi)
                span[1] = max(span[1], psi)
            class_groups.setdefault(class_key(hull), g)

        classes: Dict[Word, Tuple[float, float]] = {
            key: (groups[g][0], groups[g][1]) for key, g in class_groups.items()
        }
        self.logger.debug(
            f"{len(classes)} classes from {len(hulls)} hull words at n={n}, radius {rc}/{rg}"
        )
        return ClassExtrema(n, rc, rg, classes, slack=n * potential.remainder)
