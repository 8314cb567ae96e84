"""Compact time intervals and partitions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class Interval:
    """A nondegenerate compact interval [lo, hi]."""

    lo: float
    hi: float

    def __post_init__(self):
        object.__setattr__(self, "lo", float(self.lo))
        object.__setattr__(self, "hi", float(self.hi))
        if not self.lo < self.hi:
            raise DomainError(f"degenerate interval [{self.lo}, {self.hi}]")

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def contains(self, t: float) -> bool:
        return self.lo <= t <= self.hi

    def contains_interval(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def intersect(self, other: "Interval"):
        """Intersection, or None when the overlap is empty or a single point."""
        lo = max(self.lo, other.lo)
        hi = min(self.hi, other.hi)
        if lo < hi:
            return Interval(lo, hi)
        return None


@dataclass(frozen=True)
class Partition:
    """A nondecreasing sequence of knots spanning an interval.

    Knots may repeat; :meth:`strict` collapses duplicates.
    """

    interval: Interval
    knots: tuple

    def __init__(self, interval, knots):
        knots = tuple(float(k) for k in knots)
        if len(knots) < 2:
            raise DomainError("a partition needs at least two knots")
        if knots[0] != interval.lo or knots[-1] != interval.hi:
            raise DomainError("partition knots must span the interval")
        if any(a > b for a, b in zip(knots, knots[1:])):
            raise DomainError("partition knots must be nondecreasing")
        object.__setattr__(self, "interval", interval)
        object.__setattr__(self, "knots", knots)

    @classmethod
    def of(cls, knots) -> "Partition":
        knots = [float(k) for k in knots]
        return cls(Interval(knots[0], knots[-1]), knots)

    def strict(self) -> "Partition":
        """The partition with duplicate knots collapsed."""
        kept = [self.knots[0]]
        for k in self.knots[1:]:
            if k > kept[-1]:
                kept.append(k)
        return Partition(self.interval, kept)

    def is_strict(self) -> bool:
        return all(a < b for a, b in zip(self.knots, self.knots[1:]))

    @property
    def pieces(self):
        """The subintervals [knot_{i-1}, knot_i] of the strict view."""
        ks = self.strict().knots
        return [Interval(a, b) for a, b in zip(ks, ks[1:])]

    def __len__(self):
        return len(self.knots) - 1


def refines(fine: Partition, coarse: Partition) -> bool:
    """True when every knot of ``coarse`` appears in ``fine``."""
    return set(coarse.knots) <= set(fine.knots) and fine.interval == coarse.interval


def common_refinement(a, b) -> np.ndarray:
    """Sorted union of two knot sequences over the same interval."""
    return np.union1d(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
