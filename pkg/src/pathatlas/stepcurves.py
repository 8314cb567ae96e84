"""Piecewise-constant curves with the cadlag endpoint convention.

A :class:`StepCurve` is right-continuous on [t0, t1) and takes the value of
its last piece at t1 (left-continuity at the right endpoint).  Values live in
R^d under the max-coordinate norm.  All operations here are exact: they only
rearrange the stored breakpoints and values.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .errors import DimensionError, DomainError
from .intervals import Interval


def _as_value_matrix(values, dim=None):
    vals = np.atleast_2d(np.asarray(values, dtype=float))
    if vals.ndim != 2:
        raise DimensionError("step values must form an (n, d) matrix")
    if dim is not None and vals.shape[1] != dim:
        raise DimensionError(f"expected dim {dim}, got {vals.shape[1]}")
    return vals


def _canonicalize(breaks, values):
    """Drop internal breakpoints between equal adjacent values."""
    if len(values) > 1:
        differ = np.any(values[1:] != values[:-1], axis=1)
        if not differ.all():
            values = np.concatenate([values[:1], values[1:][differ]])
            breaks = np.concatenate([breaks[:1], breaks[1:-1][differ], breaks[-1:]])
    return breaks, values


class StepCurve:
    """An exact piecewise-constant curve in canonical form.

    ``breaks`` is strictly increasing and spans the domain; ``values[i]`` is
    the value on [breaks[i], breaks[i+1]).  Adjacent values always differ.
    Instances are immutable.
    """

    __slots__ = ("breaks", "values")

    def __init__(self, breaks, values):
        breaks = np.asarray(breaks, dtype=float)
        values = _as_value_matrix(values)
        if breaks.ndim != 1 or len(breaks) < 2:
            raise DomainError("need at least two breakpoints")
        if np.any(np.diff(breaks) <= 0):
            raise DomainError("breakpoints must be strictly increasing")
        if len(values) != len(breaks) - 1:
            raise DimensionError("values/breakpoints length mismatch")
        breaks, values = _canonicalize(breaks, values)
        breaks.flags.writeable = False
        values.flags.writeable = False
        object.__setattr__(self, "breaks", breaks)
        object.__setattr__(self, "values", values)

    def __setattr__(self, name, value):
        raise AttributeError("StepCurve is immutable")

    # -- basic queries ----------------------------------------------------

    @property
    def domain(self) -> Interval:
        return Interval(self.breaks[0], self.breaks[-1])

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    @property
    def n_pieces(self) -> int:
        return len(self.values)

    def __eq__(self, other):
        return (
            isinstance(other, StepCurve)
            and np.array_equal(self.breaks, other.breaks)
            and np.array_equal(self.values, other.values)
        )

    def __hash__(self):
        return hash((self.breaks.tobytes(), self.values.tobytes()))

    def __repr__(self):
        return f"StepCurve({self.breaks.tolist()}, {self.values.tolist()!r})"

    @classmethod
    def constant(cls, domain: Interval, value) -> "StepCurve":
        value = np.atleast_1d(np.asarray(value, dtype=float))
        return cls([domain.lo, domain.hi], value[None, :])

    # -- evaluation --------------------------------------------------------

    def piece_index(self, t: float) -> int:
        """Index of the piece whose value eval(t) returns."""
        a, b = self.breaks[0], self.breaks[-1]
        if not a <= t <= b:
            raise DomainError(f"t={t} outside [{a}, {b}]")
        if t == b:
            return len(self.values) - 1
        return int(np.searchsorted(self.breaks, t, side="right")) - 1

    def value_at(self, t: float) -> np.ndarray:
        return self.values[self.piece_index(t)]

    def value_many(self, ts) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        a, b = self.breaks[0], self.breaks[-1]
        if ts.size and (ts.min() < a or ts.max() > b):
            raise DomainError("evaluation times escape the domain")
        idx = np.searchsorted(self.breaks, ts, side="right") - 1
        return self.values[np.clip(idx, 0, len(self.values) - 1)]

    def left_limit(self, t: float) -> np.ndarray:
        """lim_{s -> t^-} of the curve; t must be > lo."""
        if not self.breaks[0] < t <= self.breaks[-1]:
            raise DomainError(f"no left limit at t={t}")
        i = int(np.searchsorted(self.breaks, t, side="left")) - 1
        return self.values[i]

    # -- norm and integral ---------------------------------------------------

    def sup_norm(self) -> float:
        """Exact sup of the max-coordinate norm: a finite max."""
        return float(np.max(np.abs(self.values)))

    def integral(self) -> np.ndarray:
        """Exact integral over the whole domain."""
        return np.diff(self.breaks) @ self.values

    def integral_fractions(self):
        """The integral as exact rationals, one Fraction per coordinate."""
        total = [Fraction(0)] * self.dim
        for dt, v in zip(np.diff(self.breaks), self.values):
            fdt = Fraction(float(dt))
            for j in range(self.dim):
                total[j] += fdt * Fraction(float(v[j]))
        return total

    # -- exact rearrangements ----------------------------------------------

    def restrict(self, sub: Interval) -> "StepCurve":
        """Slice to a subinterval, re-imposing the left limit at its right end."""
        if not self.domain.contains_interval(sub):
            raise DomainError(f"{sub} not contained in {self.domain}")
        i0 = int(np.searchsorted(self.breaks, sub.lo, side="right")) - 1
        i1 = int(np.searchsorted(self.breaks, sub.hi, side="left")) - 1
        breaks = np.concatenate([[sub.lo], self.breaks[i0 + 1 : i1 + 1], [sub.hi]])
        return StepCurve(breaks, self.values[i0 : i1 + 1])

    def shift_values(self, delta) -> "StepCurve":
        return StepCurve(self.breaks, self.values + np.asarray(delta, dtype=float))

    def scale(self, a: float) -> "StepCurve":
        return StepCurve(self.breaks, a * self.values)

    def push(self, matrix) -> "StepCurve":
        """Apply a linear map to every value; exact."""
        matrix = np.asarray(matrix, dtype=float)
        if matrix.shape[1] != self.dim:
            raise DimensionError("matrix columns must match curve dim")
        return StepCurve(self.breaks, self.values @ matrix.T)

    def with_breaks(self, extra_breaks) -> "StepCurve":
        """Same curve refined so that the given times are breakpoints.

        The result is intentionally *not* canonical; use it for aligned
        piecewise arithmetic only.
        """
        merged = np.union1d(self.breaks, np.asarray(extra_breaks, dtype=float))
        merged = merged[(merged >= self.breaks[0]) & (merged <= self.breaks[-1])]
        out = object.__new__(StepCurve)
        vals = self.value_many(merged[:-1])
        merged.flags.writeable = False
        vals.flags.writeable = False
        object.__setattr__(out, "breaks", merged)
        object.__setattr__(out, "values", vals)
        return out


def concat(first: StepCurve, second: StepCurve) -> StepCurve:
    """Concatenation of step curves on adjacent domains [a,b] and [b,c].

    The junction takes the second curve's value; the first curve's value at b
    is recoverable by restriction (left limit).  The sup norm of the result is
    exactly the max of the two sup norms.
    """
    if first.breaks[-1] != second.breaks[0]:
        raise DomainError("domains are not adjacent")
    if first.dim != second.dim:
        raise DimensionError("dims differ")
    breaks = np.concatenate([first.breaks, second.breaks[1:]])
    values = np.concatenate([first.values, second.values])
    return StepCurve(breaks, values)


def concat_many(pieces) -> StepCurve:
    pieces = list(pieces)
    if not pieces:
        raise DomainError("nothing to concatenate")
    out = pieces[0]
    for p in pieces[1:]:
        out = concat(out, p)
    return out


def combine(a: StepCurve, b: StepCurve, op) -> StepCurve:
    """Pointwise binary operation after refining to common breakpoints."""
    if a.domain != b.domain:
        raise DomainError("domains differ")
    merged = np.union1d(a.breaks, b.breaks)
    va = a.value_many(merged[:-1])
    vb = b.value_many(merged[:-1])
    return StepCurve(merged, op(va, vb))


def add(a: StepCurve, b: StepCurve) -> StepCurve:
    return combine(a, b, lambda x, y: x + y)


def subtract(a: StepCurve, b: StepCurve) -> StepCurve:
    return combine(a, b, lambda x, y: x - y)


def sup_distance(a: StepCurve, b: StepCurve) -> float:
    """Exact sup-norm distance between two step curves on one domain."""
    if a.domain != b.domain:
        raise DomainError("domains differ")
    merged = np.union1d(a.breaks, b.breaks)
    va = a.value_many(merged[:-1])
    vb = b.value_many(merged[:-1])
    return float(np.max(np.abs(va - vb))) if len(merged) > 1 else 0.0
