"""Curves of order k: an initial (k-1)-jet plus a top-derivative curve.

``RegCurve`` models a C^{k-1} curve whose (k-1)-th derivative is the exact
primitive of a piecewise-constant top derivative ("regulated" mode) or of a
continuous piecewise-linear one ("ck" mode, in which the curve is genuinely
C^k).  Lower derivatives are piecewise polynomials obtained by exact iterated
integration; evaluation and sup norms come from the same polynomial data, so
identities that are exact on paper stay exact here.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionError, DomainError, MonotonicityError, OrderError
from .intervals import Interval
from .poly import PiecewisePoly
from .stepcurves import StepCurve

MODE_REGULATED = "regulated"
MODE_CK = "ck"


class LinearCurve:
    """A continuous piecewise-linear curve (the top derivative in ck mode)."""

    __slots__ = ("breaks", "nodes")

    def __init__(self, breaks, nodes):
        breaks = np.asarray(breaks, dtype=float)
        nodes = np.atleast_2d(np.asarray(nodes, dtype=float))
        if breaks.ndim != 1 or len(breaks) < 2 or np.any(np.diff(breaks) <= 0):
            raise DomainError("breakpoints must be strictly increasing")
        if len(nodes) != len(breaks):
            raise DimensionError("need one node value per breakpoint")
        breaks.flags.writeable = False
        nodes.flags.writeable = False
        object.__setattr__(self, "breaks", breaks)
        object.__setattr__(self, "nodes", nodes)

    def __setattr__(self, name, value):
        raise AttributeError("LinearCurve is immutable")

    @property
    def domain(self) -> Interval:
        return Interval(self.breaks[0], self.breaks[-1])

    @property
    def dim(self) -> int:
        return self.nodes.shape[1]

    def __eq__(self, other):
        return (
            isinstance(other, LinearCurve)
            and np.array_equal(self.breaks, other.breaks)
            and np.array_equal(self.nodes, other.nodes)
        )

    def value_many(self, ts) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        if ts.size and (ts.min() < self.breaks[0] or ts.max() > self.breaks[-1]):
            raise DomainError("evaluation times escape the domain")
        i = np.clip(np.searchsorted(self.breaks, ts, side="right") - 1, 0, len(self.breaks) - 2)
        t0, t1 = self.breaks[i], self.breaks[i + 1]
        theta = ((ts - t0) / (t1 - t0))[:, None]
        raw = (1.0 - theta) * self.nodes[i] + theta * self.nodes[i + 1]
        # clip into the node envelope so interpolation never overshoots in floats
        lo = np.minimum(self.nodes[i], self.nodes[i + 1])
        hi = np.maximum(self.nodes[i], self.nodes[i + 1])
        return np.clip(raw, lo, hi)

    def value_at(self, t: float) -> np.ndarray:
        return self.value_many(np.array([t]))[0]

    def sup_norm(self) -> float:
        """Attained at a node: exact finite max."""
        return float(np.max(np.abs(self.nodes)))

    def as_poly(self) -> PiecewisePoly:
        return PiecewisePoly.from_linear(self.breaks, self.nodes)

    def restrict(self, sub: Interval) -> "LinearCurve":
        if not self.domain.contains_interval(sub):
            raise DomainError(f"{sub} not contained in {self.domain}")
        i0 = int(np.searchsorted(self.breaks, sub.lo, side="right")) - 1
        i1 = int(np.searchsorted(self.breaks, sub.hi, side="left")) - 1
        breaks = np.concatenate([[sub.lo], self.breaks[i0 + 1 : i1 + 1], [sub.hi]])
        nodes = np.concatenate(
            [self.value_many([sub.lo]), self.nodes[i0 + 1 : i1 + 1], self.value_many([sub.hi])]
        )
        return LinearCurve(breaks, nodes)


def _top_as_poly(top):
    if isinstance(top, StepCurve):
        return PiecewisePoly.from_step(top.breaks, top.values)
    return top.as_poly()


class RegCurve:
    """A curve of order k >= 1 stored as (jet, top derivative).

    ``jet`` holds the derivative values (c(t0), ..., c^{(k-1)}(t0)); ``top``
    is the k-th derivative.  All lower derivatives are exact integrals of the
    top and are cached as piecewise polynomials.
    """

    __slots__ = ("jet", "top", "mode", "_polys")

    def __init__(self, jet, top, mode=None, _polys=None):
        jet = tuple(np.atleast_1d(np.asarray(v, dtype=float)) for v in jet)
        if not jet:
            raise OrderError("order-0 curves are plain StepCurves")
        d = top.dim
        if any(v.shape != (d,) for v in jet):
            raise DimensionError("jet entries must match the top derivative dim")
        for v in jet:
            v.flags.writeable = False
        if mode is None:
            mode = MODE_CK if isinstance(top, LinearCurve) else MODE_REGULATED
        if mode == MODE_CK and not isinstance(top, LinearCurve):
            raise DomainError("ck mode needs a continuous piecewise-linear top")
        if mode == MODE_REGULATED and not isinstance(top, StepCurve):
            raise DomainError("regulated mode needs a StepCurve top")
        object.__setattr__(self, "jet", jet)
        object.__setattr__(self, "top", top)
        object.__setattr__(self, "mode", mode)
        object.__setattr__(self, "_polys", _polys)

    def __setattr__(self, name, value):
        raise AttributeError("RegCurve is immutable")

    @property
    def order(self) -> int:
        return len(self.jet)

    @property
    def domain(self) -> Interval:
        return self.top.domain

    @property
    def dim(self) -> int:
        return self.top.dim

    def __eq__(self, other):
        return (
            isinstance(other, RegCurve)
            and self.mode == other.mode
            and len(self.jet) == len(other.jet)
            and all(np.array_equal(a, b) for a, b in zip(self.jet, other.jet))
            and self.top == other.top
        )

    def __repr__(self):
        return f"RegCurve(order={self.order}, jet={[v.tolist() for v in self.jet]}, top={self.top!r})"

    # -- derivative polynomials ------------------------------------------------

    def _derivative_polys(self):
        """Cached PiecewisePoly for c^{(l)}, l = 0..k-1."""
        polys = self._polys
        if polys is None:
            k = self.order
            polys = [None] * k
            acc = _top_as_poly(self.top).integrate(self.jet[k - 1])
            polys[k - 1] = acc
            for l in range(k - 2, -1, -1):
                acc = acc.integrate(self.jet[l])
                polys[l] = acc
            object.__setattr__(self, "_polys", polys)
        return polys

    # -- evaluation --------------------------------------------------------------

    def eval_many(self, ts, deriv_order=0) -> np.ndarray:
        l, k = deriv_order, self.order
        if l > k:
            raise OrderError(f"derivative order {l} exceeds curve order {k}")
        if l == k:
            return self.top.value_many(ts)
        return self._derivative_polys()[l].eval_many(ts)

    def eval(self, t: float, deriv_order=0) -> np.ndarray:
        return self.eval_many(np.array([float(t)]), deriv_order)[0]

    # -- norms ---------------------------------------------------------------------

    def norm(self, order=None) -> float:
        """max over 0 <= l <= order of sup |c^{(l)}|, computed exactly."""
        k = self.order
        if order is None:
            order = k
        if order > k:
            raise OrderError(f"norm order {order} exceeds curve order {k}")
        polys = self._derivative_polys()
        best = self.top.sup_norm() if order == k else 0.0
        for l in range(min(order + 1, k)):
            best = max(best, polys[l].sup_abs())
        return best

    # -- structure ------------------------------------------------------------------

    def restrict(self, sub: Interval) -> "RegCurve":
        """Restriction to a subinterval; derivative data is sliced, not rebuilt."""
        if not self.domain.contains_interval(sub):
            raise DomainError(f"{sub} not contained in {self.domain}")
        polys = self._derivative_polys()
        sliced = [p.restrict(sub) for p in polys]
        jet = tuple(p.eval(sub.lo) for p in sliced)
        return RegCurve(jet, self.top.restrict(sub), self.mode, _polys=sliced)

    def push(self, matrix) -> "RegCurve":
        """Linear image: the map applies to the jet and the top values; exact."""
        matrix = np.asarray(matrix, dtype=float)
        if matrix.shape[1] != self.dim:
            raise DimensionError("matrix columns must match curve dim")
        jet = tuple(matrix @ v for v in self.jet)
        if isinstance(self.top, StepCurve):
            top = self.top.push(matrix)
        else:
            top = LinearCurve(self.top.breaks, self.top.nodes @ matrix.T)
        return RegCurve(jet, top, self.mode)


def primitive(curve, start_value) -> RegCurve:
    """The exact primitive with the given initial value; raises order by one."""
    start_value = np.atleast_1d(np.asarray(start_value, dtype=float))
    if isinstance(curve, (StepCurve, LinearCurve)):
        if start_value.shape != (curve.dim,):
            raise DimensionError("initial value dim mismatch")
        return RegCurve((start_value,), curve)
    if start_value.shape != (curve.dim,):
        raise DimensionError("initial value dim mismatch")
    return RegCurve((start_value,) + curve.jet, curve.top, curve.mode)


def derivative_split(curve: RegCurve):
    """Exact inverse of :func:`primitive`: (initial value, derivative curve)."""
    if not isinstance(curve, RegCurve):
        raise OrderError("order-0 curves cannot be split")
    if curve.order == 1:
        return curve.jet[0], curve.top
    return curve.jet[0], RegCurve(curve.jet[1:], curve.top, curve.mode)


def curve_order(curve) -> int:
    if isinstance(curve, (StepCurve, LinearCurve)):
        return 0
    return curve.order


def eval_curve(curve, t, deriv_order=0) -> np.ndarray:
    """Evaluate any curve kind; derivative order 0 on step curves is cadlag."""
    if isinstance(curve, (StepCurve, LinearCurve)):
        if deriv_order > 0:
            raise OrderError("order-0 curves have no stored derivatives")
        return curve.value_at(t)
    return curve.eval(t, deriv_order)


def norm(curve, order=None) -> float:
    """The order-k sup norm of any curve kind."""
    if isinstance(curve, (StepCurve, LinearCurve)):
        if order not in (None, 0):
            raise OrderError("order-0 curves only have the order-0 norm")
        return curve.sup_norm()
    return curve.norm(order)


def restrict(curve, sub: Interval):
    return curve.restrict(sub)


def linear_push(matrix, curve):
    """Compose with a linear map; commutes exactly with primitives."""
    if isinstance(curve, StepCurve):
        return curve.push(matrix)
    if isinstance(curve, LinearCurve):
        return LinearCurve(curve.breaks, curve.nodes @ np.asarray(matrix, dtype=float).T)
    return curve.push(matrix)


def reparametrize_affine(curve, target: Interval):
    """Exact affine pullback onto a new domain; chain rule scales derivatives."""
    dom = curve.domain
    slope = dom.length / target.length  # h'(s) where h maps target onto dom

    def map_breaks(breaks):
        mapped = target.lo + (np.asarray(breaks) - dom.lo) / slope
        mapped[0] = target.lo
        mapped[-1] = target.hi
        return mapped

    if isinstance(curve, StepCurve):
        return StepCurve(map_breaks(curve.breaks), curve.values)
    if isinstance(curve, LinearCurve):
        return LinearCurve(map_breaks(curve.breaks), curve.nodes)
    k = curve.order
    jet = tuple(v * slope**l for l, v in enumerate(curve.jet))
    if isinstance(curve.top, StepCurve):
        top = StepCurve(map_breaks(curve.top.breaks), curve.top.values * slope**k)
    else:
        top = LinearCurve(map_breaks(curve.top.breaks), curve.top.nodes * slope**k)
    return RegCurve(jet, top, curve.mode)


class SmoothScalarRepar:
    """A scalar curve of order >= 1 with a strict-monotonicity certificate.

    The certificate records the uniform sign of the derivative and a lower
    bound m > 0 on its absolute value, both computed exactly from the
    derivative's piecewise structure.
    """

    __slots__ = ("curve", "slope_min", "sign")

    def __init__(self, curve: RegCurve):
        if curve.dim != 1:
            raise DimensionError("reparametrizations are scalar curves")
        if curve_order(curve) < 1:
            raise OrderError("reparametrizations need at least order 1")
        if curve.order == 1:
            if isinstance(curve.top, StepCurve):
                vals = curve.top.values[:, 0]
                if np.all(vals > 0):
                    m, sign = float(vals.min()), 1
                elif np.all(vals < 0):
                    m, sign = float(-vals.max()), -1
                else:
                    m, sign = 0.0, 0
            else:
                m, sign = curve.top.as_poly().min_abs_and_sign()
        else:
            m, sign = curve._derivative_polys()[1].min_abs_and_sign()
        if sign == 0 or m <= 0.0:
            raise MonotonicityError("derivative is not bounded away from zero with one sign")
        object.__setattr__(self, "curve", curve)
        object.__setattr__(self, "slope_min", m)
        object.__setattr__(self, "sign", sign)

    def __setattr__(self, name, value):
        raise AttributeError("SmoothScalarRepar is immutable")

    @property
    def domain(self) -> Interval:
        return self.curve.domain

    def __call__(self, s: float) -> float:
        return float(self.curve.eval(s)[0])

    def derivative_at(self, s: float) -> float:
        return float(self.curve.eval(s, 1)[0])
