"""Piecewise polynomials with per-piece anchor points.

Internal representation behind exact integration, evaluation and sup-norm
computation of curves whose top derivative is piecewise constant or linear.
On piece i the value at time t is  sum_j coeffs[i, j] * (t - anchors[i])**j.

Anchors are kept separate from the piece starts so that restriction can slice
pieces without re-deriving coefficients: a restricted polynomial evaluates
through bit-identical float expressions, which is what makes the restriction
contraction property hold exactly on the computed sups.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError
from .intervals import Interval

_BISECT_STEPS = 80


class PiecewisePoly:
    __slots__ = ("breaks", "anchors", "coeffs")

    def __init__(self, breaks, anchors, coeffs):
        self.breaks = np.asarray(breaks, dtype=float)
        self.anchors = np.asarray(anchors, dtype=float)
        self.coeffs = np.asarray(coeffs, dtype=float)  # (m, deg+1, d)
        if self.coeffs.ndim != 3 or len(self.coeffs) != len(self.breaks) - 1:
            raise DomainError("inconsistent piecewise polynomial data")

    @property
    def degree(self) -> int:
        return self.coeffs.shape[1] - 1

    @property
    def dim(self) -> int:
        return self.coeffs.shape[2]

    @classmethod
    def from_step(cls, breaks, values) -> "PiecewisePoly":
        breaks = np.asarray(breaks, dtype=float)
        return cls(breaks, breaks[:-1], np.asarray(values, dtype=float)[:, None, :])

    @classmethod
    def from_linear(cls, breaks, nodes) -> "PiecewisePoly":
        """Continuous piecewise-linear data given by node values."""
        breaks = np.asarray(breaks, dtype=float)
        nodes = np.asarray(nodes, dtype=float)
        slopes = np.diff(nodes, axis=0) / np.diff(breaks)[:, None]
        coeffs = np.stack([nodes[:-1], slopes], axis=1)
        return cls(breaks, breaks[:-1], coeffs)

    # -- evaluation ---------------------------------------------------------

    def _horner(self, piece_idx, ts):
        s = ts - self.anchors[piece_idx]
        c = self.coeffs[piece_idx]  # (n, deg+1, d)
        out = c[:, -1, :].copy()
        for j in range(self.degree - 1, -1, -1):
            out = out * s[:, None] + c[:, j, :]
        return out

    def eval_many(self, ts) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        a, b = self.breaks[0], self.breaks[-1]
        if ts.size and (ts.min() < a or ts.max() > b):
            raise DomainError("evaluation times escape the domain")
        idx = np.clip(np.searchsorted(self.breaks, ts, side="right") - 1, 0, len(self.coeffs) - 1)
        return self._horner(idx, ts)

    def eval(self, t: float) -> np.ndarray:
        return self.eval_many(np.array([t]))[0]

    # -- calculus -------------------------------------------------------------

    def integrate(self, start_value) -> "PiecewisePoly":
        """The exact primitive anchored at breaks[0] with the given value."""
        start_value = np.asarray(start_value, dtype=float)
        m, D, d = self.coeffs.shape
        anti = np.zeros((m, D + 1, d))
        anti[:, 1:, :] = self.coeffs / np.arange(1, D + 1)[None, :, None]

        def polyval(cf, s):
            out = cf[:, -1, :].copy()
            for j in range(cf.shape[1] - 2, -1, -1):
                out = out * s[:, None] + cf[:, j, :]
            return out

        s_lo = self.breaks[:-1] - self.anchors
        s_hi = self.breaks[1:] - self.anchors
        at_lo = polyval(anti, s_lo)
        at_hi = polyval(anti, s_hi)
        running = np.concatenate([start_value[None, :], start_value + np.cumsum(at_hi - at_lo, axis=0)])
        anti[:, 0, :] = running[:-1] - at_lo
        return PiecewisePoly(self.breaks, self.anchors, anti)

    def derivative(self) -> "PiecewisePoly":
        if self.degree == 0:
            return PiecewisePoly(self.breaks, self.anchors, np.zeros_like(self.coeffs))
        cf = self.coeffs[:, 1:, :] * np.arange(1, self.degree + 1)[None, :, None]
        return PiecewisePoly(self.breaks, self.anchors, cf)

    # -- restriction -----------------------------------------------------------

    def restrict(self, sub: Interval) -> "PiecewisePoly":
        """Slice pieces; coefficients and anchors are reused verbatim."""
        if not (self.breaks[0] <= sub.lo and sub.hi <= self.breaks[-1]):
            raise DomainError("restriction escapes the domain")
        i0 = int(np.searchsorted(self.breaks, sub.lo, side="right")) - 1
        i1 = int(np.searchsorted(self.breaks, sub.hi, side="left")) - 1
        breaks = np.concatenate([[sub.lo], self.breaks[i0 + 1 : i1 + 1], [sub.hi]])
        return PiecewisePoly(breaks, self.anchors[i0 : i1 + 1], self.coeffs[i0 : i1 + 1])

    # -- sup norm ----------------------------------------------------------------

    def sup_abs(self) -> float:
        """Exact sup over the domain of the max-coordinate absolute value.

        Per piece and coordinate the max of |p| is attained at an endpoint or
        at an interior critical point; critical points are closed-form up to
        cubic pieces and bracketed by bisection on the derivative above that.
        """
        s_lo = self.breaks[:-1] - self.anchors
        s_hi = self.breaks[1:] - self.anchors
        best = max(
            float(np.max(np.abs(self._horner(np.arange(len(self.coeffs)), self.breaks[:-1])))),
            float(np.max(np.abs(self._horner(np.arange(len(self.coeffs)), self.breaks[1:])))),
        )
        if self.degree <= 1:
            return best
        for s_crit in self._critical_points(s_lo, s_hi):
            vals = self._poly_at_local(s_crit)
            finite = vals[~np.isnan(vals)]
            if finite.size:
                best = max(best, float(np.max(np.abs(finite))))
        return best

    def _poly_at_local(self, s):
        """Evaluate every (piece, coordinate) polynomial at local offsets s (m, d)."""
        out = self.coeffs[:, -1, :].copy()
        for j in range(self.degree - 1, -1, -1):
            out = out * s + self.coeffs[:, j, :]
        return out

    def _critical_points(self, s_lo, s_hi):
        """Local offsets of interior critical points, clipped pointwise.

        Yields (m, d) arrays with NaN where no admissible critical point
        exists.  Quadratic and cubic pieces are handled in closed form.
        """
        lo = s_lo[:, None]
        hi = s_hi[:, None]

        def clip(s):
            return np.where((s > lo) & (s < hi), s, np.nan)

        if self.degree == 2:
            c1, c2 = self.coeffs[:, 1, :], self.coeffs[:, 2, :]
            with np.errstate(divide="ignore", invalid="ignore"):
                yield clip(-c1 / (2.0 * c2))
        elif self.degree == 3:
            c1, c2, c3 = self.coeffs[:, 1, :], self.coeffs[:, 2, :], self.coeffs[:, 3, :]
            a, b, c = 3.0 * c3, 2.0 * c2, c1
            with np.errstate(divide="ignore", invalid="ignore"):
                disc = b * b - 4.0 * a * c
                sq = np.sqrt(np.where(disc >= 0, disc, np.nan))
                yield clip((-b + sq) / (2.0 * a))
                yield clip((-b - sq) / (2.0 * a))
                # quadratic derivative degenerating to linear
                yield clip(np.where(a == 0, -c / b, np.nan))
        else:
            yield from self._bisected_criticals(s_lo, s_hi)

    def _bisected_criticals(self, s_lo, s_hi):
        """Guarded-bisection fallback for pieces of degree four and above."""
        deriv = self.derivative()
        m, d = len(self.coeffs), self.dim
        grid_n = 8 * self.degree
        roots = [[[] for _ in range(d)] for _ in range(m)]
        most = 0
        for i in range(m):
            offs = np.linspace(s_lo[i], s_hi[i], grid_n)
            dv = np.array([self._eval_piece(deriv.coeffs[i], o) for o in offs])
            for j in range(d):
                sign = np.sign(dv[:, j])
                for f in np.nonzero(sign[:-1] * sign[1:] < 0)[0]:
                    a, b = offs[f], offs[f + 1]
                    fa = dv[f, j]
                    for _ in range(_BISECT_STEPS):
                        midp = 0.5 * (a + b)
                        fm = self._eval_piece(deriv.coeffs[i], midp)[j]
                        if fa * fm <= 0:
                            b = midp
                        else:
                            a, fa = midp, fm
                    roots[i][j].append(0.5 * (a + b))
                most = max(most, len(roots[i][j]))
        for r in range(most):
            out = np.full((m, d), np.nan)
            for i in range(m):
                for j in range(d):
                    if r < len(roots[i][j]):
                        out[i, j] = roots[i][j][r]
            yield out

    @staticmethod
    def _eval_piece(cf, s):
        out = cf[-1].copy()
        for j in range(cf.shape[0] - 2, -1, -1):
            out = out * s + cf[j]
        return out

    def min_abs_and_sign(self):
        """(min |p|, common sign) over the domain for scalar polynomials.

        Returns sign 0 when the sign is not uniform.  Used by monotonicity
        certificates.
        """
        if self.dim != 1:
            raise DomainError("sign certificates are for scalar curves only")
        cands = [
            self._horner(np.arange(len(self.coeffs)), self.breaks[:-1]),
            self._horner(np.arange(len(self.coeffs)), self.breaks[1:]),
        ]
        s_lo = self.breaks[:-1] - self.anchors
        s_hi = self.breaks[1:] - self.anchors
        if self.degree >= 2:
            for s_crit in self._critical_points(s_lo, s_hi):
                cands.append(self._poly_at_local(s_crit))
        allv = np.concatenate([np.ravel(c) for c in cands])
        allv = allv[~np.isnan(allv)]
        if np.all(allv > 0):
            return float(np.min(allv)), 1
        if np.all(allv < 0):
            return float(np.min(-allv)), -1
        return 0.0, 0
