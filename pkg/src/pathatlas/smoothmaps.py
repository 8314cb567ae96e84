"""Smooth maps between open subsets of R^n with batch evaluation.

Every callable here works on batches: an (N, dim_in) array of points in, an
(N, ...) array out.  Jacobians are analytic when supplied and second-order
central finite differences (step 1e-5 * (1 + |x|)) otherwise.  Domains are
open sets described by a predicate plus a margin function returning a
conservative radius (max-coordinate norm) of a ball still inside the domain;
margin functions are expected to be 1-Lipschitz, which every distance-like
margin is.
"""

from __future__ import annotations

import numpy as np

from .errors import ChartError, DimensionError

DEFAULT_FD_STEP = 1e-5


def _as_points(x, dim):
    pts = np.asarray(x, dtype=float)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)
    if pts.shape[1] != dim:
        raise DimensionError(f"expected points in R^{dim}, got shape {pts.shape}")
    return pts, single


class SmoothMap:
    """A smooth map with optional analytic jacobian/hessian and an open domain."""

    def __init__(
        self,
        dim_in,
        dim_out,
        fn,
        jacobian=None,
        hessian=None,
        domain=None,
        margin=None,
        fd_step=DEFAULT_FD_STEP,
        name="",
    ):
        self.dim_in = int(dim_in)
        self.dim_out = int(dim_out)
        self._fn = fn
        self._jacobian = jacobian
        self._hessian = hessian
        self._domain = domain
        self._margin = margin
        self.fd_step = float(fd_step)
        self.name = name

    def __repr__(self):
        return f"SmoothMap({self.name or 'anonymous'}: R^{self.dim_in} -> R^{self.dim_out})"

    # -- evaluation -----------------------------------------------------------

    def __call__(self, x):
        pts, single = _as_points(x, self.dim_in)
        out = np.asarray(self._fn(pts), dtype=float).reshape(len(pts), self.dim_out)
        return out[0] if single else out

    def jac(self, x):
        pts, single = _as_points(x, self.dim_in)
        if self._jacobian is not None:
            out = np.asarray(self._jacobian(pts), dtype=float).reshape(
                len(pts), self.dim_out, self.dim_in
            )
        else:
            out = self._fd_jacobian(pts)
        return out[0] if single else out

    def _fd_jacobian(self, pts):
        h = self.fd_step * (1.0 + np.max(np.abs(pts), axis=1))  # (N,)
        cols = []
        for j in range(self.dim_in):
            e = np.zeros((1, self.dim_in))
            e[0, j] = 1.0
            step = h[:, None] * e
            fp = np.asarray(self._fn(pts + step), dtype=float).reshape(len(pts), self.dim_out)
            fm = np.asarray(self._fn(pts - step), dtype=float).reshape(len(pts), self.dim_out)
            cols.append((fp - fm) / (2.0 * h[:, None]))
        return np.stack(cols, axis=2)

    def has_hessian(self) -> bool:
        return self._hessian is not None

    def hess(self, x):
        pts, single = _as_points(x, self.dim_in)
        if self._hessian is None:
            raise ChartError(f"{self!r} has no second derivative")
        out = np.asarray(self._hessian(pts), dtype=float).reshape(
            len(pts), self.dim_out, self.dim_in, self.dim_in
        )
        return out[0] if single else out

    # -- domain ------------------------------------------------------------------

    def contains(self, x):
        pts, single = _as_points(x, self.dim_in)
        if self._domain is None:
            out = np.ones(len(pts), dtype=bool)
        else:
            out = np.asarray(self._domain(pts), dtype=bool).reshape(len(pts))
        return bool(out[0]) if single else out

    def margin_at(self, x):
        """Conservative inradius of the domain at x; 0 when unknown, -inf outside."""
        pts, single = _as_points(x, self.dim_in)
        inside = self.contains(pts)
        if self._margin is not None:
            out = np.asarray(self._margin(pts), dtype=float).reshape(len(pts))
            out = np.where(inside, out, -np.inf)
        else:
            out = np.where(inside, np.inf if self._domain is None else 0.0, -np.inf)
        return float(out[0]) if single else out

    # -- combinators --------------------------------------------------------------

    def compose(self, inner: "SmoothMap") -> "SmoothMap":
        """self after inner, with chain-rule jacobian."""
        if inner.dim_out != self.dim_in:
            raise DimensionError("composition dims mismatch")

        def fn(pts):
            return self(inner(pts))

        def jacobian(pts):
            ji = inner.jac(pts)
            jo = self.jac(inner(pts))
            return np.einsum("nij,njk->nik", jo, ji)

        def domain(pts):
            ok = inner.contains(pts)
            mid = inner(pts[ok]) if ok.any() else np.empty((0, self.dim_in))
            out = np.zeros(len(pts), dtype=bool)
            out[ok] = self.contains(mid)
            return out

        return SmoothMap(
            inner.dim_in,
            self.dim_out,
            fn,
            jacobian=jacobian,
            domain=domain,
            name=f"{self.name}*{inner.name}",
        )

    @staticmethod
    def identity(dim) -> "SmoothMap":
        return SmoothMap(
            dim,
            dim,
            lambda pts: pts,
            jacobian=lambda pts: np.broadcast_to(np.eye(dim), (len(pts), dim, dim)),
            hessian=lambda pts: np.zeros((len(pts), dim, dim, dim)),
            name="id",
        )

    @staticmethod
    def linear(matrix, offset=None, name="linear") -> "SmoothMap":
        matrix = np.asarray(matrix, dtype=float)
        dout, din = matrix.shape
        offset = np.zeros(dout) if offset is None else np.asarray(offset, dtype=float)

        return SmoothMap(
            din,
            dout,
            lambda pts: pts @ matrix.T + offset,
            jacobian=lambda pts: np.broadcast_to(matrix, (len(pts), dout, din)),
            hessian=lambda pts: np.zeros((len(pts), dout, din, din)),
            name=name,
        )


class MatrixField:
    """A smooth field of invertible d x d matrices over an open set in R^m."""

    def __init__(self, dim_in, d, fn, domain=None, margin=None, lipschitz=None, name=""):
        self.dim_in = int(dim_in)
        self.d = int(d)
        self._fn = fn
        self._domain = domain
        self._margin = margin
        self._lipschitz = lipschitz  # optional known Lipschitz bound of x -> g(x)
        self.name = name

    def __call__(self, x):
        pts, single = _as_points(x, self.dim_in)
        out = np.asarray(self._fn(pts), dtype=float).reshape(len(pts), self.d, self.d)
        return out[0] if single else out

    def contains(self, x):
        pts, single = _as_points(x, self.dim_in)
        if self._domain is None:
            out = np.ones(len(pts), dtype=bool)
        else:
            out = np.asarray(self._domain(pts), dtype=bool).reshape(len(pts))
        return bool(out[0]) if single else out

    def lipschitz_hint(self):
        return self._lipschitz

    @staticmethod
    def constant(dim_in, matrix, name="const") -> "MatrixField":
        matrix = np.asarray(matrix, dtype=float)
        d = matrix.shape[0]
        return MatrixField(
            dim_in,
            d,
            lambda pts: np.broadcast_to(matrix, (len(pts), d, d)),
            lipschitz=0.0,
            name=name,
        )

    @staticmethod
    def identity(dim_in, d) -> "MatrixField":
        return MatrixField.constant(dim_in, np.eye(d), name="id")

    @staticmethod
    def from_jacobian(smooth_map: SmoothMap, name="") -> "MatrixField":
        """The jacobian of a map as a matrix field (tangent-type cocycles)."""
        if smooth_map.dim_in != smooth_map.dim_out:
            raise DimensionError("jacobian cocycles need square jacobians")
        return MatrixField(
            smooth_map.dim_in,
            smooth_map.dim_in,
            lambda pts: smooth_map.jac(pts),
            domain=smooth_map.contains,
            margin=smooth_map._margin,
            name=name or f"D({smooth_map.name})",
        )


def operator_norm_inf(matrix) -> float:
    """The operator norm induced by the max-coordinate norm: max row sum."""
    matrix = np.asarray(matrix, dtype=float)
    return float(np.max(np.sum(np.abs(matrix), axis=-1)))


def sampled_lipschitz(fn, points, safety=2.0) -> float:
    """Max difference quotient over consecutive sample points, times a safety factor.

    Conservative stand-in for a continuity modulus when no derivative bound is
    available.
    """
    points = np.asarray(points, dtype=float)
    if len(points) < 2:
        return 0.0
    vals = np.asarray(fn(points), dtype=float).reshape(len(points), -1)
    dx = np.max(np.abs(np.diff(points, axis=0)), axis=1)
    dv = np.max(np.abs(np.diff(vals, axis=0)), axis=1)
    good = dx > 0
    if not good.any():
        return 0.0
    return safety * float(np.max(dv[good] / dx[good]))
