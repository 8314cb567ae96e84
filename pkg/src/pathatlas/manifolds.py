"""Finite-dimensional manifolds as chart systems, bundles as cocycles.

A manifold here is nothing but the data its path-space constructions consume:
chart codomains (open sets of R^m given by predicate + margin) and smooth
transition maps between them.  Chart maps themselves are never stored.  A
bundle adds a rank and a field of invertible matrices per ordered chart pair.
The builtin catalog provides the test geometries: euclidean space, a circle
covered by two arcs, the sphere with two stereographic charts, a torus, and
trivial/tangent/moebius bundles over these.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ChartError, DimensionError, PathAtlasError
from .smoothmaps import MatrixField, SmoothMap

SQRT2 = float(np.sqrt(2.0))


class CatalogError(PathAtlasError):
    """Unknown builtin name or invalid builtin parameters."""


@dataclass(frozen=True)
class Point:
    """A manifold point in chart coordinates."""

    chart: str
    coords: np.ndarray

    def __post_init__(self):
        coords = np.atleast_1d(np.asarray(self.coords, dtype=float))
        coords.flags.writeable = False
        object.__setattr__(self, "coords", coords)

    def __eq__(self, other):
        return (
            isinstance(other, Point)
            and self.chart == other.chart
            and np.array_equal(self.coords, other.coords)
        )


class Chart:
    """A chart codomain: an open subset of R^m with a margin function.

    ``concave`` marks margin functions that are concave (all distance-to-
    boundary margins of convex codomains are); containment of a piecewise-
    linear path is then exactly the containment of its vertices.
    """

    def __init__(self, dim, predicate=None, margin=None, sampler=None, concave=False):
        self.dim = int(dim)
        self._predicate = predicate
        self._margin = margin
        self._sampler = sampler
        self.concave = bool(concave)

    def contains(self, pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if self._predicate is None:
            return np.ones(len(pts), dtype=bool)
        return np.asarray(self._predicate(pts), dtype=bool).reshape(len(pts))

    def margin(self, pts):
        """Conservative inradius (max-coordinate balls); -inf outside."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        inside = self.contains(pts)
        if self._margin is None:
            vals = np.where(inside, np.inf, -np.inf)
        else:
            vals = np.where(inside, np.asarray(self._margin(pts), dtype=float).reshape(len(pts)), -np.inf)
        return vals

    def sample(self, rng, n):
        if self._sampler is None:
            raise ChartError("chart has no sampler")
        return np.atleast_2d(self._sampler(rng, n))


class Manifold:
    """Charts plus smooth transitions; immutable after construction."""

    def __init__(self, dim, charts, transitions, name="", params=None):
        self.dim = int(dim)
        self.charts = dict(charts)
        self._transitions = dict(transitions)
        self.name = name
        self.params = dict(params or {})
        for (i, j), t in self._transitions.items():
            if i not in self.charts or j not in self.charts:
                raise ChartError(f"transition ({i},{j}) references unknown charts")
            if t.dim_in != self.dim or t.dim_out != self.dim:
                raise DimensionError("transition dims must equal the model dim")

    @property
    def chart_ids(self):
        return sorted(self.charts)

    def transition(self, i, j) -> SmoothMap:
        if i == j:
            return SmoothMap.identity(self.dim)
        try:
            return self._transitions[(i, j)]
        except KeyError:
            raise ChartError(f"no transition from chart {i!r} to {j!r}") from None

    def convert_point(self, p: Point, target: str) -> Point:
        """Move a point to another chart through the transition map."""
        if p.chart == target:
            return p
        t = self.transition(p.chart, target)
        if not t.contains(p.coords):
            raise ChartError(f"point {p.coords.tolist()} not in the ({p.chart},{target}) overlap")
        return Point(target, t(p.coords))

    def tangent_cocycle(self, i, j, x) -> np.ndarray:
        """Jacobian of the chart transition at x: the tangent-bundle cocycle."""
        t = self.transition(i, j)
        if not t.contains(x):
            raise ChartError(f"{np.asarray(x).tolist()} outside the ({i},{j}) overlap")
        return t.jac(np.asarray(x, dtype=float))

    def chart_margin(self, chart_id, pts):
        return self.charts[chart_id].margin(pts)


class BundleAtlas:
    """A vector bundle over a Manifold: rank + GL(d)-valued transition cocycles.

    ``cocycle(i, j)`` transforms fiber coordinates from chart i to chart j;
    its argument is a point in chart-i coordinates.
    """

    def __init__(self, base: Manifold, rank, cocycles, name="", params=None):
        self.base = base
        self.rank = int(rank)
        self._cocycles = dict(cocycles)
        self.name = name
        self.params = dict(params or {})

    def cocycle(self, i, j) -> MatrixField:
        if i == j:
            return MatrixField.identity(self.base.dim, self.rank)
        try:
            return self._cocycles[(i, j)]
        except KeyError:
            raise ChartError(f"no cocycle from chart {i!r} to {j!r}") from None


# -- builtin catalog ------------------------------------------------------------


def _ball_chart(dim, radius, rng_scale=None):
    if radius is None:
        return Chart(
            dim,
            sampler=lambda rng, n: rng.normal(0.0, rng_scale or 2.0, (n, dim)),
        )
    r = float(radius)
    return Chart(
        dim,
        predicate=lambda pts: np.max(np.abs(pts), axis=1) < r,
        margin=lambda pts: r - np.max(np.abs(pts), axis=1),
        sampler=lambda rng, n: rng.uniform(-r, r, (n, dim)),
        concave=True,
    )


def _euclidean(params):
    m = int(params.get("m", 2))
    radius = params.get("radius")
    chart = _ball_chart(m, radius)
    return Manifold(m, {"0": chart}, {}, name="euclidean", params={"m": m, "radius": radius})


def _arc_shift_data(w):
    """Overlap components and margins of the two-arc circle transitions."""

    def domain(pts):
        x = pts[:, 0]
        return ((x > np.pi - w) & (x < w)) | ((x > -w) & (x < w - np.pi))

    def margin(pts):
        x = pts[:, 0]
        pos = np.minimum(x - (np.pi - w), w - x)
        neg = np.minimum(x + w, (w - np.pi) - x)
        return np.where(x > 0, pos, neg)

    def shift(pts):
        x = pts[:, 0]
        return np.where(x > 0, x - np.pi, x + np.pi)[:, None]

    return shift, domain, margin


def _circle_transition(w):
    shift, domain, margin = _arc_shift_data(w)
    return SmoothMap(
        1,
        1,
        shift,
        jacobian=lambda pts: np.ones((len(pts), 1, 1)),
        hessian=lambda pts: np.zeros((len(pts), 1, 1, 1)),
        domain=domain,
        margin=margin,
        name="arc-shift",
    )


def _circle(params):
    w = float(params.get("half_width", 2.0))
    if not np.pi / 2 < w < np.pi:
        raise CatalogError("circle arcs need half_width in (pi/2, pi)")
    chart = lambda: Chart(  # noqa: E731 - two identical arc charts
        1,
        predicate=lambda pts: np.abs(pts[:, 0]) < w,
        margin=lambda pts: w - np.abs(pts[:, 0]),
        sampler=lambda rng, n: rng.uniform(-w, w, (n, 1)),
        concave=True,
    )
    t = _circle_transition(w)
    return Manifold(
        1,
        {"a": chart(), "b": chart()},
        {("a", "b"): t, ("b", "a"): t},
        name="circle-two-arcs",
        params={"half_width": w},
    )


def _inversion_map(cap):
    """x -> x / |x|^2 on the annulus 1/cap < |x| < cap, with derivatives."""
    lo = 1.0 / cap

    def fn(pts):
        r2 = np.sum(pts * pts, axis=1, keepdims=True)
        return pts / r2

    def jacobian(pts):
        r2 = np.sum(pts * pts, axis=1)[:, None, None]
        d = pts.shape[1]
        eye = np.eye(d)[None, :, :]
        outer = pts[:, :, None] * pts[:, None, :]
        return (eye * r2 - 2.0 * outer) / (r2 * r2)

    def hessian(pts):
        n, d = pts.shape
        r2 = np.sum(pts * pts, axis=1)
        r4 = (r2 * r2)[:, None, None, None]
        r6 = (r2 * r2 * r2)[:, None, None, None]
        eye = np.eye(d)
        term = (
            eye[None, None, :, :] * pts[:, :, None, None]
            + eye[None, :, None, :] * pts[:, None, :, None]
            + eye[None, :, :, None] * pts[:, None, None, :]
        )
        # H[n, k, i, j] = d_i d_j sigma_k
        outer3 = pts[:, :, None, None] * pts[:, None, :, None] * pts[:, None, None, :]
        return -2.0 * np.transpose(term, (0, 3, 1, 2)) / r4 + 8.0 * outer3 / r6

    def domain(pts):
        r = np.sqrt(np.sum(pts * pts, axis=1))
        return (r > lo) & (r < cap)

    def margin(pts):
        r = np.sqrt(np.sum(pts * pts, axis=1))
        return np.minimum(r - lo, cap - r) / SQRT2

    return SmoothMap(2, 2, fn, jacobian=jacobian, hessian=hessian, domain=domain,
                     margin=margin, name="inversion")


def _sphere(params):
    cap = float(params.get("cap", 6.0))
    if cap <= 1.0:
        raise CatalogError("sphere charts need cap > 1 to cover the sphere")

    def disc_chart():
        return Chart(
            2,
            predicate=lambda pts: np.sqrt(np.sum(pts * pts, axis=1)) < cap,
            margin=lambda pts: (cap - np.sqrt(np.sum(pts * pts, axis=1))) / SQRT2,
            sampler=lambda rng, n: (
                rng.uniform(0.05, cap, n)[:, None]
                * np.stack([np.cos(a := rng.uniform(-np.pi, np.pi, n)), np.sin(a)], axis=1)
            ),
            concave=True,
        )

    t = _inversion_map(cap)
    return Manifold(
        2,
        {"n": disc_chart(), "s": disc_chart()},
        {("n", "s"): t, ("s", "n"): t},
        name="sphere-stereo",
        params={"cap": cap},
    )


def _torus(params):
    w = float(params.get("half_width", 2.0))
    if not np.pi / 2 < w < np.pi:
        raise CatalogError("torus arcs need half_width in (pi/2, pi)")
    shift, sdomain, smargin = _arc_shift_data(w)

    def axis_apply(offsets_differ, col):
        if offsets_differ:
            return shift(col), sdomain(col), smargin(col)
        x = col[:, 0]
        return col, np.abs(x) < w, w - np.abs(x)

    def make_transition(src, dst):
        differ = [src[k] != dst[k] for k in range(2)]

        def fn(pts):
            outs = [axis_apply(differ[k], pts[:, k : k + 1])[0] for k in range(2)]
            return np.concatenate(outs, axis=1)

        def domain(pts):
            oks = [axis_apply(differ[k], pts[:, k : k + 1])[1] for k in range(2)]
            return oks[0] & oks[1]

        def margin(pts):
            ms = [axis_apply(differ[k], pts[:, k : k + 1])[2] for k in range(2)]
            return np.minimum(ms[0], ms[1])

        return SmoothMap(
            2, 2, fn,
            jacobian=lambda pts: np.broadcast_to(np.eye(2), (len(pts), 2, 2)),
            hessian=lambda pts: np.zeros((len(pts), 2, 2, 2)),
            domain=domain, margin=margin, name=f"torus-{src}->{dst}",
        )

    ids = ["00", "10", "01", "11"]
    charts = {
        cid: Chart(
            2,
            predicate=lambda pts: np.max(np.abs(pts), axis=1) < w,
            margin=lambda pts: w - np.max(np.abs(pts), axis=1),
            sampler=lambda rng, n: rng.uniform(-w, w, (n, 2)),
            concave=True,
        )
        for cid in ids
    }
    transitions = {
        (i, j): make_transition(i, j) for i in ids for j in ids if i != j
    }
    return Manifold(2, charts, transitions, name="torus", params={"half_width": w})


def _trivial_bundle(params):
    base = builtin(params.get("base", "euclidean"), params.get("base_params", {}))
    if not isinstance(base, Manifold):
        raise CatalogError("trivial-bundle needs a manifold base")
    d = int(params.get("d", 1))
    cocycles = {}
    for i in base.chart_ids:
        for j in base.chart_ids:
            if i != j and (i, j) in base._transitions:
                t = base.transition(i, j)
                cocycles[(i, j)] = MatrixField(
                    base.dim, d,
                    lambda pts, d=d: np.broadcast_to(np.eye(d), (len(pts), d, d)),
                    domain=t.contains, lipschitz=0.0, name="id",
                )
    return BundleAtlas(base, d, cocycles, name="trivial-bundle",
                       params={"base": base.name, "base_params": base.params, "d": d})


def _tangent_bundle(params):
    base = builtin(params.get("base", "sphere-stereo"), params.get("base_params", {}))
    if not isinstance(base, Manifold):
        raise CatalogError("tangent-bundle needs a manifold base")
    cocycles = {
        (i, j): MatrixField.from_jacobian(base.transition(i, j), name=f"D({i}->{j})")
        for i in base.chart_ids
        for j in base.chart_ids
        if i != j and (i, j) in base._transitions
    }
    return BundleAtlas(base, base.dim, cocycles, name="tangent-bundle",
                       params={"base": base.name, "base_params": base.params})


def _moebius(params):
    base = _circle(params)
    w = base.params["half_width"]

    def sign_ab(pts):
        s = np.where(pts[:, 0] > 0, -1.0, 1.0)
        return s[:, None, None]

    def sign_ba(pts):
        s = np.where(pts[:, 0] < 0, -1.0, 1.0)
        return s[:, None, None]

    t = base.transition("a", "b")
    cocycles = {
        ("a", "b"): MatrixField(1, 1, sign_ab, domain=t.contains, lipschitz=0.0, name="flip-ab"),
        ("b", "a"): MatrixField(1, 1, sign_ba, domain=t.contains, lipschitz=0.0, name="flip-ba"),
    }
    return BundleAtlas(base, 1, cocycles, name="moebius-line-bundle",
                       params={"half_width": w})


_CATALOG = {
    "euclidean": _euclidean,
    "circle-two-arcs": _circle,
    "sphere-stereo": _sphere,
    "torus": _torus,
    "trivial-bundle": _trivial_bundle,
    "tangent-bundle": _tangent_bundle,
    "moebius-line-bundle": _moebius,
}


def builtin(name, params=None):
    """Construct a catalog manifold or bundle by name."""
    try:
        factory = _CATALOG[name]
    except KeyError:
        raise CatalogError(f"unknown builtin {name!r}; known: {sorted(_CATALOG)}") from None
    return factory(params or {})


# -- sampled invariant checks --------------------------------------------------------


def sample_overlap(manifold: Manifold, i, j, rng, n):
    """Up to n chart-i points lying in the (i, j) transition domain."""
    t = manifold.transition(i, j)
    pts = manifold.charts[i].sample(rng, 4 * n)
    pts = pts[t.contains(pts)]
    return pts[:n]

def validate_manifold(manifold: Manifold, rng, n=200, tol=1e-8, fd_tol=1e-5):
    """Sampled atlas invariants; returns a list of (check name, worst error)."""
    results = []
    ids = manifold.chart_ids
    for i in ids:
        pts = manifold.charts[i].sample(rng, n)
        out = manifold.transition(i, i)(pts)
        results.append((f"identity[{i}]", float(np.max(np.abs(out - pts), initial=0.0))))
    for i in ids:
        for j in ids:
            if i == j or (i, j) not in manifold._transitions:
                continue
            pts = sample_overlap(manifold, i, j, rng, n)
            if len(pts) == 0:
                continue
            fwd = manifold.transition(i, j)(pts)
            ok = manifold.transition(j, i).contains(fwd)
            back = manifold.transition(j, i)(fwd[ok])
            err = float(np.max(np.abs(back - pts[ok]), initial=0.0))
            results.append((f"round-trip[{i},{j}]", err))
            exact = manifold.transition(i, j).jac(pts)
            fd = SmoothMap(manifold.dim, manifold.dim,
                           manifold.transition(i, j)._fn)._fd_jacobian(pts)
            results.append((f"jacobian-fd[{i},{j}]",
                            float(np.max(np.abs(exact - fd), initial=0.0))))
    for i in ids:
        for j in ids:
            for k in ids:
                if len({i, j, k}) != 3:
                    continue
                if (i, j) not in manifold._transitions or (j, k) not in manifold._transitions \
                        or (i, k) not in manifold._transitions:
                    continue
                pts = sample_overlap(manifold, i, j, rng, n)
                if len(pts) == 0:
                    continue
                mid = manifold.transition(i, j)(pts)
                ok = manifold.transition(j, k).contains(mid) & manifold.transition(i, k).contains(pts)
                if not ok.any():
                    continue
                via = manifold.transition(j, k)(mid[ok])
                direct = manifold.transition(i, k)(pts[ok])
                results.append((f"cocycle[{i},{j},{k}]",
                                float(np.max(np.abs(via - direct), initial=0.0))))
    results.extend(margin_soundness(manifold, rng, n))
    return results


def margin_soundness(manifold: Manifold, rng, n=50, ball_samples=100):
    """For sampled x and r = margin(x), random points of B(x, r) stay inside."""
    results = []
    for i in manifold.chart_ids:
        chart = manifold.charts[i]
        pts = chart.sample(rng, n)
        margins = chart.margin(pts)
        finite = np.isfinite(margins) & (margins > 0)
        worst = 0.0
        for x, r in zip(pts[finite], margins[finite]):
            ball = x + rng.uniform(-r, r, (ball_samples, manifold.dim)) * (1.0 - 1e-12)
            inside = chart.contains(ball)
            worst = max(worst, float(np.mean(~inside)))
        results.append((f"margin-soundness[{i}]", worst))
    return results


def validate_bundle(bundle: BundleAtlas, rng, n=200):
    """Sampled cocycle invariants; returns (check name, worst error) pairs."""
    results = []
    base = bundle.base
    ids = base.chart_ids
    for i in ids:
        for j in ids:
            if i == j or (i, j) not in base._transitions:
                continue
            pts = sample_overlap(base, i, j, rng, n)
            if len(pts) == 0:
                continue
            g = bundle.cocycle(i, j)(pts)
            dets = np.abs(np.linalg.det(g))
            results.append((f"invertible[{i},{j}]", float(1.0 / max(np.min(dets), 1e-300))))
            fwd = base.transition(i, j)(pts)
            ok = base.transition(j, i).contains(fwd)
            gi = bundle.cocycle(j, i)(fwd[ok])
            prod = np.einsum("nij,njk->nik", gi, g[ok])
            eye = np.eye(bundle.rank)
            results.append((f"inverse[{i},{j}]",
                            float(np.max(np.abs(prod - eye), initial=0.0))))
    for i in ids:
        for j in ids:
            for k in ids:
                if len({i, j, k}) != 3:
                    continue
                if (i, j) not in base._transitions or (j, k) not in base._transitions \
                        or (i, k) not in base._transitions:
                    continue
                pts = sample_overlap(base, i, j, rng, n)
                if len(pts) == 0:
                    continue
                mid = base.transition(i, j)(pts)
                ok = base.transition(j, k).contains(mid) & base.transition(i, k).contains(pts)
                if not ok.any():
                    continue
                gij = bundle.cocycle(i, j)(pts[ok])
                gjk = bundle.cocycle(j, k)(mid[ok])
                gik = bundle.cocycle(i, k)(pts[ok])
                err = np.max(np.abs(np.einsum("nij,njk->nik", gjk, gij) - gik), initial=0.0)
                results.append((f"cocycle[{i},{j},{k}]", float(err)))
    return results
