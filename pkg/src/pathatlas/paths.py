"""Paths on manifolds through chart systems, and their step-curve coordinates.

A chart system is a strict partition of [0, 1] with one chart per piece.  A
path is stored as one order-1 curve per piece, in that piece's chart
coordinates.  Its coordinates ("rep") consist of the initial point plus the
per-piece derivative step curves (and fiber step curves for bundle lifts).
The coordinate map and the reconstruction map are mutually inverse by
construction: reconstruction integrates the derivative pieces and hands the
junction values through the chart transitions.

Changing chart systems works on the common refinement of the two partitions;
refinement-only changes are exact slicing, genuine chart changes re-project
the transported derivative onto a step curve with a certified tolerance (the
single approximation point of the package).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .analysis import compose_smooth, image_net, push_fiber_values
from .curves import RegCurve, primitive
from .errors import (
    CoverageError,
    DimensionError,
    DomainError,
    NotInteriorError,
    PathAtlasError,
)
from .intervals import Interval
from .manifolds import BundleAtlas, Manifold, Point
from .smoothmaps import operator_norm_inf
from .stepcurves import StepCurve, concat_many, sup_distance

JUNCTION_TOL = 1e-10


@dataclass(frozen=True)
class PathChartSystem:
    """A strict partition of [0, 1] with a chart id per piece."""

    knots: tuple
    charts: tuple

    def __init__(self, knots, charts):
        knots = tuple(float(k) for k in knots)
        charts = tuple(charts)
        if knots[0] != 0.0 or knots[-1] != 1.0:
            raise DomainError("chart systems partition [0, 1]")
        if any(a >= b for a, b in zip(knots, knots[1:])):
            raise DomainError("chart-system partitions are strict")
        if len(charts) != len(knots) - 1:
            raise DimensionError("one chart per partition piece")
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "charts", charts)

    @property
    def n_pieces(self) -> int:
        return len(self.charts)

    @property
    def pieces(self):
        return [Interval(a, b) for a, b in zip(self.knots, self.knots[1:])]

    def piece_index(self, t: float) -> int:
        if not 0.0 <= t <= 1.0:
            raise DomainError(f"t={t} outside [0, 1]")
        if t == 1.0:
            return self.n_pieces - 1
        return int(np.searchsorted(np.asarray(self.knots), t, side="right")) - 1


@dataclass(frozen=True)
class ManifoldPath:
    """Per-piece order-1 curves in chart coordinates over a chart system."""

    manifold: Manifold
    system: PathChartSystem
    pieces: tuple

    def __init__(self, manifold, system, pieces):
        pieces = tuple(pieces)
        if len(pieces) != system.n_pieces:
            raise DimensionError("one local curve per system piece")
        for curve, iv in zip(pieces, system.pieces):
            if not isinstance(curve, RegCurve) or curve.order < 1:
                raise DomainError("local curves must have order >= 1")
            if curve.domain != iv:
                raise DomainError("local curve domains must match the partition")
            if curve.dim != manifold.dim:
                raise DimensionError("local curves live in chart coordinates")
        object.__setattr__(self, "manifold", manifold)
        object.__setattr__(self, "system", system)
        object.__setattr__(self, "pieces", pieces)

    def evaluate(self, t: float) -> Point:
        i = self.system.piece_index(t)
        return Point(self.system.charts[i], self.pieces[i].eval(t))


@dataclass(frozen=True)
class BundleLift:
    """A path plus per-piece fiber step curves in chart trivializations."""

    bundle: BundleAtlas
    base: ManifoldPath
    fibers: tuple

    def __init__(self, bundle, base, fibers):
        fibers = tuple(fibers)
        if len(fibers) != base.system.n_pieces:
            raise DimensionError("one fiber curve per system piece")
        for fib, iv in zip(fibers, base.system.pieces):
            if not isinstance(fib, StepCurve) or fib.domain != iv:
                raise DomainError("fiber curves must be StepCurves on the partition pieces")
            if fib.dim != bundle.rank:
                raise DimensionError("fiber curves must match the bundle rank")
        object.__setattr__(self, "bundle", bundle)
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "fibers", fibers)

    def evaluate(self, t: float):
        i = self.base.system.piece_index(t)
        return self.base.evaluate(t), self.fibers[i].value_at(t)


@dataclass(frozen=True)
class PathRep:
    """Chart coordinates of a path: initial point plus derivative pieces.

    Bundle lifts additionally carry one fiber step curve per piece.
    """

    system: PathChartSystem
    x: np.ndarray
    pieces: tuple
    fibers: tuple = None

    def __init__(self, system, x, pieces, fibers=None):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        x.flags.writeable = False
        pieces = tuple(pieces)
        if len(pieces) != system.n_pieces:
            raise DimensionError("one derivative piece per system piece")
        for y, iv in zip(pieces, system.pieces):
            if y.domain != iv:
                raise DomainError("derivative piece domains must match the partition")
            if y.dim != x.shape[0]:
                raise DimensionError("derivative pieces must match dim of x")
        if fibers is not None:
            fibers = tuple(fibers)
            if len(fibers) != system.n_pieces:
                raise DimensionError("one fiber piece per system piece")
            for u, iv in zip(fibers, system.pieces):
                if u.domain != iv:
                    raise DomainError("fiber piece domains must match the partition")
        object.__setattr__(self, "system", system)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "pieces", pieces)
        object.__setattr__(self, "fibers", fibers)

    @property
    def is_lift(self) -> bool:
        return self.fibers is not None

    def drop_fibers(self) -> "PathRep":
        return PathRep(self.system, self.x, self.pieces)


LiftRep = PathRep


# -- chart map and reconstruction ------------------------------------------------


def chart_map(path: ManifoldPath) -> PathRep:
    """Coordinates of a path: initial chart point and per-piece derivatives."""
    for p in path.pieces:
        if p.order != 1:
            raise DomainError("the coordinate map acts on order-1 paths")
    x = path.pieces[0].eval(0.0)
    return PathRep(path.system, x, tuple(p.top for p in path.pieces))


def lift_chart_map(lift: BundleLift) -> PathRep:
    base = chart_map(lift.base)
    return PathRep(base.system, base.x, base.pieces, lift.fibers)


def reconstruct(manifold: Manifold, system: PathChartSystem, rep: PathRep,
                validate=True) -> ManifoldPath:
    """Rebuild the path: integrate pieces, hand junctions through transitions."""
    if rep.system != system:
        raise DomainError("rep does not belong to the given system")
    pieces = []
    x = rep.x
    for i, y in enumerate(rep.pieces):
        if i > 0:
            prev_end = pieces[-1].eval(system.knots[i])
            t = manifold.transition(system.charts[i - 1], system.charts[i])
            if not t.contains(prev_end):
                raise CoverageError(
                    f"junction value escapes the ({system.charts[i-1]},{system.charts[i]}) overlap",
                    time=system.knots[i],
                )
            x = t(prev_end)
        pieces.append(primitive(y, x))
    path = ManifoldPath(manifold, system, pieces)
    if validate:
        ok, t_bad = containment_check(path)
        if not ok:
            raise CoverageError("reconstructed piece escapes its chart domain", time=t_bad)
    return path


def reconstruct_lift(bundle: BundleAtlas, system: PathChartSystem, rep: PathRep,
                     validate=True) -> BundleLift:
    if rep.fibers is None:
        raise DomainError("rep carries no fiber pieces")
    base = reconstruct(bundle.base, system, rep.drop_fibers(), validate=validate)
    return BundleLift(bundle, base, rep.fibers)


def _piece_margin_exact(chart, curve):
    """Exact min chart margin along an order-1 piece with concave margin.

    The curve is piecewise linear between its derivative breakpoints, so a
    concave margin attains its min over the piece at a vertex.
    """
    verts = curve.eval_many(curve.top.breaks)
    margins = chart.margin(verts)
    k = int(np.argmin(margins))
    return float(margins[k]), float(curve.top.breaks[k])


def _piece_margin_net(chart, curve, eps0=0.05, floor=1e-9):
    """Net-based conservative min margin; adaptive in the net spacing."""
    eps = eps0 * (1.0 + curve.norm(0))
    while True:
        ts_breaks = curve.top.breaks
        rate = curve.top.sup_norm() if curve.order == 1 else curve._derivative_polys()[1].sup_abs()
        n = max(2, int(np.ceil(curve.domain.length * max(rate, 1e-12) / eps)) + 1)
        ts = np.union1d(np.linspace(curve.domain.lo, curve.domain.hi, n), ts_breaks)
        margins = chart.margin(curve.eval_many(ts))
        k = int(np.argmin(margins))
        worst, t_bad = float(margins[k]), float(ts[k])
        if worst <= 0.0:
            return worst, t_bad
        if worst > eps:
            return worst - eps, t_bad
        eps *= 0.5
        if eps < floor:
            return 0.0, t_bad


def piece_containment(chart, curve, concave=False):
    """(conservative margin, witness time) of a piece inside its chart codomain."""
    if concave and curve.order == 1:
        return _piece_margin_exact(chart, curve)
    return _piece_margin_net(chart, curve)


def containment_check(path: ManifoldPath):
    """(True, None) if every piece sits inside its chart with positive margin."""
    for curve, cid in zip(path.pieces, path.system.charts):
        chart = path.manifold.charts[cid]
        m, t_bad = piece_containment(chart, curve, concave=getattr(chart, "concave", False))
        if m <= 0.0:
            return False, t_bad
    return True, None


def junction_defects(path: ManifoldPath) -> np.ndarray:
    """Max-coordinate mismatch of each junction against the chart transition."""
    out = []
    for i in range(1, path.system.n_pieces):
        tau = path.system.knots[i]
        t = path.manifold.transition(path.system.charts[i - 1], path.system.charts[i])
        prev_end = path.pieces[i - 1].eval(tau)
        if not t.contains(prev_end):
            out.append(np.inf)
            continue
        expected = t(prev_end)
        out.append(float(np.max(np.abs(path.pieces[i].eval(tau) - expected))))
    return np.asarray(out)


def validate_path(path: ManifoldPath, junction_tol=JUNCTION_TOL):
    """Raise when containment or junction compatibility fails."""
    ok, t_bad = containment_check(path)
    if not ok:
        raise CoverageError("piece escapes its chart domain", time=t_bad)
    defects = junction_defects(path)
    if len(defects) and float(np.max(defects)) > junction_tol:
        i = int(np.argmax(defects))
        raise PathAtlasError(
            f"junction mismatch {defects[i]:.3e} at t={path.system.knots[i + 1]}"
        )


# -- the euclidean assembly isomorphism ----------------------------------------------


def assemble(rep: PathRep) -> RegCurve:
    """Concatenate the derivative pieces and integrate from the initial point."""
    return primitive(concat_many(rep.pieces), rep.x)


def disassemble(curve: RegCurve, system: PathChartSystem) -> PathRep:
    """Inverse of :func:`assemble`: evaluate at 0 and slice the derivative."""
    if curve.order != 1 or curve.domain != Interval(0.0, 1.0):
        raise DomainError("assembly inverse acts on order-1 curves over [0, 1]")
    pieces = [curve.top.restrict(iv) for iv in system.pieces]
    return PathRep(system, curve.eval(0.0), pieces)


# -- chart-system transitions -------------------------------------------------------


def _overlap_pieces(src: PathChartSystem, dst_piece: Interval):
    """Indices and intervals of source pieces meeting a destination piece."""
    out = []
    for j, iv in enumerate(src.pieces):
        inter = iv.intersect(dst_piece)
        if inter is not None:
            out.append((j, inter))
    return out


def _check_overlap_cover(transition, curve, eps0=0.05):
    """First time at which the piece leaves the transition overlap, or None."""
    scale = float(np.max(np.abs(curve.jet[0]))) + curve.domain.length * curve.top.sup_norm()
    eps = eps0 * (1.0 + scale)
    rate = max(curve.top.sup_norm(), 1e-12)
    n = max(2, int(np.ceil(curve.domain.length * rate / eps)) + 1)
    ts = np.union1d(np.linspace(curve.domain.lo, curve.domain.hi, n), curve.top.breaks)
    margins = transition.margin_at(curve.eval_many(ts))
    bad = margins <= 0
    if bad.any():
        return float(ts[np.argmax(bad)])
    return None


def transition_rep(atlas, src_system: PathChartSystem, dst_system: PathChartSystem,
                   rep: PathRep, tol=1e-9, grid_plan=None) -> PathRep:
    """Rewrite a rep from one chart system to another.

    Works on the common refinement of the two partitions.  Where the chart is
    unchanged the result is an exact slice; where it changes, the derivative
    pieces are pushed through the chart transition and re-projected onto step
    curves with certified sup error <= tol, and fiber pieces are rotated by
    the bundle cocycle the same way.

    ``grid_plan`` (from :func:`transition_grid_plan`) freezes the projection
    grids, making the whole map a fixed smooth function of the rep data.
    """
    if isinstance(atlas, BundleAtlas):
        manifold, bundle = atlas.base, atlas
    else:
        manifold, bundle = atlas, None
    if rep.is_lift and bundle is None:
        raise DomainError("lift reps need a bundle atlas")
    path = reconstruct(manifold, src_system, rep, validate=False)

    t0_map = manifold.transition(src_system.charts[0], dst_system.charts[0])
    if not t0_map.contains(rep.x):
        raise CoverageError("initial point escapes the destination chart", time=0.0)
    x_new = t0_map(rep.x) if src_system.charts[0] != dst_system.charts[0] else rep.x

    new_pieces = []
    new_fibers = [] if rep.is_lift else None
    for i, dpiece in enumerate(dst_system.pieces):
        phi = dst_system.charts[i]
        y_parts, u_parts = [], []
        for j, inter in _overlap_pieces(src_system, dpiece):
            psi = src_system.charts[j]
            f = path.pieces[j].restrict(inter)
            if psi == phi:
                y_parts.append(f.top)
                if rep.is_lift:
                    u_parts.append(rep.fibers[j].restrict(inter))
                continue
            tmap = manifold.transition(psi, phi)
            t_bad = _check_overlap_cover(tmap, f)
            if t_bad is not None:
                raise CoverageError(
                    f"path leaves the ({psi},{phi}) overlap", time=t_bad
                )
            counts = grid_plan.get((i, j)) if grid_plan is not None else None
            y_parts.append(
                compose_smooth(tmap, f, tol, check_domain=False, grid_counts=counts).top
            )
            if rep.is_lift:
                u_parts.append(
                    push_fiber_values(bundle.cocycle(psi, phi), f,
                                      rep.fibers[j].restrict(inter), tol)
                )
        new_pieces.append(concat_many(y_parts))
        if rep.is_lift:
            new_fibers.append(concat_many(u_parts))
    return PathRep(dst_system, x_new, new_pieces,
                   tuple(new_fibers) if new_fibers is not None else None)


def transition_grid_plan(atlas, src_system, dst_system, rep, tol=1e-9):
    """Record the certified projection grid of a chart-system change.

    Returns {(dst piece, src piece): counts} for every genuine chart change;
    passing the plan back to :func:`transition_rep` freezes those grids.
    """
    from .analysis import derivative_projection_counts

    manifold = atlas.base if isinstance(atlas, BundleAtlas) else atlas
    path = reconstruct(manifold, src_system, rep, validate=False)
    plan = {}
    for i, dpiece in enumerate(dst_system.pieces):
        phi = dst_system.charts[i]
        for j, inter in _overlap_pieces(src_system, dpiece):
            psi = src_system.charts[j]
            if psi == phi:
                continue
            f = path.pieces[j].restrict(inter)
            plan[(i, j)] = derivative_projection_counts(
                manifold.transition(psi, phi), f, tol
            )
    return plan


# -- openness margins ------------------------------------------------------------------


def openness_margin(path: ManifoldPath, ball_samples=64, rng=None) -> float:
    """A radius eta such that every rep within eta of this path's rep
    reconstructs to a valid path in the same system.

    Combines per-piece chart margins, junction overlap margins and sampled
    Lipschitz bounds of the transitions (safety factor 2) through the
    junction recursion of the reconstruction map.
    """
    rng = rng or np.random.default_rng(0)
    system = path.system
    manifold = path.manifold
    n = system.n_pieces
    deltas = []
    for i, (curve, cid) in enumerate(zip(path.pieces, system.charts)):
        chart = manifold.charts[cid]
        m, _ = piece_containment(chart, curve, concave=getattr(chart, "concave", False))
        if m <= 0.0:
            raise NotInteriorError(f"piece {i} touches its chart boundary")
        if i < n - 1:
            tmap = manifold.transition(cid, system.charts[i + 1])
            jm = tmap.margin_at(curve.eval(system.knots[i + 1]))
            if not jm > 0.0:
                raise NotInteriorError(f"junction {i} touches the overlap boundary")
            m = min(m, float(jm))
        deltas.append(m)

    rates = []
    for i in range(n - 1):
        tmap = manifold.transition(system.charts[i], system.charts[i + 1])
        p = path.pieces[i].eval(system.knots[i + 1])
        ball = p + rng.uniform(-1.0, 1.0, (ball_samples, manifold.dim)) * deltas[i] * (1 - 1e-9)
        ball = np.concatenate([p[None, :], ball])
        ball = ball[tmap.contains(ball)]
        jac = tmap.jac(ball)
        rates.append(2.0 * max(operator_norm_inf(j) for j in jac))

    lengths = [iv.length for iv in system.pieces]
    a = 1.0 + lengths[0]
    eta = deltas[0] / a
    for i in range(1, n):
        a = rates[i - 1] * a + lengths[i]
        eta = min(eta, deltas[i] / a)
    if not eta > 0.0:
        raise NotInteriorError("no positive margin")
    return float(eta)


# -- topology membership ---------------------------------------------------------------


class Containment(Enum):
    INSIDE = "inside"
    OUTSIDE = "outside"
    INDETERMINATE = "indeterminate"


class Region:
    """A region given per chart by a signed margin function on coordinates."""

    def __init__(self, margin_fn):
        self._fn = margin_fn

    def margin(self, chart_id, pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        return np.asarray(self._fn(chart_id, pts), dtype=float).reshape(len(pts))

    @staticmethod
    def everywhere():
        return Region(lambda cid, pts: np.full(len(pts), np.inf))


def _classify(margins, slack):
    margins = np.asarray(margins, dtype=float)
    if np.any(margins < -slack):
        return Containment.OUTSIDE
    if np.all(margins > slack):
        return Containment.INSIDE
    return Containment.INDETERMINATE


def _k_intervals(K):
    """Normalize K to a list of (a, b) pairs with 0 <= a <= b <= 1."""
    out = []
    for item in K:
        a, b = (item, item) if np.isscalar(item) else (item[0], item[1])
        if not (0.0 <= a <= b <= 1.0):
            raise DomainError("K must consist of subintervals of [0, 1]")
        out.append((float(a), float(b)))
    return out


def in_neighborhood(obj, K, total_region=None, base_region=None, deriv_region=None,
                    eps=1e-3) -> Containment:
    """Membership test for the sub-basic neighborhoods of the path topology.

    ``K`` is a finite union of closed subintervals (scalars allowed for
    singletons).  The three optional regions constrain the lift values, the
    base values and the base derivative values on K.  The answer is
    conservative: nets are checked with slack eps, and INDETERMINATE is
    returned when a net value sits within the slack of a region boundary.
    """
    if isinstance(obj, BundleLift):
        base, fibers = obj.base, obj.fibers
    else:
        base, fibers = obj, None
    if total_region is not None and fibers is None:
        raise DomainError("total-space regions need a bundle lift")
    verdicts = []
    for a, b in _k_intervals(K):
        idxs = range(base.system.piece_index(a), base.system.piece_index(b) + 1)
        for i in idxs:
            iv = base.system.pieces[i]
            lo, hi = max(a, iv.lo), min(b, iv.hi)
            cid = base.system.charts[i]
            curve = base.pieces[i]
            if lo == hi:
                pts = curve.eval_many(np.array([lo]))
                ts = np.array([lo])
            else:
                sub = curve.restrict(Interval(lo, hi))
                rate = max(sub.top.sup_norm(), 1e-12)
                npts = max(2, int(np.ceil((hi - lo) * rate / eps)) + 1)
                ts = np.union1d(np.linspace(lo, hi, npts), sub.top.breaks)
                pts = sub.eval_many(ts)
            if base_region is not None:
                verdicts.append(_classify(base_region.margin(cid, pts), eps))
            if deriv_region is not None:
                dvals = curve.top.value_many(ts)
                verdicts.append(_classify(deriv_region.margin(cid, dvals), 0.0))
            if total_region is not None:
                fvals = fibers[i].value_many(ts)
                total = np.concatenate([pts, fvals], axis=1)
                verdicts.append(_classify(total_region.margin(cid, total), eps))
    if Containment.OUTSIDE in verdicts:
        return Containment.OUTSIDE
    if Containment.INDETERMINATE in verdicts:
        return Containment.INDETERMINATE
    return Containment.INSIDE


# -- cover search -----------------------------------------------------------------------


def find_chart_system(samples, manifold: Manifold, min_margin=0.0) -> PathChartSystem:
    """Greedy sweep assigning charts to runs of path samples.

    ``samples`` is a time-sorted list of (t, Point) covering [0, 1].  A run
    extends while some chart contains every converted sample with margin above
    ``min_margin``; at the first failure a new piece starts at the previous
    sample.
    """
    samples = sorted(samples, key=lambda s: s[0])
    if not samples or samples[0][0] != 0.0 or samples[-1][0] != 1.0:
        raise DomainError("samples must start at t=0 and end at t=1")

    def viable(point):
        out = {}
        for cid in manifold.chart_ids:
            if point.chart == cid:
                coords = point.coords
            else:
                tmap = manifold.transition(point.chart, cid)
                if not tmap.contains(point.coords):
                    continue
                coords = tmap(point.coords)
            m = float(manifold.charts[cid].margin(coords[None, :])[0])
            if m > min_margin:
                out[cid] = m
        return out

    all_viable = []
    for t, p in samples:
        v = viable(p)
        if not v:
            raise CoverageError("sample outside every chart codomain", time=t)
        all_viable.append(v)

    knots = [0.0]
    charts = []
    run_start = 0
    run_set = set(all_viable[0])
    k = 1
    while k < len(samples):
        nxt = run_set & set(all_viable[k])
        if nxt:
            run_set = nxt
            k += 1
            continue
        if k - 1 == run_start:
            raise CoverageError("no chart covers two consecutive samples",
                                time=samples[k][0])
        best = max(run_set,
                   key=lambda c: min(all_viable[m][c] for m in range(run_start, k)))
        charts.append(best)
        knots.append(samples[k - 1][0])
        run_start = k - 1
        run_set = set(all_viable[k - 1]) & set(all_viable[k])
        if not run_set:
            raise CoverageError("no chart covers two consecutive samples",
                                time=samples[k][0])
        k += 1
    best = max(run_set,
               key=lambda c: min(all_viable[m][c] for m in range(run_start, len(samples))))
    charts.append(best)
    knots.append(1.0)
    return PathChartSystem(knots, charts)


# -- rep arithmetic (linear structure of the model space) --------------------------------


def _require_same_system(a: PathRep, b: PathRep):
    if a.system != b.system:
        raise DomainError("reps live in different chart systems")
    if a.is_lift != b.is_lift:
        raise DomainError("cannot mix lift and base reps")


def rep_combine(a: PathRep, ca: float, b: PathRep, cb: float) -> PathRep:
    """ca * a + cb * b in the model space of the common chart system."""
    _require_same_system(a, b)

    def comb(sa, sb):
        merged = np.union1d(sa.breaks, sb.breaks)
        va = sa.value_many(merged[:-1])
        vb = sb.value_many(merged[:-1])
        return StepCurve(merged, ca * va + cb * vb)

    pieces = tuple(comb(sa, sb) for sa, sb in zip(a.pieces, b.pieces))
    fibers = None
    if a.is_lift:
        fibers = tuple(comb(sa, sb) for sa, sb in zip(a.fibers, b.fibers))
    return PathRep(a.system, ca * a.x + cb * b.x, pieces, fibers)


def rep_scale(a: PathRep, c: float) -> PathRep:
    pieces = tuple(p.scale(c) for p in a.pieces)
    fibers = tuple(u.scale(c) for u in a.fibers) if a.is_lift else None
    return PathRep(a.system, c * a.x, pieces, fibers)


def rep_distance(a: PathRep, b: PathRep) -> float:
    """Sup metric on reps: max over the initial point and all pieces."""
    _require_same_system(a, b)
    d = float(np.max(np.abs(a.x - b.x)))
    for sa, sb in zip(a.pieces, b.pieces):
        d = max(d, sup_distance(sa, sb))
    if a.is_lift:
        for sa, sb in zip(a.fibers, b.fibers):
            d = max(d, sup_distance(sa, sb))
    return d


def rep_norm(a: PathRep) -> float:
    d = float(np.max(np.abs(a.x)))
    for s in a.pieces:
        d = max(d, s.sup_norm())
    if a.is_lift:
        for s in a.fibers:
            d = max(d, s.sup_norm())
    return d


def directional_order_probe(fn, rep: PathRep, direction: PathRep, h=1e-2):
    """Observed convergence order of central differences of ``fn`` at ``rep``.

    Computes D_h = (fn(rep + h d) - fn(rep - h d)) / (2h) for h, h/2, h/4 and
    returns log2 of the ratio of successive differences; approximately 2 when
    fn is twice differentiable along the direction.
    """
    quotients = []
    for step in (h, h / 2.0, h / 4.0):
        plus = fn(rep_combine(rep, 1.0, direction, step))
        minus = fn(rep_combine(rep, 1.0, direction, -step))
        quotients.append(rep_combine(plus, 0.5 / step, minus, -0.5 / step))
    d1 = rep_distance(quotients[0], quotients[1])
    d2 = rep_distance(quotients[1], quotients[2])
    if d2 == 0.0:
        return np.inf if d1 == 0.0 else 0.0
    return float(np.log2(d1 / d2))
