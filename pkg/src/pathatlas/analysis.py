"""Nonlinear operations on curves: composition, substitution, nets, projection.

This is where the only approximations of the library live.  Composing a
smooth map with an order-k curve replaces the top derivative by a certified
piecewise-constant approximation; everything else in the package is exact
rearrangement.  Certificates come from derivative bounds sampled on image
nets with a safety factor of 2.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .curves import MODE_REGULATED, LinearCurve, RegCurve, SmoothScalarRepar, curve_order
from .errors import BudgetError, DomainError, OrderError
from .intervals import Interval
from .smoothmaps import MatrixField, SmoothMap, sampled_lipschitz
from .stepcurves import StepCurve

DEFAULT_PIECE_BUDGET = 1 << 25


def next_pow2(n: int) -> int:
    n = max(1, int(n))
    return 1 << (n - 1).bit_length()


def _segment_samples(curve, lo, hi, count=17):
    ts = np.linspace(lo, hi, count)
    return ts, curve.eval_many(ts)


def _segment_sample_times(los, his, count):
    """(m, count) sample times per segment, endpoints included."""
    theta = np.linspace(0.0, 1.0, count)[None, :]
    return los[:, None] * (1.0 - theta) + his[:, None] * theta


def _pow2_counts(lens, rates, tol):
    """Per-segment subdivision counts, rounded up to powers of two.

    The rounding keeps grids locally constant under small perturbations of
    the data, which keeps the projected map smooth in its inputs.
    """
    raw = np.maximum(np.ceil(lens * rates / (2.0 * tol)), 1.0)
    return np.exp2(np.ceil(np.log2(raw))).astype(np.int64)


def _segment_grids(los, lens, counts):
    """Concatenated per-segment uniform grids: (owner index, starts, mids)."""
    total = int(np.sum(counts))
    owners = np.repeat(np.arange(len(counts)), counts)
    first = np.concatenate([[0], np.cumsum(counts)[:-1]])
    pos = np.arange(total) - np.repeat(first, counts)
    h = (lens / counts)[owners]
    starts = los[owners] + pos * h
    mids = starts + 0.5 * h
    return owners, starts, mids


def _sampled_rates(ts, vals, safety=2.0):
    """Per-segment Lipschitz estimates from (m, S) times and (m, S, d) values."""
    dt = np.diff(ts, axis=1)
    dv = np.max(np.abs(np.diff(vals, axis=1)), axis=2)
    with np.errstate(divide="ignore", invalid="ignore"):
        q = np.where(dt > 0, dv / dt, 0.0)
    return safety * np.max(q, axis=1)


def compose_smooth(f: SmoothMap, curve, tol=1e-9, piece_budget=DEFAULT_PIECE_BUDGET,
                   check_domain=True, grid_counts=None):
    """f composed with a curve; exact for step curves, certified otherwise.

    For order >= 1 the top derivative of the result is a StepCurve
    approximation of t -> Df(c(t)) c'(t) with certified sup error <= tol.
    Callers that have already verified the image may pass check_domain=False.
    ``grid_counts`` freezes the per-segment projection grid (one count per
    top-derivative piece), making the projection a fixed smooth map of the
    curve data; differentiation probes rely on this.
    """
    if isinstance(curve, StepCurve):
        if check_domain and not np.all(f.contains(curve.values)):
            raise DomainError("step values escape the map domain")
        return StepCurve(curve.breaks, f(curve.values))
    if isinstance(curve, LinearCurve):
        raise OrderError("compose order-0 data as a StepCurve")
    k = curve.order
    if k > 2:
        raise OrderError("composition is supported for curve order <= 2")
    if tol <= 0:
        raise DomainError("tol must be positive")
    if check_domain:
        _check_image_in_domain(f, curve)
    if k == 1:
        top = _project_pushed_derivative(f, curve, tol, piece_budget, grid_counts)
        x0 = f(curve.eval(curve.domain.lo))
        return RegCurve((x0,), top)
    # order 2: jet gains the chain-rule first derivative at t0
    t0 = curve.domain.lo
    c0 = curve.eval(t0)
    j0 = f(c0)
    j1 = f.jac(c0) @ curve.eval(t0, 1)
    top = _project_second_derivative(f, curve, tol, piece_budget)
    return RegCurve((j0, j1), top)


def _check_image_in_domain(f, curve, eps_hint=None):
    """The image net must lie in dom(f); margins certify it when available."""
    eps = eps_hint or 0.05 * (1.0 + curve.norm(0))
    net = image_net(curve, eps)
    margins = f.margin_at(net)
    bad = margins < 0
    if np.any(bad):
        raise DomainError("curve image escapes the map domain near "
                          f"{net[np.argmax(bad)].tolist()}")


def derivative_projection_counts(f, curve, tol) -> np.ndarray:
    """Per-piece grid counts certifying sup error <= tol for Df(c) c'."""
    top = curve.top
    los, his = top.breaks[:-1], top.breaks[1:]
    lens = his - los
    dense = len(los) >= 1024
    if isinstance(top, StepCurve) and f.has_hessian():
        speeds = np.max(np.abs(top.values), axis=1)
        if dense:
            # one hessian row bound per breakpoint; pairwise max per segment
            H = f.hess(curve.eval_many(top.breaks))
            row = np.max(np.sum(np.abs(H), axis=(2, 3)), axis=1)
            bound = np.maximum(row[:-1], row[1:])
        else:
            sample_t = _segment_sample_times(los, his, 9)
            H = f.hess(curve.eval_many(sample_t.ravel()))
            row = np.max(np.sum(np.abs(H), axis=(2, 3)), axis=1).reshape(sample_t.shape)
            bound = np.max(row, axis=1)
        rates = 2.0 * bound * speeds * speeds
    else:
        sample_t = _segment_sample_times(los, his, 2 if dense else 9)
        flat_t = sample_t.ravel()
        g = np.einsum("nij,nj->ni", f.jac(curve.eval_many(flat_t)), top.value_many(flat_t))
        rates = _sampled_rates(sample_t, g.reshape(*sample_t.shape, -1))
    return _pow2_counts(lens, rates, tol)


def _project_pushed_derivative(f, curve, tol, piece_budget, grid_counts=None):
    """Certified StepCurve approximation of t -> Df(c(t)) c'(t) for order 1."""
    top = curve.top
    los, his = top.breaks[:-1], top.breaks[1:]
    lens = his - los
    if grid_counts is not None:
        counts = np.asarray(grid_counts, dtype=np.int64)
        if counts.shape != los.shape:
            raise DomainError("grid counts must match the top-derivative pieces")
    else:
        counts = derivative_projection_counts(f, curve, tol)
    if int(np.sum(counts)) > piece_budget:
        raise BudgetError(f"tolerance {tol} needs more than {piece_budget} pieces")
    _, starts, mids = _segment_grids(los, lens, counts)
    vals = np.einsum("nij,nj->ni", f.jac(curve.eval_many(mids)), top.value_many(mids))
    breaks = np.concatenate([starts, [curve.domain.hi]])
    return StepCurve(breaks, vals)


def _project_second_derivative(f, curve, tol, piece_budget):
    """Certified StepCurve approximation of (f o c)'' for an order-2 curve."""

    def g(ts):
        ts = np.ravel(ts)
        x = curve.eval_many(ts)
        v = curve.eval_many(ts, 1)
        a = curve.top.value_many(ts)
        J = f.jac(x)
        H = f.hess(x)
        return np.einsum("nkij,ni,nj->nk", H, v, v) + np.einsum("nkj,nj->nk", J, a)

    top = curve.top
    pieces_breaks, pieces_values, total = [], [], 0
    for lo, hi in zip(top.breaks[:-1], top.breaks[1:]):
        ts = np.linspace(lo, hi, 17)
        rate = sampled_lipschitz(lambda t: g(t), ts[:, None])
        n = next_pow2(np.ceil((hi - lo) * rate / (2.0 * tol))) if rate > 0 else 1
        total += n
        if total > piece_budget:
            raise BudgetError(f"tolerance {tol} needs more than {piece_budget} pieces")
        grid = np.linspace(lo, hi, n + 1)
        mids = 0.5 * (grid[:-1] + grid[1:])
        pieces_breaks.append(grid[:-1])
        pieces_values.append(g(mids))
    breaks = np.concatenate(pieces_breaks + [[curve.domain.hi]])
    return StepCurve(breaks, np.concatenate(pieces_values))


def push_fiber_values(field: MatrixField, base_curve, fiber: StepCurve, tol,
                      piece_budget=DEFAULT_PIECE_BUDGET) -> StepCurve:
    """Certified StepCurve approximation of t -> g(c(t)) v(t).

    Used to rewrite fiber components through a cocycle along a path piece.
    Exact (single evaluation per piece) when the field is locally constant.
    """
    if base_curve.domain != fiber.domain:
        raise DomainError("base and fiber domains differ")
    los, his = fiber.breaks[:-1], fiber.breaks[1:]
    lens = his - los
    vnorms = np.max(np.abs(fiber.values), axis=1)
    known = field.lipschitz_hint()
    if known is not None:
        if known == 0.0:
            rates = np.zeros(len(los))
        else:
            sample_t = _segment_sample_times(los, his, 5)
            speeds = np.max(np.abs(base_curve.eval_many(sample_t.ravel(), 1))
                            .reshape(*sample_t.shape, -1), axis=(1, 2))
            rates = known * speeds * vnorms
    else:
        sample_t = _segment_sample_times(los, his, 5)
        g = field(base_curve.eval_many(sample_t.ravel()))
        gv = np.einsum("nij,nj->ni", g, np.repeat(fiber.values, sample_t.shape[1], axis=0))
        rates = _sampled_rates(sample_t, gv.reshape(*sample_t.shape, -1))
    counts = _pow2_counts(lens, rates, tol)
    if int(np.sum(counts)) > piece_budget:
        raise BudgetError(f"tolerance {tol} needs more than {piece_budget} pieces")
    owners, starts, mids = _segment_grids(los, lens, counts)
    vals = np.einsum("nij,nj->ni", field(base_curve.eval_many(mids)), fiber.values[owners])
    breaks = np.concatenate([starts, [fiber.domain.hi]])
    return StepCurve(breaks, vals)


# -- change of variables ---------------------------------------------------------


def _phi_nodes_exact(phi: SmoothScalarRepar):
    """Breakpoints of a piecewise-linear phi with exactly accumulated node values."""
    top = phi.curve.top
    breaks = [Fraction(float(b)) for b in top.breaks]
    slopes = [Fraction(float(v[0])) for v in top.values]
    nodes = [Fraction(float(phi.curve.jet[0][0]))]
    for (a, b), m in zip(zip(breaks, breaks[1:]), slopes):
        nodes.append(nodes[-1] + m * (b - a))
    return breaks, nodes, slopes


def change_of_variables(c: StepCurve, phi: SmoothScalarRepar, tol=1e-10):
    """The integral of phi'(s) (c o phi)(s) over phi's domain.

    For piecewise-linear phi the result is computed exactly (rational sweep
    over the common refinement of phi's pieces and the preimages of c's
    breakpoints) and equals the direct integral of c over the image interval
    bit for bit.  Otherwise preimages are located by certified bisection and
    the result is within tol of the exact value.
    """
    if not isinstance(c, StepCurve):
        raise OrderError("substitution integrals act on step curves")
    pl = phi.curve.order == 1 and phi.curve.mode == MODE_REGULATED
    if pl:
        return _change_of_variables_exact(c, phi)
    return _change_of_variables_bisect(c, phi, tol)


def _c_value_between(c: StepCurve, cbreaks, ta: Fraction, tb: Fraction):
    """c's value on the open interval (ta, tb), as exact per-coordinate rationals.

    The interval is known to contain no breakpoint, so the piece holding its
    rational midpoint is the right one; the lookup is an exact comparison.
    """
    from bisect import bisect_right

    mid = (ta + tb) / 2
    j = min(max(bisect_right(cbreaks, mid) - 1, 0), len(c.values) - 1)
    return [Fraction(float(x)) for x in c.values[j]]


def _change_of_variables_exact(c: StepCurve, phi: SmoothScalarRepar):
    breaks, nodes, slopes = _phi_nodes_exact(phi)
    clo, chi = Fraction(float(c.breaks[0])), Fraction(float(c.breaks[-1]))
    if min(nodes) < clo or max(nodes) > chi:
        raise DomainError("phi leaves the domain of c")
    cbreaks = [Fraction(float(b)) for b in c.breaks]
    total = [Fraction(0)] * c.dim
    for j, m in enumerate(slopes):
        ra, rb = breaks[j], breaks[j + 1]
        ta, tb = nodes[j], nodes[j + 1]
        lo_t, hi_t = (ta, tb) if m > 0 else (tb, ta)
        inner = [T for T in cbreaks if lo_t < T < hi_t]
        rs = [ra] + [ra + (T - ta) / m for T in sorted(inner, reverse=m < 0)] + [rb]
        for r0, r1 in zip(rs, rs[1:]):
            t0, t1 = ta + m * (r0 - ra), ta + m * (r1 - ra)
            val = _c_value_between(c, cbreaks, min(t0, t1), max(t0, t1))
            for i in range(c.dim):
                total[i] += m * (r1 - r0) * val[i]
    return np.array([float(x) for x in total])


def _change_of_variables_bisect(c: StepCurve, phi: SmoothScalarRepar, tol):
    dom = phi.domain
    ends = np.array([phi(dom.lo), phi(dom.hi)])
    span_lo, span_hi = float(min(ends)), float(max(ends))
    if span_lo < c.breaks[0] - 1e-12 or span_hi > c.breaks[-1] + 1e-12:
        raise DomainError("phi leaves the domain of c")
    jumps = np.abs(np.diff(c.values, axis=0)).sum() + 1.0
    tol_t = tol / float(jumps)
    splits = [dom.lo]
    inner = [T for T in c.breaks[1:-1] if span_lo < T < span_hi]
    for T in inner:
        splits.append(_preimage_bisect(phi, float(T), tol_t))
    splits.append(dom.hi)
    splits = sorted(splits)
    total = np.zeros(c.dim)
    for r0, r1 in zip(splits, splits[1:]):
        if r1 <= r0:
            continue
        rmid = 0.5 * (r0 + r1)
        tmid = min(max(phi(rmid), float(c.breaks[0])), float(c.breaks[-1]))
        total += (phi(r1) - phi(r0)) * c.value_at(tmid)
    return total


def _preimage_bisect(phi: SmoothScalarRepar, target, tol_t):
    lo, hi = phi.domain.lo, phi.domain.hi
    flo = phi(lo) - target
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = phi(mid) - target
        if abs(fm) <= tol_t * 0.5:
            return mid
        if flo * fm <= 0:
            hi = mid
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)


# -- image nets and projection back to steps ----------------------------------------


def image_net(curve, eps, point_budget=1 << 22) -> np.ndarray:
    """A finite set of curve values within eps (max-coordinate) of every value.

    Exact (the full finite value set) for step curves; a Lipschitz-spaced
    evaluation grid for continuous curves.
    """
    if eps <= 0:
        raise DomainError("eps must be positive")
    if isinstance(curve, StepCurve):
        return np.unique(curve.values, axis=0)
    if isinstance(curve, LinearCurve):
        rate = float(np.max(np.abs(np.diff(curve.nodes, axis=0)
                                   / np.diff(curve.breaks)[:, None]))) if len(curve.breaks) > 1 else 0.0
        base_breaks = curve.breaks
    else:
        rate = curve.top.sup_norm() if curve.order == 1 else curve._derivative_polys()[1].sup_abs()
        base_breaks = curve.top.breaks
    dom = curve.domain
    if rate == 0.0:
        ts = np.asarray(base_breaks)
    else:
        n = int(np.ceil(dom.length * rate / eps))
        if n + 1 > point_budget:
            raise BudgetError("net would exceed the point budget")
        ts = np.union1d(np.linspace(dom.lo, dom.hi, n + 1), base_breaks)
    values = curve.value_many(ts) if isinstance(curve, LinearCurve) else curve.eval_many(ts)
    return np.unique(values, axis=0)


def step_approximate(source, eps, domain=None, modulus=None, lipschitz=None,
                     max_pieces=1 << 16) -> StepCurve:
    """Project a sampled curve onto a canonical StepCurve within eps (sup norm).

    ``source`` is either a StepCurve (returned as is) or a callable mapping a
    time array to an (N, d) value array, in which case ``domain`` is required
    together with a continuity certificate: ``lipschitz`` (a rate bound) or
    ``modulus`` (h -> oscillation bound).  Without a certificate a doubling
    heuristic is used and may exhaust the refinement budget.
    """
    if isinstance(source, StepCurve):
        return source
    if isinstance(source, (RegCurve, LinearCurve)):
        dom = source.domain
        fn = source.value_many if isinstance(source, LinearCurve) else source.eval_many
        if lipschitz is None:
            if isinstance(source, LinearCurve):
                lipschitz = float(np.max(np.abs(np.diff(source.nodes, axis=0)
                                                / np.diff(source.breaks)[:, None])))
            elif source.order == 1:
                lipschitz = source.top.sup_norm()
            else:
                lipschitz = source._derivative_polys()[1].sup_abs()
        return step_approximate(fn, eps, domain=dom, modulus=modulus,
                                lipschitz=lipschitz, max_pieces=max_pieces)
    if domain is None:
        raise DomainError("callable sources need an explicit domain")
    if eps <= 0:
        raise DomainError("eps must be positive")
    if lipschitz is not None:
        n = int(np.ceil(domain.length * float(lipschitz) / eps)) if lipschitz > 0 else 1
    elif modulus is not None:
        h = domain.length
        while modulus(h) > eps:
            h *= 0.5
            if domain.length / h > max_pieces:
                raise BudgetError("modulus refinement exhausted the budget")
        n = int(np.ceil(domain.length / h))
    else:
        return _step_approximate_doubling(source, eps, domain, max_pieces)
    n = max(1, min(n, max_pieces))
    if n > max_pieces:
        raise BudgetError("refinement budget exhausted")
    grid = np.linspace(domain.lo, domain.hi, n + 1)
    mids = 0.5 * (grid[:-1] + grid[1:])
    return StepCurve(grid, np.atleast_2d(np.asarray(source(mids), dtype=float)))


def _step_approximate_doubling(source, eps, domain, max_pieces):
    from .stepcurves import sup_distance

    n = 8
    prev = None
    while n <= max_pieces:
        grid = np.linspace(domain.lo, domain.hi, n + 1)
        mids = 0.5 * (grid[:-1] + grid[1:])
        cur = StepCurve(grid, np.atleast_2d(np.asarray(source(mids), dtype=float)))
        if prev is not None and sup_distance(prev, cur) <= 0.5 * eps:
            return cur
        prev, n = cur, 2 * n
    raise BudgetError("no continuity certificate and the refinement budget is exhausted")
