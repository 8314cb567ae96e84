"""Seeded random corpora and the registered invariant suites.

Each suite replays a named family of properties on ``count`` seeded random
instances and returns aggregated Check lines.  Case i draws its own generator
seeded by (seed, i), so results are bit-reproducible and independent of how
cases are distributed over workers (PATHATLAS_WORKERS caps the fan-out).
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import numpy as np

from . import report
from .analysis import change_of_variables, image_net
from .curves import RegCurve, SmoothScalarRepar, derivative_split, primitive
from .errors import PathAtlasError
from .intervals import Interval
from .manifolds import builtin, validate_bundle, validate_manifold
from .paths import (
    PathChartSystem,
    PathRep,
    chart_map,
    directional_order_probe,
    lift_chart_map,
    openness_margin,
    reconstruct,
    reconstruct_lift,
    rep_combine,
    rep_distance,
    transition_grid_plan,
    transition_rep,
)
from .report import Check, check, check_le
from .stepcurves import StepCurve, concat
from .transport import (
    Deformation,
    FieldRep,
    build_trivialization,
    compatibility_automorphisms,
    covariant_derivative,
    cross_system_compatibility,
    deformation_tangent,
    represent_section,
    section_from_global,
    transport,
)

ANCHORS = {
    "concat": "concatenation-isometry",
    "restrict": "restriction-contraction",
    "split": "derivative-primitive-inverse",
    "push": "linear-push-integral-commutation",
    "subst": "substitution-integral-identity",
    "atlas": "atlas-cocycle-identities",
    "roundtrip": "coordinate-reconstruction-inverse",
    "transition": "chart-system-transition",
    "smooth": "transition-smoothness-order",
    "open": "coordinate-range-openness",
    "transport": "transport-groupoid-holonomy",
    "normeq": "trivialization-norm-equivalence",
    "deform": "deformation-tangent-chart-independence",
}


def _workers():
    try:
        return max(1, int(os.environ.get("PATHATLAS_WORKERS", "1")))
    except ValueError:
        return 1


def _map_cases(fn, count, seed):
    """Deterministic per-case evaluation, optionally fanned across threads."""
    rngs = [np.random.default_rng([seed, i]) for i in range(count)]
    w = _workers()
    if w > 1:
        with ThreadPoolExecutor(max_workers=w) as pool:
            return list(pool.map(fn, rngs))
    return [fn(r) for r in rngs]


# -- random corpora -------------------------------------------------------------------


def random_interval(rng, lo=0.0, hi=1.0):
    a, b = np.sort(rng.uniform(lo, hi, 2))
    if b - a < 0.05:
        b = a + 0.05
    return Interval(float(a), float(b))


def random_step(rng, iv: Interval, d, max_pieces=6, scale=1.0) -> StepCurve:
    n = int(rng.integers(1, max_pieces + 1))
    inner = np.sort(rng.uniform(iv.lo, iv.hi, n - 1)) if n > 1 else np.array([])
    breaks = np.unique(np.concatenate([[iv.lo], inner, [iv.hi]]))
    values = rng.uniform(-scale, scale, (len(breaks) - 1, d))
    return StepCurve(breaks, values)


def random_order1(rng, iv: Interval, d, scale=1.0) -> RegCurve:
    return primitive(random_step(rng, iv, d, scale=scale), rng.uniform(-scale, scale, d))


def random_curve(rng, iv: Interval, d, k, scale=1.0):
    if k == 0:
        return random_step(rng, iv, d, scale=scale)
    jet = tuple(rng.uniform(-scale, scale, d) for _ in range(k))
    return RegCurve(jet, random_step(rng, iv, d, scale=scale))


def random_subinterval(rng, iv: Interval) -> Interval:
    a, b = np.sort(rng.uniform(iv.lo, iv.hi, 2))
    if b - a < 0.01 * iv.length:
        mid = 0.5 * (a + b)
        a = max(iv.lo, mid - 0.01 * iv.length)
        b = min(iv.hi, a + 0.02 * iv.length)
    return Interval(float(a), float(b))


def _random_knots(rng, n_pieces):
    inner = np.sort(rng.uniform(0.15, 0.85, n_pieces - 1)) if n_pieces > 1 else []
    knots = [0.0, *np.round(inner, 6), 1.0]
    return [float(k) for k in knots]


def _piece_steps_with_drift(rng, iv, x_from, x_to, jitter):
    """A step curve whose integral moves x_from to x_to, plus bounded jitter."""
    d = len(x_from)
    base = (np.asarray(x_to) - np.asarray(x_from)) / iv.length
    noise = random_step(rng, iv, d, max_pieces=4, scale=jitter)
    shift = noise.integral() / iv.length
    return noise.shift_values(base - shift)


def sample_valid_rep(name, rng):
    """(manifold, system, rep) with a validated reconstruction, per builtin."""
    for _ in range(40):
        try:
            manifold, system, rep = _rep_candidate(name, rng)
            path = reconstruct(manifold, system, rep, validate=True)
            from .paths import validate_path

            validate_path(path)
            return manifold, system, rep
        except PathAtlasError:
            continue
    raise PathAtlasError(f"could not draw a valid rep for {name}")


_CIRCLE_POS = (1.4, 1.7)


def _rep_candidate(name, rng):
    if name == "euclidean":
        m = builtin("euclidean", {"m": 2, "radius": 2.0})
        n = int(rng.integers(1, 4))
        system = PathChartSystem(_random_knots(rng, n), ["0"] * n)
        x = rng.uniform(-0.8, 0.8, 2)
        pieces = [random_step(rng, iv, 2, scale=0.5) for iv in system.pieces]
        return m, system, PathRep(system, x, pieces)
    if name == "sphere-stereo":
        m = builtin("sphere-stereo")
        n = int(rng.integers(1, 4))
        charts = [rng.choice(["n", "s"])]
        for _ in range(n - 1):
            prev = charts[-1]
            charts.append(rng.choice(["n", "s"]) if rng.random() < 0.5
                          else ("s" if prev == "n" else "n"))
        system = PathChartSystem(_random_knots(rng, n), charts)
        r0, a0 = rng.uniform(0.85, 1.3), rng.uniform(-np.pi, np.pi)
        x = np.array([r0 * np.cos(a0), r0 * np.sin(a0)])
        pieces = [random_step(rng, iv, 2, scale=0.35 / max(iv.length, 0.2))
                  for iv in system.pieces]
        return m, system, PathRep(system, x, pieces)
    if name == "circle-two-arcs":
        m = builtin("circle-two-arcs")
        n = int(rng.integers(1, 4))
        charts = ["a" if i % 2 == 0 else "b" for i in range(n)]
        if rng.random() < 0.5:
            charts = ["b" if c == "a" else "a" for c in charts]
        system = PathChartSystem(_random_knots(rng, n), charts)
        x = rng.uniform(-0.3, 0.3, 1)
        pieces = []
        cur = x
        for i, iv in enumerate(system.pieces):
            if i < n - 1:
                sgn = 1.0 if rng.random() < 0.5 else -1.0
                target = np.array([sgn * rng.uniform(*_CIRCLE_POS)])
                step = _piece_steps_with_drift(rng, iv, cur, target, jitter=0.15)
                cur = np.array([target[0] - np.pi * np.sign(target[0])])
            else:
                target = cur + rng.uniform(-0.25, 0.25, 1)
                step = _piece_steps_with_drift(rng, iv, cur, target, jitter=0.15)
            pieces.append(step)
        return m, system, PathRep(system, x, pieces)
    if name == "torus":
        m = builtin("torus")
        n = int(rng.integers(1, 3))
        charts = ["00"]
        for _ in range(n - 1):
            flip_axis = int(rng.integers(0, 2))
            prev = charts[-1]
            nxt = list(prev)
            nxt[flip_axis] = "1" if prev[flip_axis] == "0" else "0"
            charts.append("".join(nxt))
        system = PathChartSystem(_random_knots(rng, n), charts)
        x = rng.uniform(-0.3, 0.3, 2)
        cur = x
        pieces = []
        for i, iv in enumerate(system.pieces):
            if i < n - 1:
                flip_axis = 0 if charts[i][0] != charts[i + 1][0] else 1
                target = np.array(cur)
                sgn = 1.0 if rng.random() < 0.5 else -1.0
                target[flip_axis] = sgn * rng.uniform(*_CIRCLE_POS)
                other = 1 - flip_axis
                target[other] = np.clip(cur[other] + rng.uniform(-0.2, 0.2), -1.5, 1.5)
                step = _piece_steps_with_drift(rng, iv, cur, target, jitter=0.15)
                nxt = np.array(target)
                nxt[flip_axis] -= np.pi * np.sign(target[flip_axis])
                cur = nxt
            else:
                target = cur + rng.uniform(-0.2, 0.2, 2)
                step = _piece_steps_with_drift(rng, iv, cur, target, jitter=0.15)
            pieces.append(step)
        return m, system, PathRep(system, x, pieces)
    raise PathAtlasError(f"no rep generator for {name}")


PATH_MANIFOLDS = ["euclidean", "circle-two-arcs", "sphere-stereo", "torus"]


def sphere_transition_scenario(rng, speed=0.3):
    """A ring path valid in both a one-chart and a two-chart sphere system."""
    sp = builtin("sphere-stereo")
    src = PathChartSystem([0.0, 1.0], ["n"])
    r0, a0 = rng.uniform(0.9, 1.2), rng.uniform(-np.pi, np.pi)
    x = np.array([r0 * np.cos(a0), r0 * np.sin(a0)])
    y = random_step(rng, Interval(0.0, 1.0), 2, max_pieces=4, scale=speed)
    rep = PathRep(src, x, [y])
    dst = PathChartSystem([0.0, 0.5, 1.0], ["s", "n"])
    return sp, src, dst, rep


# -- suites ------------------------------------------------------------------------------


def suite_concat_isometry(seed, count, tol):
    def case(rng):
        d = int(rng.integers(1, 4))
        b = float(rng.uniform(0.2, 0.8))
        c1 = random_step(rng, Interval(0.0, b), d, scale=3.0)
        c2 = random_step(rng, Interval(b, 1.0), d, scale=3.0)
        joined = concat(c1, c2)
        lhs = joined.sup_norm()
        rhs = max(c1.sup_norm(), c2.sup_norm())
        inv1 = joined.restrict(Interval(0.0, b)) == c1
        inv2 = joined.restrict(Interval(b, 1.0)) == c2
        return abs(lhs - rhs), inv1 and inv2

    rows = _map_cases(case, count, seed)
    worst = max(r[0] for r in rows)
    return [
        check(f"concat-isometry[cases={count}]", ANCHORS["concat"], worst == 0.0,
              measured=worst, bound=0.0),
        check(f"concat-restriction-inverse[cases={count}]", ANCHORS["concat"],
              all(r[1] for r in rows), measured=sum(r[1] for r in rows), bound=count),
    ]


def suite_restriction_contraction(seed, count, tol):
    def case(rng):
        k = int(rng.integers(0, 3))
        d = int(rng.integers(1, 4))
        iv = random_interval(rng)
        c = random_curve(rng, iv, d, k, scale=2.0)
        sub = random_subinterval(rng, iv)
        full = c.sup_norm() if k == 0 else c.norm()
        restr = c.restrict(sub)
        part = restr.sup_norm() if k == 0 else restr.norm()
        return part - full

    rows = _map_cases(case, count, seed)
    worst = max(rows)
    return [check(f"restriction-contraction[cases={count}]", ANCHORS["restrict"],
                  worst <= 0.0, measured=worst, bound=0.0)]


def suite_derivative_split(seed, count, tol):
    def case(rng):
        d = int(rng.integers(1, 4))
        iv = random_interval(rng)
        c = random_order1(rng, iv, d, scale=2.0)
        x0, u = derivative_split(c)
        round1 = primitive(u, x0) == c
        # the two continuity bounds of the splitting isomorphism
        lhs1 = float(np.max(np.abs(x0))) + u.sup_norm()
        ok1 = lhs1 <= 2.0 * c.norm()
        x = rng.uniform(-2, 2, d)
        v = random_step(rng, iv, d, scale=2.0)
        b = primitive(v, x)
        lhs2 = b.norm()
        rhs2 = (1.0 + iv.length) * (float(np.max(np.abs(x))) + v.sup_norm())
        x0b, ub = derivative_split(b)
        round2 = np.array_equal(x0b, x) and ub == v
        return round1 and round2, lhs1 - 2.0 * c.norm(), lhs2 - rhs2

    rows = _map_cases(case, count, seed)
    return [
        check(f"split-round-trip[cases={count}]", ANCHORS["split"],
              all(r[0] for r in rows), measured=sum(r[0] for r in rows), bound=count),
        check(f"split-bound-factor-2[cases={count}]", ANCHORS["split"],
              max(r[1] for r in rows) <= 0.0, measured=max(r[1] for r in rows), bound=0.0),
        check(f"primitive-bound-1-plus-length[cases={count}]", ANCHORS["split"],
              max(r[2] for r in rows) <= 0.0, measured=max(r[2] for r in rows), bound=0.0),
    ]


def suite_integral_commutation(seed, count, tol):
    def case(rng):
        d = int(rng.integers(1, 4))
        dp = int(rng.integers(1, 4))
        iv = random_interval(rng)
        A = rng.uniform(-2, 2, (dp, d))
        c = random_step(rng, iv, d, scale=2.0)
        x0 = rng.uniform(-1, 1, d)
        lhs = primitive(c, x0).push(A)
        rhs = primitive(c.push(A), A @ x0)
        structural = lhs == rhs
        t_end = iv.hi
        pointwise = np.array_equal(lhs.eval(t_end), rhs.eval(t_end))
        return structural and pointwise

    rows = _map_cases(case, count, seed)
    return [check(f"push-primitive-commutation[cases={count}]", ANCHORS["push"],
                  all(rows), measured=sum(rows), bound=count)]


def _rational_direct_integral(c: StepCurve, top: StepCurve, x0: float):
    """Independent oracle: exact rational integral of c over the image of phi."""
    fb = [Fraction(float(b)) for b in top.breaks]
    slopes = [Fraction(float(v[0])) for v in top.values]
    nodes = [Fraction(float(x0))]
    for (a, b), mslope in zip(zip(fb, fb[1:]), slopes):
        nodes.append(nodes[-1] + mslope * (b - a))
    lo, hi = min(nodes[0], nodes[-1]), max(nodes[0], nodes[-1])
    sgn = 1 if nodes[-1] >= nodes[0] else -1
    cb = [Fraction(float(b)) for b in c.breaks]
    total = [Fraction(0)] * c.dim
    for i in range(len(c.values)):
        a, b = max(cb[i], lo), min(cb[i + 1], hi)
        if b > a:
            for j in range(c.dim):
                total[j] += (b - a) * Fraction(float(c.values[i][j]))
    return np.array([sgn * float(x) for x in total])


def suite_change_of_variables(seed, count, tol):
    def case(rng):
        d = int(rng.integers(1, 3))
        c = random_step(rng, Interval(0.0, 1.0), d, scale=3.0)
        sdom = Interval(0.1, 0.7)
        sgn = 1.0 if rng.random() < 0.5 else -1.0
        top = random_step(rng, sdom, 1, max_pieces=3, scale=0.0).shift_values(
            [sgn * rng.uniform(0.2, 1.2)]
        )
        top = StepCurve(top.breaks, np.abs(rng.uniform(0.2, 1.2, (top.n_pieces, 1))) * sgn)
        x0 = rng.uniform(0.35, 0.6)
        phi_curve = primitive(top, [x0])
        ends = [phi_curve.eval(sdom.lo)[0], phi_curve.eval(sdom.hi)[0]]
        if min(ends) < 0.0 or max(ends) > 1.0:
            scale = 0.3 / max(abs(e - x0) for e in ends)
            top = top.scale(scale)
            phi_curve = primitive(top, [x0])
        phi = SmoothScalarRepar(phi_curve)
        lhs = change_of_variables(c, phi)
        rhs = _rational_direct_integral(c, top, x0)
        return np.array_equal(lhs, rhs)

    rows = _map_cases(case, count, seed)
    return [check(f"substitution-exact-vs-direct[cases={count}]", ANCHORS["subst"],
                  all(rows), measured=sum(rows), bound=count)]


def suite_atlas_invariants(seed, count, tol):
    checks = []
    rng = np.random.default_rng([seed, 0])
    n = max(50, count // 4)
    for name in PATH_MANIFOLDS:
        m = builtin(name, {"m": 2, "radius": 3.0} if name == "euclidean" else {})
        for cname, err in validate_manifold(m, rng, n=n):
            bound = 1e-5 if "jacobian-fd" in cname else (0.0 if "margin" in cname else 1e-8)
            checks.append(check_le(f"{name}:{cname}", ANCHORS["atlas"], err, bound))
    for bname, params in [
        ("trivial-bundle", {"base": "sphere-stereo", "d": 2}),
        ("tangent-bundle", {"base": "sphere-stereo"}),
        ("moebius-line-bundle", {}),
    ]:
        b = builtin(bname, params)
        for cname, err in validate_bundle(b, rng, n=n):
            if cname.startswith("invertible"):
                continue
            checks.append(check_le(f"{bname}:{cname}", ANCHORS["atlas"], err, 1e-8))
    return checks


def suite_atlas_roundtrip(seed, count, tol):
    checks = []
    for name in PATH_MANIFOLDS:
        def case(rng, name=name):
            manifold, system, rep = sample_valid_rep(name, rng)
            path = reconstruct(manifold, system, rep, validate=False)
            rep2 = chart_map(path)
            exact = (
                np.array_equal(rep2.x, rep.x)
                and all(a == b for a, b in zip(rep2.pieces, rep.pieces))
            )
            path2 = reconstruct(manifold, system, rep2, validate=False)
            exact2 = all(a == b for a, b in zip(path2.pieces, path.pieces))
            return exact and exact2

        rows = _map_cases(case, count, seed)
        checks.append(check(f"roundtrip-{name}[cases={count}]", ANCHORS["roundtrip"],
                            all(rows), measured=sum(rows), bound=count))
    return checks


def suite_transition_refinement(seed, count, tol):
    def case(rng):
        manifold, system, rep = sample_valid_rep("sphere-stereo", rng)
        extra = np.round(rng.uniform(0.1, 0.9, 2), 4)
        knots = sorted(set(system.knots) | set(float(e) for e in extra))
        charts = []
        for a, b in zip(knots, knots[1:]):
            charts.append(system.charts[system.piece_index(0.5 * (a + b))])
        fine = PathChartSystem(knots, charts)
        out = transition_rep(manifold, system, fine, rep, tol=tol)
        ok = True
        for piece, iv in zip(out.pieces, fine.pieces):
            j = system.piece_index(0.5 * (iv.lo + iv.hi))
            ok = ok and piece == rep.pieces[j].restrict(iv)
        back = transition_rep(manifold, fine, system, out, tol=tol)
        return ok and rep_distance(back, rep) == 0.0

    rows = _map_cases(case, count, seed)
    return [check(f"refinement-transitions-exact[cases={count}]", ANCHORS["transition"],
                  all(rows), measured=sum(rows), bound=count)]


def suite_transition_roundtrip(seed, count, tol):
    rng = np.random.default_rng([seed, 0])
    sp, src, dst, rep = sphere_transition_scenario(rng)
    out = transition_rep(sp, src, dst, rep, tol=tol)
    back = transition_rep(sp, dst, src, out, tol=tol)
    err = rep_distance(back, rep)
    same = transition_rep(sp, src, src, rep, tol=tol)
    return [
        check_le("sphere-two-chart-roundtrip", ANCHORS["transition"], err, 1e-6),
        check("identity-transition-exact", ANCHORS["transition"],
              rep_distance(same, rep) == 0.0, measured=rep_distance(same, rep), bound=0.0),
    ]


def suite_transition_smoothness(seed, count, tol):
    rng = np.random.default_rng([seed, 0])
    sp, src, dst, rep = sphere_transition_scenario(rng, speed=0.25)
    probe_tol = max(tol, 1e-5)
    orders = []

    def case(rng_case):
        direction = PathRep(
            src,
            rng_case.uniform(-1, 1, 2),
            [StepCurve(rep.pieces[0].breaks,
                       rng_case.uniform(-1, 1, (rep.pieces[0].n_pieces, 2)))],
        )
        base = rep_combine(rep, 1.0, direction, 0.0)
        plan = transition_grid_plan(sp, src, dst, base, tol=probe_tol)

        def fwd(w):
            return transition_rep(sp, src, dst, w, tol=probe_tol, grid_plan=plan)

        return directional_order_probe(fwd, base, direction, h=5e-3)

    orders = _map_cases(case, count, seed)
    worst = min(orders)
    return [check(f"transition-differentiation-order[probes={count}]", ANCHORS["smooth"],
                  worst >= 1.9, measured=worst, bound=1.9)]


def suite_openness(seed, count, tol, scenarios=20):
    def scenario(rng_case):
        name = PATH_MANIFOLDS[int(rng_case.integers(0, len(PATH_MANIFOLDS)))]
        manifold, system, rep = sample_valid_rep(name, rng_case)
        path = reconstruct(manifold, system, rep, validate=False)
        eta = openness_margin(path, rng=np.random.default_rng(0))
        failures = 0
        for _ in range(count):
            size = rng_case.uniform(0.0, 0.95) * eta
            dx = rng_case.uniform(-1, 1, manifold.dim) * size
            pieces = []
            for y in rep.pieces:
                extra = rng_case.uniform(y.domain.lo, y.domain.hi, 2)
                merged = np.union1d(y.breaks, extra)
                dv = rng_case.uniform(-1, 1, (len(merged) - 1, manifold.dim)) * size
                pieces.append(StepCurve(merged, y.value_many(merged[:-1]) + dv))
            pert = PathRep(system, rep.x + dx, pieces)
            try:
                reconstruct(manifold, system, pert, validate=True)
            except PathAtlasError:
                failures += 1
        return eta, failures

    rows = _map_cases(scenario, scenarios, seed)
    total_fail = sum(r[1] for r in rows)
    return [
        check(f"openness-perturbations[scenarios={scenarios},per={count}]",
              ANCHORS["open"], total_fail == 0, measured=total_fail, bound=0),
        check("openness-margins-positive", ANCHORS["open"],
              all(r[0] > 0 for r in rows),
              measured=float(min(r[0] for r in rows)), bound=0.0),
    ]


def _moebius_loop():
    mo = builtin("moebius-line-bundle")
    sys_c = PathChartSystem([0.0, 0.5, 1.0], ["a", "b"])
    speed = 2.0 * np.pi
    rep = PathRep(
        sys_c,
        [-1.5],
        [StepCurve.constant(Interval(0.0, 0.5), [speed]),
         StepCurve.constant(Interval(0.5, 1.0), [speed])],
    )
    loop = reconstruct(mo.base, sys_c, rep)
    return mo, loop


def suite_transport_groupoid(seed, count, tol):
    mo, loop = _moebius_loop()
    triv_m = build_trivialization(loop, mo)

    tb = builtin("trivial-bundle", {"base": "sphere-stereo", "d": 3})
    rng = np.random.default_rng([seed, 1])
    manifold, system, rep = sample_valid_rep("sphere-stereo", rng)
    path = reconstruct(manifold, system, rep, validate=False)
    triv_t = build_trivialization(path, tb)

    def case(rng_case):
        ok = True
        for triv in (triv_m, triv_t):
            r, s, t = rng_case.uniform(0, 1, 3)
            ok = ok and np.array_equal(
                transport(triv, t, r) @ transport(triv, s, t), transport(triv, s, r)
            )
            ok = ok and np.array_equal(transport(triv, t, t), np.eye(triv.rank))
            ok = ok and np.array_equal(
                transport(triv, s, t) @ transport(triv, t, s), np.eye(triv.rank)
            )
        return ok

    rows = _map_cases(case, count, seed)
    hol = transport(triv_m, 0.0, 1.0)
    return [
        check(f"groupoid-laws-exact[cases={count}]", ANCHORS["transport"],
              all(rows), measured=sum(rows), bound=count),
        check("moebius-loop-holonomy", ANCHORS["transport"],
              np.array_equal(hol, -np.eye(1)), measured=float(hol[0, 0]), bound=-1.0),
    ]


def _norm_equivalence_scenarios(seed):
    rng = np.random.default_rng([seed, 2])
    out = []
    manifold, system, rep = sample_valid_rep("sphere-stereo", rng)
    path = reconstruct(manifold, system, rep, validate=False)
    tb = builtin("tangent-bundle", {"base": "sphere-stereo"})
    out.append(("sphere-tangent", path, tb, np.array([[1.4, 0.3], [-0.2, 0.9]])))
    mo, loop = _moebius_loop()
    out.append(("moebius", loop, mo, np.array([[0.7]])))
    cm, csys, crep = sample_valid_rep("circle-two-arcs", rng)
    cpath = reconstruct(cm, csys, crep, validate=False)
    tb2 = builtin("trivial-bundle",
                  {"base": "circle-two-arcs", "d": 2})
    out.append(("circle-trivial", cpath, tb2, np.array([[1.2, -0.5], [0.4, 0.8]])))
    return out


def suite_norm_equivalence(seed, count, tol):
    checks = []
    for label, path, bundle, F in _norm_equivalence_scenarios(seed):
        system = path.system
        d = bundle.rank
        triv_a = build_trivialization(path, bundle)
        triv_b = build_trivialization(path, bundle, initial_frame=F)
        mats, kappa = compatibility_automorphisms(triv_a, triv_b)
        length = 1.0
        bound_const = (1.0 + length) * kappa

        def case(rng_case):
            w = random_order1(rng_case, Interval(0.0, 1.0), d, scale=1.5)
            w0 = float(np.max(np.abs(w.eval(0.0))))
            w1 = w.top.sup_norm()
            n1 = w0 + w1
            n2 = w.norm()
            ok_lower = max(w0, w1) <= n1 + 1e-15
            ok_upper = n2 <= w0 + (1.0 + length) * w1 + 1e-12
            # the same field represented through the second trivialization
            pieces_b = [w.top.restrict(iv).push(A) for A, iv in zip(mats, system.pieces)]
            xb = mats[0] @ w.eval(0.0)
            from .stepcurves import concat_many

            wb = primitive(concat_many(pieces_b), xb)
            n2b = wb.norm()
            n1b = float(np.max(np.abs(xb))) + wb.top.sup_norm()
            ratio_ok = (n2b <= bound_const * max(n1, n2) + 1e-12) and (
                n1b <= bound_const * max(n1, n2) + 1e-12
            )
            # derivative operator consistency: global coordinate recovered per piece
            nabla = covariant_derivative(triv_a, FieldRep(w))
            parts = [nabla.restrict(iv) for iv in system.pieces]
            w1_back = represent_section(triv_a, parts)
            ts = np.linspace(0, 1, 65)
            recov = float(np.max(np.abs(w1_back.value_many(ts) - w.top.value_many(ts))))
            return ok_lower and ok_upper and ratio_ok, recov

        rows = _map_cases(case, count, seed)
        blocks = [np.block([[A, np.zeros((d, d))], [np.zeros((d, d)), np.eye(d)]])
                  for A in mats]
        q1_exact = all(np.array_equal(B[:d, :d], A) for B, A in zip(blocks, mats))
        checks.extend([
            check(f"norm-equivalence-{label}[cases={count}]", ANCHORS["normeq"],
                  all(r[0] for r in rows), measured=sum(r[0] for r in rows), bound=count),
            check_le(f"derivative-representation-recovery-{label}", ANCHORS["normeq"],
                     max(r[1] for r in rows), 1e-10),
            check(f"q1-block-compatibility-exact-{label}", ANCHORS["normeq"], q1_exact,
                  measured=int(q1_exact), bound=1),
            check_le(f"certified-kappa-finite-{label}", ANCHORS["normeq"], kappa, 1e6),
        ])
    return checks


def suite_deformation_independence(seed, count, tol):
    def case(rng_case):
        sp, src, dst, rep = sphere_transition_scenario(rng_case, speed=0.25)
        breaks = rep.pieces[0].breaks
        def rand_dir():
            return PathRep(src, rng_case.uniform(-1, 1, 2),
                           [StepCurve(breaks, rng_case.uniform(-1, 1, (len(breaks) - 1, 2)))])

        d1, d3 = rand_dir(), rand_dir()

        def rep_a(eps):
            out = rep_combine(rep, 1.0, d1, eps)
            return rep_combine(out, 1.0, d3, eps**3)

        proj_tol = 1e-5
        plan = transition_grid_plan(sp, src, dst, rep, tol=proj_tol)

        def slice_a(eps):
            return reconstruct(sp, src, rep_a(eps), validate=False)

        def slice_b(eps):
            rb = transition_rep(sp, src, dst, rep_a(eps), tol=proj_tol, grid_plan=plan)
            return reconstruct(sp, dst, rb, validate=False)

        h = 1e-2
        va = deformation_tangent(Deformation(slice_a, 1.0), h=h)
        vb = deformation_tangent(Deformation(slice_b, 1.0), h=h)
        path_a, path_b = slice_a(0.0), slice_b(0.0)
        triv_a = build_trivialization(path_a, "tangent")
        triv_b = build_trivialization(path_b, "tangent")
        compat = cross_system_compatibility(triv_a, triv_b)
        ts = np.linspace(0.0, 1.0, 17)
        worst = 0.0
        for t in ts:
            wa = va.phi.eval(t)
            wb = vb.phi.eval(t)
            worst = max(worst, float(np.max(np.abs(wb - compat(t) @ wa))))
        return worst

    rows = _map_cases(case, count, seed)
    worst = max(rows)
    return [check(f"deformation-chart-independence[cases={count}]", ANCHORS["deform"],
                  worst < 1e-6, measured=worst, bound=1e-6)]


SUITES = {
    "concat-isometry": (suite_concat_isometry, 10000),
    "restriction-contraction": (suite_restriction_contraction, 10000),
    "derivative-split": (suite_derivative_split, 10000),
    "integral-commutation": (suite_integral_commutation, 1000),
    "change-of-variables": (suite_change_of_variables, 1000),
    "atlas-invariants": (suite_atlas_invariants, 1000),
    "atlas-roundtrip": (suite_atlas_roundtrip, 1000),
    "transition-refinement": (suite_transition_refinement, 50),
    "transition-roundtrip": (suite_transition_roundtrip, 1),
    "transition-smoothness": (suite_transition_smoothness, 100),
    "openness": (suite_openness, 1000),
    "transport-groupoid": (suite_transport_groupoid, 10000),
    "norm-equivalence": (suite_norm_equivalence, 1000),
    "deformation-independence": (suite_deformation_independence, 100),
}

DEFAULT_TOLS = {
    "transition-roundtrip": 1e-7,
    "transition-refinement": 1e-7,
    "transition-smoothness": 1e-5,
    "deformation-independence": 1e-6,
}


def run_suite(name, seed=0, count=None, tol=None):
    """Run one registered suite; returns its Check list."""
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; known: {sorted(SUITES)}")
    fn, default_count = SUITES[name]
    n = default_count if count is None else int(count)
    t = DEFAULT_TOLS.get(name, 1e-9) if tol is None else float(tol)
    return fn(seed, n, t)


def run_all(seed=0, count=None, tol=None):
    checks = []
    for name in sorted(SUITES):
        checks.extend(run_suite(name, seed=seed, count=count, tol=tol))
    return checks
