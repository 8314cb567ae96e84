"""Trivializations along paths, transport operators and field representations.

A trivialization along a path glues the per-chart frames through the bundle
cocycle at the junctions: the frame of the first piece is the identity and
each junction multiplies by the inverse cocycle value there.  A section whose
chart coordinates are continuous across a junction then has a continuous
global coordinate.  Transport between two times is the frame-change operator;
around a closed loop it measures holonomy (-1 for the moebius line bundle).

Vector fields along a path (or along a lift) are represented by the glued
global coordinate curves; the derivative operator induced by the transport
acts as the top derivative in the global coordinate, mapped back per piece.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curves import RegCurve, primitive
from .errors import ChartError, DimensionError, DomainError, OrderError
from .intervals import Interval
from .manifolds import BundleAtlas, Manifold
from .paths import (
    BundleLift,
    ManifoldPath,
    PathChartSystem,
    PathRep,
    chart_map,
    lift_chart_map,
    rep_combine,
)
from .smoothmaps import operator_norm_inf
from .stepcurves import StepCurve, concat_many


def _tangent_as_bundle(manifold: Manifold) -> BundleAtlas:
    from .manifolds import MatrixField

    cocycles = {
        (i, j): MatrixField.from_jacobian(manifold.transition(i, j))
        for i in manifold.chart_ids
        for j in manifold.chart_ids
        if i != j and (i, j) in manifold._transitions
    }
    return BundleAtlas(manifold, manifold.dim, cocycles, name="tangent-bundle")


@dataclass(frozen=True)
class PathTrivialization:
    """Per-piece frames C_i gluing the chart trivializations along a path."""

    path: ManifoldPath
    bundle: BundleAtlas
    frames: tuple        # C_i
    inverse_frames: tuple

    @property
    def rank(self) -> int:
        return self.bundle.rank

    def frame_at(self, t: float) -> np.ndarray:
        return self.frames[self.path.system.piece_index(t)]

    def restrict_pieces(self, start: int, stop: int) -> "PathTrivialization":
        """The trivialization induced on a consecutive run of pieces.

        Frames are inherited verbatim, matching the restriction behaviour of
        the underlying gluing.
        """
        system = self.path.system
        knots = system.knots[start : stop + 1]
        lo, hi = knots[0], knots[-1]
        sub_system = _SubSystem(knots, system.charts[start:stop])
        sub_path = _SubPath(self.path, sub_system, start, stop)
        return PathTrivialization(sub_path, self.bundle,
                                  self.frames[start:stop],
                                  self.inverse_frames[start:stop])


class _SubSystem:
    """Partition data of a consecutive run of pieces (no [0,1] normalization)."""

    def __init__(self, knots, charts):
        self.knots = tuple(knots)
        self.charts = tuple(charts)

    @property
    def n_pieces(self):
        return len(self.charts)

    @property
    def pieces(self):
        return [Interval(a, b) for a, b in zip(self.knots, self.knots[1:])]

    def piece_index(self, t):
        if not self.knots[0] <= t <= self.knots[-1]:
            raise DomainError(f"t={t} outside the restricted run")
        if t == self.knots[-1]:
            return self.n_pieces - 1
        return int(np.searchsorted(np.asarray(self.knots), t, side="right")) - 1


class _SubPath:
    def __init__(self, parent, system, start, stop):
        self.manifold = parent.manifold
        self.system = system
        self.pieces = tuple(
            parent.pieces[i].restrict(iv)
            for i, iv in zip(range(start, stop), system.pieces)
        )


def build_trivialization(path: ManifoldPath, bundle, initial_frame=None) -> PathTrivialization:
    """Glue per-chart frames along the path: C_1 = Id, C_{i+1} = C_i g^{-1}.

    ``bundle`` is a BundleAtlas over the path's manifold, or the string
    "tangent" for the tangent frames used by vector-field representations.
    Any invertible ``initial_frame`` produces a compatible trivialization;
    the identity is the default.
    """
    if bundle == "tangent":
        bundle = _tangent_as_bundle(path.manifold)
    if bundle.base is not path.manifold and bundle.base.name != path.manifold.name:
        raise DomainError("bundle base and path manifold differ")
    d = bundle.rank
    if initial_frame is None:
        frames = [np.eye(d)]
        inv_frames = [np.eye(d)]
    else:
        F = np.asarray(initial_frame, dtype=float)
        if F.shape != (d, d):
            raise DimensionError("initial frame must be rank x rank")
        frames = [F]
        inv_frames = [np.linalg.inv(F)]
    system = path.system
    for i in range(system.n_pieces - 1):
        tau = system.knots[i + 1]
        x = path.pieces[i].eval(tau)
        field = bundle.cocycle(system.charts[i], system.charts[i + 1])
        if not field.contains(x):
            raise ChartError(f"cocycle undefined at junction t={tau}")
        g = field(x)
        frames.append(frames[-1] @ np.linalg.inv(g))
        inv_frames.append(g @ inv_frames[-1])
    return PathTrivialization(path, bundle, tuple(frames), tuple(inv_frames))


def represent_section(triv: PathTrivialization, fiber_pieces) -> StepCurve:
    """Global coordinates of a section given by per-piece fiber step curves."""
    fiber_pieces = list(fiber_pieces)
    system = triv.path.system
    if len(fiber_pieces) != system.n_pieces:
        raise DimensionError("one fiber piece per system piece")
    parts = []
    for C, u, iv in zip(triv.frames, fiber_pieces, system.pieces):
        if u.domain != iv:
            raise DomainError("fiber piece domains must match the partition")
        parts.append(u.push(C))
    return concat_many(parts)


def section_from_global(triv: PathTrivialization, w: StepCurve):
    """Inverse of :func:`represent_section`: per-piece chart coordinates."""
    system = triv.path.system
    return [
        w.restrict(iv).push(Cinv)
        for Cinv, iv in zip(triv.inverse_frames, system.pieces)
    ]


@dataclass(frozen=True)
class FieldRep:
    """Glued coordinates of a vector field along a path (and lift).

    ``phi`` is the order-1 global coordinate curve of the base part; ``theta``
    the step curve of the fiber part (None for fields along a bare path).
    """

    phi: RegCurve
    theta: StepCurve = None

    def __post_init__(self):
        if self.phi.order != 1:
            raise OrderError("field base parts are order-1 curves")

    @property
    def has_fiber(self) -> bool:
        return self.theta is not None


def represent_field(triv_tangent: PathTrivialization, components,
                    triv_bundle: PathTrivialization = None, fiber_components=None) -> FieldRep:
    """Glue per-piece chart components of a field into global coordinates.

    ``components`` are order-1 curves (one per piece, in that piece's chart);
    the tangent frames glue them into a single order-1 curve on [0, 1].  For
    fields along a lift, fiber step components are glued by the bundle frames.
    """
    system = triv_tangent.path.system
    components = list(components)
    if len(components) != system.n_pieces:
        raise DimensionError("one component curve per system piece")
    x0 = components[0].eval(system.knots[0])
    tops = []
    for D, comp, iv in zip(triv_tangent.frames, components, system.pieces):
        if comp.domain != iv or comp.order != 1:
            raise DomainError("components must be order-1 curves on the partition pieces")
        tops.append(comp.top.push(D))
    phi = primitive(concat_many(tops), x0)
    theta = None
    if fiber_components is not None:
        theta = represent_section(triv_bundle or triv_tangent, fiber_components)
    return FieldRep(phi, theta)


def field_components(triv_tangent: PathTrivialization, rep: FieldRep):
    """Inverse of :func:`represent_field`: per-piece chart components."""
    system = triv_tangent.path.system
    out = []
    for i, (Dinv, iv) in enumerate(zip(triv_tangent.inverse_frames, system.pieces)):
        w_piece = rep.phi.restrict(iv)
        out.append(w_piece.push(Dinv))
    return out


def transport(triv: PathTrivialization, s: float, t: float) -> np.ndarray:
    """The frame-change operator from time s to time t.

    Depends only on the pieces containing s and t; satisfies the groupoid
    laws, and equals the ordered product of the junction cocycle values
    between the two pieces.
    """
    system = triv.path.system
    a = system.piece_index(s)
    b = system.piece_index(t)
    return triv.inverse_frames[b] @ triv.frames[a]


def holonomy(triv: PathTrivialization, closure_cocycle=True) -> np.ndarray:
    """Transport across the whole domain: the loop holonomy for closed paths.

    For a closed path whose endpoint identification carries a trivial cocycle
    value, this is the full chain of junction factors.
    """
    lo = triv.path.system.knots[0]
    hi = triv.path.system.knots[-1]
    return transport(triv, lo, hi)


def covariant_derivative(triv: PathTrivialization, field: FieldRep) -> StepCurve:
    """The induced derivative of a field: global top derivative, per piece
    mapped back through the frames.

    Parallel fields (constant global coordinate) map to the zero curve.
    """
    w = field.phi
    system = triv.path.system
    parts = []
    for Cinv, iv in zip(triv.inverse_frames, system.pieces):
        parts.append(w.top.restrict(iv).push(Cinv))
    return concat_many(parts)


def compatibility_automorphisms(triv_a: PathTrivialization, triv_b: PathTrivialization):
    """Per-piece matrices A_i with rep_b = A_i rep_a, plus norm certificates.

    Both trivializations must glue frames over the same path and bundle; the
    returned bound kappa certifies  1/kappa <= |X|_b / |X|_a <= kappa.
    """
    if triv_a.path.system != triv_b.path.system:
        raise DomainError("trivializations glue over different systems")
    mats = tuple(
        Cb @ Ca_inv for Ca_inv, Cb in zip(triv_a.inverse_frames, triv_b.frames)
    )
    kappa = max(
        max(operator_norm_inf(A) for A in mats),
        max(operator_norm_inf(np.linalg.inv(A)) for A in mats),
    )
    return mats, float(kappa)


@dataclass(frozen=True)
class Deformation:
    """A one-parameter family of paths or lifts sharing one chart system."""

    evaluate: object     # eps -> ManifoldPath | BundleLift
    delta: float

    def __call__(self, eps):
        if abs(eps) > self.delta:
            raise DomainError(f"deformation parameter {eps} exceeds {self.delta}")
        return self.evaluate(eps)


def _rep_of(obj) -> PathRep:
    if isinstance(obj, BundleLift):
        return lift_chart_map(obj)
    return chart_map(obj)


def deformation_tangent(deformation: Deformation, h=1e-3) -> FieldRep:
    """The field of a deformation: Richardson-combined central differences of
    the chart coordinates, glued into global field coordinates.

    Exact (up to roundoff) for families affine in the parameter.
    """
    base_obj = deformation(0.0)
    if isinstance(base_obj, BundleLift):
        base_path, bundle = base_obj.base, base_obj.bundle
    else:
        base_path, bundle = base_obj, None
    system = base_path.system

    reps = {}
    for eps in (h, -h, h / 2, -h / 2):
        obj = deformation(eps)
        path = obj.base if isinstance(obj, BundleLift) else obj
        if path.system != system:
            raise DomainError("deformation slices must share one chart system")
        reps[eps] = _rep_of(obj)

    d1 = rep_combine(reps[h], 0.5 / h, reps[-h], -0.5 / h)
    d2 = rep_combine(reps[h / 2], 1.0 / h, reps[-h / 2], -1.0 / h)
    v = rep_combine(d2, 4.0 / 3.0, d1, -1.0 / 3.0)
    return rep_tangent_to_field(base_path, v, bundle)


def rep_tangent_to_field(base_path: ManifoldPath, v: PathRep, bundle=None) -> FieldRep:
    """Interpret a rep-space tangent vector as a field along the base path.

    The per-piece chart components are the linearized reconstruction of the
    rep tangent (junction values transported by the transition jacobians);
    the tangent frames then glue them into the global coordinate curve.
    """
    manifold = base_path.manifold
    system = base_path.system
    triv_t = build_trivialization(base_path, "tangent")
    components = []
    x = v.x
    for i, dy in enumerate(v.pieces):
        if i > 0:
            tau = system.knots[i]
            J = manifold.tangent_cocycle(system.charts[i - 1], system.charts[i],
                                         base_path.pieces[i - 1].eval(tau))
            x = J @ components[-1].eval(tau)
        components.append(primitive(dy, x))
    field = represent_field(triv_t, components)
    theta = None
    if v.is_lift:
        triv_b = build_trivialization(base_path, bundle)
        theta = represent_section(triv_b, list(v.fibers))
    return FieldRep(field.phi, theta)


def cross_system_compatibility(triv_a: PathTrivialization, triv_b: PathTrivialization):
    """Pointwise frame change between trivializations over two chart systems.

    Returns a callable t -> matrix A(t) with  w_b(t) = A(t) w_a(t)  for the
    glued coordinates of one field represented in both systems.  The paths
    must describe the same underlying curve.
    """
    path_a, path_b = triv_a.path, triv_b.path
    manifold = path_a.manifold

    def at(t: float) -> np.ndarray:
        ia = path_a.system.piece_index(t)
        ib = path_b.system.piece_index(t)
        ca = path_a.system.charts[ia]
        cb = path_b.system.charts[ib]
        x = path_a.pieces[ia].eval(t)
        if ca == cb:
            J = np.eye(manifold.dim)
        else:
            J = manifold.tangent_cocycle(ca, cb, x)
        return triv_b.frames[ib] @ J @ triv_a.inverse_frames[ia]

    return at
