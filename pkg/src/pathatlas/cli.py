"""Command-line front end: invariant suites, scenario runs, JSONL reports.

Exit codes: 0 all checks pass, 1 invariant failure, 2 usage error,
3 domain or cover violation.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import serialization as ser
from .errors import ChartError, CoverageError, DomainError, NotInteriorError, PathAtlasError
from .manifolds import BundleAtlas, builtin, CatalogError
from .paths import openness_margin, reconstruct, reconstruct_lift, rep_distance, transition_rep
from .report import Check, all_pass, check, check_le, render_report
from .suites import SUITES, run_all, run_suite
from .transport import build_trivialization, transport

USAGE_EXIT = 2
DOMAIN_EXIT = 3


def _emit(text, out_path):
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _structured_error(exc, out_path):
    obj = {"error": type(exc).__name__, "message": str(exc)}
    t = getattr(exc, "time", None)
    if t is not None:
        obj["time"] = float(t)
    _emit(json.dumps(obj, separators=(",", ":")) + "\n", out_path)


def _load_scenario(path):
    with open(path) as fh:
        return json.load(fh)


def _atlas_from_scenario(sc):
    if "bundle" in sc:
        return builtin(sc["bundle"]["name"], sc["bundle"].get("params", {}))
    m = sc["manifold"]
    return builtin(m["name"], m.get("params", {}))


def cmd_validate(args):
    names = sorted(SUITES) if args.suite == "all" else [args.suite]
    for name in names:
        if name not in SUITES:
            sys.stderr.write(f"unknown suite {name!r}; known: {', '.join(sorted(SUITES))}\n")
            return USAGE_EXIT
    checks = []
    for name in names:
        checks.extend(run_suite(name, seed=args.seed, count=args.count, tol=args.tol))
    _emit(render_report(checks, timings=args.timings), args.out)
    return 0 if all_pass(checks) else 1


def cmd_transition(args):
    sc = _load_scenario(args.scenario)
    atlas = _atlas_from_scenario(sc)
    src = ser.system_from_obj(sc["src_system"])
    dst = ser.system_from_obj(sc["dst_system"])
    rep = ser.rep_from_obj(sc["rep"])
    tol = float(sc.get("tol", args.tol or 1e-7))
    out = transition_rep(atlas, src, dst, rep, tol=tol)
    back = transition_rep(atlas, dst, src, out, tol=tol)
    err = rep_distance(back, rep)
    refinement = sorted(set(src.knots) | set(dst.knots))
    checks = [
        check_le("transition-round-trip-error", "chart-system-transition", err, 2e1 * tol),
    ]
    lines = render_report(checks, timings=args.timings)
    result = {
        "result": {
            "rep": ser.rep_to_obj(out),
            "round_trip_error": err,
            "refinement": refinement,
        }
    }
    _emit(json.dumps(result, separators=(",", ":")) + "\n" + lines, args.out)
    return 0 if all_pass(checks) else 1


def cmd_transport(args):
    sc = _load_scenario(args.scenario)
    atlas = _atlas_from_scenario(sc)
    if not isinstance(atlas, BundleAtlas):
        sys.stderr.write("transport scenarios need a bundle\n")
        return USAGE_EXIT
    system = ser.system_from_obj(sc["system"])
    rep = ser.rep_from_obj(sc["rep"])
    path = reconstruct(atlas.base, system, rep, validate=True)
    triv = build_trivialization(path, atlas)
    queries = sc.get("queries") or [[0.0, 1.0]]
    mats = [transport(triv, float(s), float(t)) for s, t in queries]
    rng = np.random.default_rng(int(sc.get("seed", 0)))
    ok = True
    for _ in range(200):
        r, s, t = rng.uniform(0, 1, 3)
        ok = ok and np.array_equal(
            transport(triv, t, r) @ transport(triv, s, t), transport(triv, s, r)
        )
    checks = [check("transport-groupoid-sample", "transport-groupoid-holonomy", ok,
                    measured=int(ok), bound=1)]
    result = {
        "result": {
            "frames": [m.tolist() for m in triv.frames],
            "transports": [m.tolist() for m in mats],
            "holonomy": transport(triv, 0.0, 1.0).tolist(),
        }
    }
    _emit(json.dumps(result, separators=(",", ":")) + "\n"
          + render_report(checks, timings=args.timings), args.out)
    return 0 if all_pass(checks) else 1


def cmd_margin(args):
    sc = _load_scenario(args.scenario)
    atlas = _atlas_from_scenario(sc)
    manifold = atlas.base if isinstance(atlas, BundleAtlas) else atlas
    system = ser.system_from_obj(sc["system"])
    rep = ser.rep_from_obj(sc["rep"])
    path = reconstruct(manifold, system, rep, validate=True)
    eta = openness_margin(path)
    checks = [check("openness-margin-positive", "coordinate-range-openness", eta > 0,
                    measured=eta, bound=0.0)]
    result = {"result": {"eta": eta}}
    _emit(json.dumps(result, separators=(",", ":")) + "\n"
          + render_report(checks, timings=args.timings), args.out)
    return 0 if all_pass(checks) else 1


def cmd_reconstruct(args):
    sc = _load_scenario(args.scenario)
    atlas = _atlas_from_scenario(sc)
    system = ser.system_from_obj(sc["system"])
    rep = ser.rep_from_obj(sc["rep"])
    if rep.is_lift:
        if not isinstance(atlas, BundleAtlas):
            sys.stderr.write("lift reps need a bundle scenario\n")
            return USAGE_EXIT
        lift = reconstruct_lift(atlas, system, rep, validate=True)
        path = lift.base
    else:
        manifold = atlas.base if isinstance(atlas, BundleAtlas) else atlas
        path = reconstruct(manifold, system, rep, validate=True)
    from .paths import chart_map, junction_defects

    rep_back = chart_map(path)
    exact = rep_distance(rep_back, rep.drop_fibers() if rep.is_lift else rep) == 0.0
    defects = junction_defects(path)
    checks = [
        check("coordinate-round-trip-exact", "coordinate-reconstruction-inverse",
              exact, measured=int(exact), bound=1),
        check_le("junction-defect", "coordinate-reconstruction-inverse",
                 float(np.max(defects)) if len(defects) else 0.0, 1e-10),
    ]
    result = {"result": ser.path_to_obj(path)}
    _emit(json.dumps(result, separators=(",", ":")) + "\n"
          + render_report(checks, timings=args.timings), args.out)
    return 0 if all_pass(checks) else 1


def build_parser():
    p = argparse.ArgumentParser(
        prog="pathatlas",
        description="Step-curve calculus and path-space atlas toolkit",
    )
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="run a registered invariant suite")
    v.add_argument("--suite", default="all",
                   help="suite name or 'all' (see --list)")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--count", type=int, default=None,
                   help="cases per suite (default: suite-specific)")
    v.add_argument("--tol", type=float, default=None)
    v.add_argument("--out", default=None, help="write the JSONL report here")
    v.add_argument("--timings", action="store_true")
    v.set_defaults(fn=cmd_validate)

    for name, fn, needs in [
        ("transition", cmd_transition, "chart-system change scenario"),
        ("transport", cmd_transport, "trivialization/transport scenario"),
        ("margin", cmd_margin, "openness-margin scenario"),
        ("reconstruct", cmd_reconstruct, "rep reconstruction scenario"),
    ]:
        q = sub.add_parser(name, help=needs)
        q.add_argument("--scenario", required=True, help="scenario JSON file")
        q.add_argument("--tol", type=float, default=None)
        q.add_argument("--out", default=None)
        q.add_argument("--timings", action="store_true")
        q.set_defaults(fn=fn)

    ls = sub.add_parser("suites", help="list registered suites")
    ls.set_defaults(fn=lambda args: (sys.stdout.write("\n".join(sorted(SUITES)) + "\n"), 0)[1])
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (CoverageError, DomainError, ChartError, NotInteriorError, CatalogError) as exc:
        _structured_error(exc, getattr(args, "out", None))
        return DOMAIN_EXIT
    except FileNotFoundError as exc:
        sys.stderr.write(f"{exc}\n")
        return USAGE_EXIT
    except PathAtlasError as exc:
        _structured_error(exc, getattr(args, "out", None))
        return 1


if __name__ == "__main__":
    sys.exit(main())
