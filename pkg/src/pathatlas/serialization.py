"""JSON encodings of the library's value types.

All schemas use fixed field order and IEEE doubles (Python's shortest
round-trip float repr).  Step curves appear as {"breaks": [...], "values":
[[...]]}; curves of order k as {"domain": [lo, hi], "k": k, "jet": [[...]],
"top": {...}, "mode": "regulated"|"ck"}; a ck-mode top stores one value row
per breakpoint (node values) instead of one per piece.
"""

from __future__ import annotations

import json

import numpy as np

from .curves import LinearCurve, RegCurve
from .errors import DomainError
from .intervals import Interval, Partition
from .manifolds import builtin
from .paths import PathChartSystem, PathRep
from .stepcurves import StepCurve
from .transport import FieldRep


def _floats(arr):
    return [float(x) for x in np.ravel(arr)]


def _matrix(arr):
    return [[float(x) for x in row] for row in np.atleast_2d(arr)]


def interval_to_obj(iv: Interval):
    return [iv.lo, iv.hi]


def interval_from_obj(obj) -> Interval:
    return Interval(obj[0], obj[1])


def partition_to_obj(p: Partition):
    return {"interval": interval_to_obj(p.interval), "knots": list(p.knots)}


def partition_from_obj(obj) -> Partition:
    return Partition(interval_from_obj(obj["interval"]), obj["knots"])


def step_to_obj(s: StepCurve):
    return {"breaks": _floats(s.breaks), "values": _matrix(s.values)}


def step_from_obj(obj) -> StepCurve:
    return StepCurve(obj["breaks"], obj["values"])


def curve_to_obj(c):
    """StepCurve or RegCurve to the common curve schema."""
    if isinstance(c, StepCurve):
        return {
            "domain": interval_to_obj(c.domain),
            "k": 0,
            "jet": [],
            "top": step_to_obj(c),
            "mode": "regulated",
        }
    if isinstance(c, LinearCurve):
        return {
            "domain": interval_to_obj(c.domain),
            "k": 0,
            "jet": [],
            "top": {"breaks": _floats(c.breaks), "values": _matrix(c.nodes)},
            "mode": "ck",
        }
    top = c.top
    if isinstance(top, StepCurve):
        top_obj = step_to_obj(top)
    else:
        top_obj = {"breaks": _floats(top.breaks), "values": _matrix(top.nodes)}
    return {
        "domain": interval_to_obj(c.domain),
        "k": c.order,
        "jet": _matrix(np.stack(c.jet)) if c.jet else [],
        "top": top_obj,
        "mode": c.mode,
    }


def curve_from_obj(obj):
    breaks = obj["top"]["breaks"]
    values = obj["top"]["values"]
    if obj.get("mode", "regulated") == "ck":
        top = LinearCurve(breaks, values)
    else:
        top = StepCurve(breaks, values)
    k = int(obj.get("k", 0))
    if k == 0:
        return top
    jet = [np.asarray(v, dtype=float) for v in obj["jet"]]
    if len(jet) != k:
        raise DomainError("jet length must equal the order")
    return RegCurve(tuple(jet), top)


def system_to_obj(s: PathChartSystem):
    return {"tau": list(s.knots), "charts": list(s.charts)}


def system_from_obj(obj) -> PathChartSystem:
    return PathChartSystem(obj["tau"], obj["charts"])


def rep_to_obj(r: PathRep):
    out = {
        "system": system_to_obj(r.system),
        "x": _floats(r.x),
        "pieces": [step_to_obj(p) for p in r.pieces],
    }
    if r.is_lift:
        out["fibers"] = [step_to_obj(u) for u in r.fibers]
    return out


def rep_from_obj(obj) -> PathRep:
    system = system_from_obj(obj["system"])
    fibers = obj.get("fibers")
    return PathRep(
        system,
        obj["x"],
        [step_from_obj(p) for p in obj["pieces"]],
        [step_from_obj(u) for u in fibers] if fibers is not None else None,
    )


def field_rep_to_obj(f: FieldRep):
    return {
        "phi": curve_to_obj(f.phi),
        "theta": step_to_obj(f.theta) if f.theta is not None else None,
    }


def field_rep_from_obj(obj) -> FieldRep:
    theta = obj.get("theta")
    return FieldRep(curve_from_obj(obj["phi"]),
                    step_from_obj(theta) if theta is not None else None)


def manifold_to_obj(m):
    return {"name": m.name, "params": m.params}


def manifold_from_obj(obj):
    return builtin(obj["name"], obj.get("params", {}))


def path_to_obj(path):
    return {
        "manifold": manifold_to_obj(path.manifold),
        "system": system_to_obj(path.system),
        "pieces": [curve_to_obj(p) for p in path.pieces],
    }


def dumps(obj) -> str:
    return json.dumps(obj, allow_nan=False, separators=(",", ":"))


def loads(text: str):
    return json.loads(text)
