"""Machine-readable check reports: JSON lines, one check per line.

Reports are deterministic byte for byte for a fixed seed: no timestamps, no
timings unless explicitly requested, canonical key order, shortest round-trip
float formatting.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

PASS = "pass"
FAIL = "fail"
INDETERMINATE = "indeterminate"


@dataclass
class Check:
    """One verified property: name, property anchor, verdict and numbers."""

    name: str
    anchor: str
    status: str
    measured: object = None
    bound: object = None
    runtime_ms: float = None

    @property
    def ok(self) -> bool:
        return self.status == PASS


def check(name, anchor, ok, measured=None, bound=None) -> Check:
    return Check(name, anchor, PASS if ok else FAIL, measured, bound)


def check_le(name, anchor, measured, bound) -> Check:
    return Check(name, anchor, PASS if measured <= bound else FAIL,
                 float(measured), float(bound))


def _to_obj(c: Check, timings=False):
    obj = {
        "name": c.name,
        "anchor": c.anchor,
        "status": c.status,
        "measured": c.measured,
        "bound": c.bound,
    }
    if timings and c.runtime_ms is not None:
        obj["runtime_ms"] = c.runtime_ms
    return obj


def render_report(checks, timings=False) -> str:
    """One JSON object per line plus a final summary line."""
    lines = [json.dumps(_to_obj(c, timings), allow_nan=False, separators=(",", ":"))
             for c in checks]
    n_fail = sum(1 for c in checks if c.status == FAIL)
    n_ind = sum(1 for c in checks if c.status == INDETERMINATE)
    summary = {
        "summary": True,
        "checks": len(checks),
        "failures": n_fail,
        "indeterminate": n_ind,
    }
    lines.append(json.dumps(summary, separators=(",", ":")))
    return "\n".join(lines) + "\n"


def all_pass(checks) -> bool:
    return all(c.status != FAIL for c in checks)
