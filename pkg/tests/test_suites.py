import os

import pytest

from pathatlas.report import all_pass, render_report
from pathatlas.suites import SUITES, run_suite, sample_valid_rep

SMALL = {
    "concat-isometry": 200,
    "restriction-contraction": 200,
    "derivative-split": 200,
    "integral-commutation": 100,
    "change-of-variables": 60,
    "atlas-invariants": 100,
    "atlas-roundtrip": 40,
    "transition-refinement": 5,
    "transition-roundtrip": 1,
    "transition-smoothness": 5,
    "openness": 30,
    "transport-groupoid": 300,
    "norm-equivalence": 50,
    "deformation-independence": 4,
}


@pytest.mark.parametrize("name", sorted(SUITES))
def test_suite_passes_smoke(name):
    tol = 1e-5 if name.startswith("transition") else None
    checks = run_suite(name, seed=3, count=SMALL[name], tol=tol)
    assert all_pass(checks), [c for c in checks if c.status != "pass"]


def test_registry_matches_small_map():
    assert set(SMALL) == set(SUITES)


def test_reports_are_deterministic():
    for name in ["concat-isometry", "openness", "norm-equivalence"]:
        a = render_report(run_suite(name, seed=5, count=20))
        b = render_report(run_suite(name, seed=5, count=20))
        assert a == b


def test_worker_fanout_is_order_canonical(monkeypatch):
    base = render_report(run_suite("derivative-split", seed=9, count=64))
    monkeypatch.setenv("PATHATLAS_WORKERS", "4")
    fanned = render_report(run_suite("derivative-split", seed=9, count=64))
    assert base == fanned


@pytest.mark.parametrize("name", ["euclidean", "circle-two-arcs",
                                  "sphere-stereo", "torus"])
def test_rep_generators_yield_valid_paths(name, rng):
    from pathatlas.paths import reconstruct, validate_path

    for _ in range(10):
        manifold, system, rep = sample_valid_rep(name, rng)
        path = reconstruct(manifold, system, rep, validate=True)
        validate_path(path)
