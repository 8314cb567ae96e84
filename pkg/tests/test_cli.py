import json

import numpy as np
import pytest

from pathatlas.cli import main


def read_lines(path):
    with open(path) as fh:
        return [json.loads(line) for line in fh if line.strip()]


@pytest.fixture
def sphere_transition_scenario(tmp_path):
    scen = {
        "manifold": {"name": "sphere-stereo", "params": {}},
        "src_system": {"tau": [0.0, 1.0], "charts": ["n"]},
        "dst_system": {"tau": [0.0, 0.5, 1.0], "charts": ["s", "n"]},
        "rep": {
            "system": {"tau": [0.0, 1.0], "charts": ["n"]},
            "x": [1.2, 0.3],
            "pieces": [{"breaks": [0.0, 0.5, 1.0],
                        "values": [[0.25, 0.1], [-0.1, 0.2]]}],
        },
        "tol": 1e-5,
    }
    p = tmp_path / "transition.json"
    p.write_text(json.dumps(scen))
    return str(p)


class TestValidate:
    def test_suite_passes_exit_zero(self, tmp_path):
        out = tmp_path / "report.jsonl"
        code = main(["validate", "--suite", "concat-isometry", "--seed", "7",
                     "--count", "200", "--out", str(out)])
        assert code == 0
        lines = read_lines(out)
        assert lines[-1]["summary"] and lines[-1]["failures"] == 0
        assert all("runtime_ms" not in l for l in lines)

    def test_unknown_suite_usage_error(self, capsys):
        assert main(["validate", "--suite", "not-a-suite"]) == 2

    def test_determinism_byte_identical(self, tmp_path):
        a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        args = ["validate", "--suite", "derivative-split", "--seed", "11",
                "--count", "150"]
        assert main(args + ["--out", str(a)]) == 0
        assert main(args + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_different_seed_changes_payload(self, tmp_path):
        # the split-bound slack varies continuously with the corpus
        a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        main(["validate", "--suite", "derivative-split", "--seed", "1",
              "--count", "100", "--out", str(a)])
        main(["validate", "--suite", "derivative-split", "--seed", "2",
              "--count", "100", "--out", str(b)])
        assert a.read_bytes() != b.read_bytes()


class TestScenarios:
    def test_transition_roundtrip_report(self, sphere_transition_scenario, tmp_path):
        out = tmp_path / "out.jsonl"
        code = main(["transition", "--scenario", sphere_transition_scenario,
                     "--out", str(out)])
        assert code == 0
        lines = read_lines(out)
        result = lines[0]["result"]
        assert result["round_trip_error"] < 1e-4
        assert result["refinement"] == [0.0, 0.5, 1.0]
        assert result["rep"]["system"]["charts"] == ["s", "n"]

    def test_cover_violation_exit_three(self, tmp_path):
        scen = {
            "manifold": {"name": "sphere-stereo", "params": {}},
            "src_system": {"tau": [0.0, 1.0], "charts": ["n"]},
            "dst_system": {"tau": [0.0, 1.0], "charts": ["s"]},
            "rep": {
                "system": {"tau": [0.0, 1.0], "charts": ["n"]},
                "x": [-0.5, 0.0],
                "pieces": [{"breaks": [0.0, 1.0], "values": [[1.0, 0.0]]}],
            },
            "tol": 1e-5,
        }
        p = tmp_path / "bad.json"
        p.write_text(json.dumps(scen))
        out = tmp_path / "out.jsonl"
        code = main(["transition", "--scenario", str(p), "--out", str(out)])
        assert code == 3
        err = read_lines(out)[0]
        assert err["error"] == "CoverageError" and "time" in err

    def test_moebius_transport_holonomy(self, tmp_path):
        scen = {
            "bundle": {"name": "moebius-line-bundle", "params": {}},
            "system": {"tau": [0.0, 0.5, 1.0], "charts": ["a", "b"]},
            "rep": {
                "system": {"tau": [0.0, 0.5, 1.0], "charts": ["a", "b"]},
                "x": [-1.5],
                "pieces": [
                    {"breaks": [0.0, 0.5], "values": [[6.283185307179586]]},
                    {"breaks": [0.5, 1.0], "values": [[6.283185307179586]]},
                ],
            },
            "queries": [[0.0, 1.0]],
        }
        p = tmp_path / "moebius.json"
        p.write_text(json.dumps(scen))
        out = tmp_path / "out.jsonl"
        assert main(["transport", "--scenario", str(p), "--out", str(out)]) == 0
        result = read_lines(out)[0]["result"]
        assert result["holonomy"] == [[-1.0]]

    def test_margin_scenario(self, tmp_path):
        scen = {
            "manifold": {"name": "euclidean", "params": {"m": 2, "radius": 2.0}},
            "system": {"tau": [0.0, 1.0], "charts": ["0"]},
            "rep": {
                "system": {"tau": [0.0, 1.0], "charts": ["0"]},
                "x": [0.5, 0.5],
                "pieces": [{"breaks": [0.0, 0.5, 1.0],
                            "values": [[0.5, 0.0], [0.0, -0.5]]}],
            },
        }
        p = tmp_path / "margin.json"
        p.write_text(json.dumps(scen))
        out = tmp_path / "out.jsonl"
        assert main(["margin", "--scenario", str(p), "--out", str(out)]) == 0
        assert read_lines(out)[0]["result"]["eta"] == 0.625

    def test_reconstruct_echoes_constant_path(self, tmp_path):
        scen = {
            "manifold": {"name": "sphere-stereo", "params": {}},
            "system": {"tau": [0.0, 0.5, 1.0], "charts": ["n", "s"]},
            "rep": {
                "system": {"tau": [0.0, 0.5, 1.0], "charts": ["n", "s"]},
                "x": [1.1, 0.2],
                "pieces": [
                    {"breaks": [0.0, 0.5], "values": [[0.0, 0.0]]},
                    {"breaks": [0.5, 1.0], "values": [[0.0, 0.0]]},
                ],
            },
        }
        p = tmp_path / "rec.json"
        p.write_text(json.dumps(scen))
        out = tmp_path / "out.jsonl"
        assert main(["reconstruct", "--scenario", str(p), "--out", str(out)]) == 0
        lines = read_lines(out)
        pieces = lines[0]["result"]["pieces"]
        assert all(np.max(np.abs(np.array(pc["top"]["values"]))) == 0.0
                   for pc in pieces)

    def test_missing_scenario_file(self):
        assert main(["margin", "--scenario", "/nonexistent.json"]) == 2


def test_suites_listing(capsys):
    assert main(["suites"]) == 0
    names = capsys.readouterr().out.split()
    assert "concat-isometry" in names and "transport-groupoid" in names
