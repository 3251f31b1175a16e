from __future__ import annotations

import json
import re

import pytest

from ends_universal.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_gen_blowup_dot(capsys):
    code, out, _ = run(capsys, "gen", "blowup", "--profile", "gl", "--depth", "2", "--format", "dot")
    assert code == 0
    vertex_lines = [ln for ln in out.splitlines() if re.match(r'^\s*"[^"]*";$', ln)]
    assert len(vertex_lines) == 27


def test_verify_thm42_exit_zero(capsys, tmp_path):
    out_file = tmp_path / "r.json"
    code, _, _ = run(capsys, "verify", "--suite", "thm42", "--system", "hawaiian:8", "--out", str(out_file))
    assert code == 0
    assert json.loads(out_file.read_text())["status"] == "pass"


def test_embed_ray_json(capsys):
    code, out, _ = run(capsys, "embed", "--graph", "ray", "--depth", "1", "--emit", "json")
    data = json.loads(out)
    assert code == 0 and data["h"] == [1, 2]
    assert data["vertex_map"] == {"0": "0:0", "1": "00:0"}


def test_unknown_names_exit_two(capsys):
    code, _, err = run(capsys, "embed", "--graph", "nope", "--depth", "1")
    assert code == 2 and "binary_tree" in err
    code, _, err = run(capsys, "embed-gl", "--system", "nope")
    assert code == 2 and "hawaiian" in err
    code, _, err = run(capsys, "verify", "--suite", "nope", "--graph", "ray")
    assert code == 2 and "thm32" in err


def test_usage_errors(capsys):
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "embed", "--graph", "ray", "--depth", "-1")[0] == 2
    assert run(capsys, "truncate", "--stage", "1")[0] == 2


def test_verify_failure_exit_one(capsys, monkeypatch):
    from ends_universal import verify
    from ends_universal.report import Report

    monkeypatch.setitem(verify.GRAPH_SUITES, "thm32", lambda g, n: Report("x", ["broken"]))
    assert run(capsys, "verify", "--suite", "thm32", "--graph", "ray")[0] == 1


@pytest.mark.parametrize(
    "argv",
    [
        ["gen", "graph", "--name", "quadrant_grid", "--depth", "2"],
        ["gen", "system", "--name", "sierpinski:2"],
        ["truncate", "--graph", "binary_tree", "--stage", "2", "--format", "dot"],
        ["truncate", "--profile", "lf", "--stage", "1"],
        ["embed", "--graph", "binary_tree", "--depth", "3", "--emit", "dot"],
        ["embed", "--graph", "star", "--depth", "1", "--target", "stacked"],
        ["embed-gl", "--system", "hawaiian:2", "--emit", "dot"],
        ["export", "--system", "theta", "--stage", "3"],
        ["verify", "--suite", "star", "--profile", "gl", "--depth", "3"],
    ],
)
def test_commands_deterministic(capsys, argv):
    code, first, _ = run(capsys, *argv)
    assert code == 0 and first
    assert run(capsys, *argv)[1] == first


def test_truncate_json_has_dummies(capsys):
    _, out, _ = run(capsys, "truncate", "--profile", "lf", "--stage", "1")
    data = json.loads(out)
    assert len(data["dummies"]) == 2 and len(data["edges"]) == 4
