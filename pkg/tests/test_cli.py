from __future__ import annotations

import json

import pytest

from annular_khr import cli
from annular_khr.cli import Report, corpus_names, corpus_path, run
from annular_khr.diagram import load_atd


def _json(capsys, argv) -> tuple[int, dict]:
    code = run(["--format", "json", *argv])
    return code, json.loads(capsys.readouterr().out)


def test_s3_text(capsys):
    assert run(["s3", "--closure", "under", "clasp"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "F[0,2] + F[2,6] + F[3,8]"


def test_s3_over_is_the_unknot(capsys):
    code, doc = _json(capsys, ["s3", "--closure", "over", "clasp"])
    assert code == 0
    assert doc["results"]["summary"] == "F[0,0]"


def test_s2s1_collapse(capsys):
    code, doc = _json(capsys, ["s2s1", "--collapse-z2", "p2_planar"])
    assert code == 0
    assert doc["results"]["khr"]["dims"] == [[0, -1, 2]]
    assert doc["results"]["khr"]["collapsed"] == [[0, 1, 2]]


def test_json_is_deterministic(capsys):
    argv = ["s2s1", "--collapse-z2", "clasp_circle"]
    run(["--format", "json", *argv])
    first = capsys.readouterr().out
    run(["--format", "json", *argv])
    assert capsys.readouterr().out == first
    assert json.loads(first)["timings"] == {}


def test_timings_are_opt_in(capsys):
    _, doc = _json(capsys, ["--timings", "s3", "--closure", "over", "clasp"])
    assert doc["timings"]


def test_format_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("KHR_FORMAT", "json")
    assert run(["cube", "clasp"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["command"] == "cube" and doc["failures"] == []


@pytest.mark.parametrize("argv", [["s3", "--closure", "over", "no_such_diagram"],
                                  ["s3", "clasp"],
                                  ["s3", "--closure", "sideways", "clasp"],
                                  ["corpus", "show", "nothing"]])
def test_input_errors_exit_two(capsys, argv):
    assert run(argv) == 2


def test_failed_check_exits_one(capsys, monkeypatch):
    monkeypatch.setattr(cli, "s3_report", lambda arg, closure: Report("s3", failures=["forced"]))
    assert run(["s3", "--closure", "over", "clasp"]) == 1


def test_corpus_listing(capsys):
    assert run(["corpus", "list"]) == 0
    listed = {line.split()[0] for line in capsys.readouterr().out.splitlines() if line.strip()}
    assert set(corpus_names()) <= listed
    assert len(corpus_names()) == 24


def test_corpus_show(capsys):
    assert run(["corpus", "show", "clasp"]) == 0
    assert "outer_radius" in capsys.readouterr().out


def test_corpus_path_spellings():
    assert corpus_path("clasp") == corpus_path("corpus/clasp.atd") == corpus_path("clasp.atd")


def test_twist_round_trip(tmp_path, capsys):
    out = tmp_path / "twisted.atd"
    assert run(["twist", "add", "p2_planar", "--count", "1", "-o", str(out)]) == 0
    d = load_atd(str(out))
    assert len(d.crossings) == 2
    capsys.readouterr()
    _, doc = _json(capsys, ["s2s1", "--collapse-z2", str(out)])
    _, ref = _json(capsys, ["s2s1", "--collapse-z2", "clasp"])
    assert doc["results"]["khr"]["collapsed"] == ref["results"]["khr"]["collapsed"]


def test_cube_text(capsys):
    assert run(["cube", "--sign", "-", "clasp"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert "11: L_0 (x) A^1 [2,6]" in lines
    assert "10 -> 11: a_0 (x) [1 cols]" in lines


def test_verify_category(capsys):
    code, doc = _json(capsys, ["verify", "category"])
    assert code == 0 and doc["failures"] == []


def test_verify_geometry_with_csv(tmp_path, capsys):
    csv = tmp_path / "curves.csv"
    code, doc = _json(capsys, ["verify", "geometry", "--csv", str(csv)])
    assert code == 0
    assert csv.exists() and csv.stat().st_size > 0
