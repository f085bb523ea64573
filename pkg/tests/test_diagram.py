from __future__ import annotations

import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from annular_khr.diagram import (
    ParseError,
    ValidationError,
    add_full_twist,
    arc_shift,
    crossing_signs,
    cube,
    dump_atd,
    loop_number,
    parse_atd,
    point_in_polygon,
    resolve,
    seam_linking,
)

from .conftest import load


def atd(strands, crossings=()):
    return json.dumps({"outer_radius": 10.0, "strands": strands, "crossings": list(crossings)})


ARC = {"id": "a", "kind": "arc", "points": [[0, 10], [0, 0]]}


def test_trivial_arc():
    d = load("trivial_arc")
    assert len(d.crossings) == 0
    assert crossing_signs(d) == (0, 0)
    t = resolve(d, "")
    assert t.winding == 0 and not t.circles
    assert list(cube(d).vertices) == [""]
    assert seam_linking(d, "over") == 0 and arc_shift(0) == (0, 0)


def test_clasp_shape():
    d = load("clasp")
    assert len(d.crossings) == 2
    assert loop_number(d) == 2
    assert crossing_signs(d) == (2, 0)
    assert crossing_signs(load("clasp_mirror")) == (0, 2)


def test_clasp_resolutions():
    d = load("clasp")
    assert (resolve(d, "00").winding, len(resolve(d, "00").circles)) == (2, 0)
    assert (resolve(d, "11").winding, len(resolve(d, "11").circles)) == (0, 1)


def test_clasp_cube():
    cb = cube(load("clasp"))
    shape = {k: (v.winding, len(v.circles)) for k, v in cb.vertices.items()}
    assert shape == {"00": (2, 0), "01": (0, 0), "10": (0, 0), "11": (0, 1)}
    kinds = {k: v.kind for k, v in cb.edges.items()}
    assert kinds == {("00", "01"): "W-", ("00", "10"): "W-", ("01", "11"): "R+", ("10", "11"): "L+"}


def test_kink_cubes():
    for name, kind in (("kink_negative", "L+"), ("kink_positive", "L-")):
        cb = cube(load(name))
        assert len(cb.vertices) == 2
        (edge,) = cb.edges.values()
        assert edge.kind == kind and edge.enclosed == ()


def test_seam_linking_and_shift():
    d = load("clasp")
    assert seam_linking(d, "over") == -2 and arc_shift(-2) == (-1, -4)
    assert seam_linking(d, "under") == 2 and arc_shift(2) == (1, 4)


def test_tangent_intersection_rejected():
    touching = {"id": "c", "kind": "circle", "points": [[0, 5], [2, 3], [4, 5], [2, 7]]}
    with pytest.raises(ValidationError):
        parse_atd(atd([ARC, touching]))


def test_unrecorded_crossing_rejected():
    square = {"id": "c", "kind": "circle", "points": [[-1, 4], [1, 4], [1, 6], [-1, 6]]}
    with pytest.raises(ValidationError):
        parse_atd(atd([ARC, square]))


def test_bad_json():
    with pytest.raises(ParseError):
        parse_atd("{not json")
    with pytest.raises(ParseError):
        parse_atd(atd([{"id": "a", "kind": "spiral", "points": [[0, 10], [0, 0]]}]))


def test_full_twist_on_planar_spiral_gives_clasp_shape():
    t = add_full_twist(load("p2_planar"))
    assert len(t.crossings) == 2
    cb = cube(t)
    assert {k: v.kind for k, v in cb.edges.items()} == {k: v.kind for k, v in cube(load("clasp")).edges.items()}


def test_full_twists_add_crossings():
    d = load("clasp")
    assert len(add_full_twist(d).crossings) == 4
    assert len(add_full_twist(add_full_twist(d)).crossings) == 6


def test_dump_is_stable(corpus):
    for d in corpus.values():
        text = dump_atd(d)
        assert dump_atd(parse_atd(text)) == text


def test_loop_numbers(corpus):
    loops = {n: loop_number(d) for n, d in corpus.items()}
    assert loops["trivial_arc"] == 0 and loops["p2_planar"] == 2 and loops["trefoil_tangle"] == 0
    assert all(v in (0, 2) for v in loops.values())


@given(st.integers(3, 12), st.floats(0.5, 4.0), st.floats(-6, 6), st.floats(-6, 6))
def test_point_in_regular_polygon(n, radius, x, y):
    poly = [(radius * math.cos(2 * math.pi * k / n), radius * math.sin(2 * math.pi * k / n)) for k in range(n)]
    dist = math.hypot(x, y)
    inradius = radius * math.cos(math.pi / n)
    if dist < inradius * 0.999:
        assert point_in_polygon((x, y), poly)
    elif dist > radius * 1.001:
        assert not point_in_polygon((x, y), poly)


@pytest.mark.parametrize("bits", ["00", "01", "10", "11"])
def test_resolution_windings_are_even(bits):
    assert resolve(load("clasp"), bits).winding % 2 == 0
