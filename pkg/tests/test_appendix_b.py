from __future__ import annotations

import copy
import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from annular_khr import appendix_b as ab
from annular_khr.appendix_b import (
    FAMILIES,
    IDENTITIES,
    SADDLE_CASES,
    Space,
    UnknownFamily,
    UnknownSaddleCase,
    build_family,
    check_parities,
    verify_saddle_commutation,
    verify_sdr,
)

FAMILY_NAMES = ["P2", "P0R", "P0L", "P0C", "Pm2"]


def _passes(report: dict) -> bool:
    return set(report) == set(IDENTITIES) and not any(report.values())


def test_family_names():
    assert set(FAMILY_NAMES) <= set(FAMILIES)
    with pytest.raises(UnknownFamily):
        build_family("P4")


def test_p2_trivial_shapes():
    fi = build_family("P2", 0, 0)
    assert fi.single == Space(2, 0)
    assert fi.term0 == (Space(0, 1), Space(2, 0))
    assert fi.term1 == (Space(0, 0), Space(0, 0))
    assert sum(s.dim for s in fi.term0) == 2 * 2 ** 1 + 2 * 2 ** 0


def test_p2_trivial_f0_by_hand():
    fi = build_family("P2", 0, 0)
    # F0 on (sigma, tau): sigma -> alpha (x) 1, tau -> tau
    (top,), (bottom,) = fi.F0.blocks
    assert top.tolist() == [[1, 0], [0, 0], [0, 0], [0, 0]]
    assert bottom.tolist() == [[0, 0], [0, 1]]
    gf = fi.G0 @ fi.F0
    assert np.array_equal(gf.full(), np.eye(2, dtype=np.int64))


def test_p0c_f0_has_coproduct_term():
    fi = build_family("P0C", 0, 0)
    assert "[1 eta 1 ; Delta]" in FAMILIES["P0C"]["F0"][0][0]
    assert fi.F0.full().any()
    assert _passes(verify_sdr(fi))


def test_pm2_shapes():
    fi = build_family("Pm2", 1, 1)
    assert fi.single.winding == -2
    assert [s.winding for s in fi.term0] == [0, -2]
    assert [s.legs for s in fi.term0] == [3, 2]
    assert [s.legs for s in fi.term1] == [2, 2]
    assert _passes(verify_sdr(fi))


def test_p0r_trivial_holds():
    assert _passes(verify_sdr(build_family("P0R", 0, 0, 0)))


@pytest.mark.parametrize("family", FAMILY_NAMES)
def test_sdr_grid(family):
    for fam, regions in ab.family_grid(2, 2, 2):
        if fam != family:
            continue
        fi = build_family(fam, **regions)
        assert _passes(verify_sdr(fi)), fi.label
        assert check_parities(fi) == [], fi.label


def test_r2_saddle_example():
    rep = verify_saddle_commutation("P2", "R2", {"ln": 1, "le": 1, "r": 1})
    assert rep.ok, rep.failures


def test_p0c_circle_split_example():
    rep = verify_saddle_commutation("P0C", "split-l-circle", {"l": 1, "r": 1})
    assert rep.ok, rep.failures


def test_unknown_saddle_case():
    with pytest.raises(UnknownSaddleCase):
        verify_saddle_commutation("P2", "no-such-saddle", {})


def test_saddle_grid_totals_two():
    rows = [verify_saddle_commutation(f, s, p) for f, s, p in ab.saddle_grid(2)]
    assert {(r.family, r.case) for r in rows} >= set(SADDLE_CASES)
    bad = [r.row() for r in rows if not r.ok]
    assert bad == []


def test_merge_cases_are_flagged_reconstructed():
    merges = [k for k in SADDLE_CASES if "merge" in k[1]]
    assert merges
    rows = [verify_saddle_commutation(f, s, p) for f, s, p in ab.saddle_grid(1) if "merge" in s]
    assert rows and all(r.reconstructed for r in rows)


def _corrupt(fi, key: str):
    bad = copy.deepcopy(fi)
    m = bad.maps[key]
    for row in m.blocks:
        for blk in row:
            if blk.size:
                blk[0, 0] ^= 1
                return bad
    raise AssertionError("no block to corrupt")


@pytest.mark.parametrize("key", ["F0", "G0", "H0"])
def test_corrupted_transcription_is_caught(key):
    fi = build_family("P2", 1, 0)
    report = verify_sdr(_corrupt(fi, key))
    assert any(report.values())


def test_corrupted_differential_breaks_a_saddle_square(monkeypatch):
    cs = SADDLE_CASES[("P2", "R2")]
    # "x + x" is zero over F2, so this silently deletes the top differential
    broken = dataclasses.replace(cs, d_top=f"{cs.d_top} + {cs.d_top}")
    monkeypatch.setitem(SADDLE_CASES, ("P2", "R2"), broken)
    rep = verify_saddle_commutation("P2", "R2", {"ln": 1, "le": 1, "r": 1})
    assert not rep.ok


@settings(max_examples=25)
@given(st.sampled_from(FAMILY_NAMES), st.integers(0, 2), st.integers(0, 2), st.integers(0, 1))
def test_sdr_is_stable_under_adding_a_leg(family, l, r, c):
    regions = {"l": l, "r": r, "c": c}
    keys = FAMILIES[family]["regions"]
    kwargs = {k: regions[k] for k in keys}
    base = verify_sdr(build_family(family, **kwargs))
    kwargs["r"] = kwargs.get("r", 0) + 1
    grown = verify_sdr(build_family(family, **kwargs))
    assert _passes(base) == _passes(grown) is True
