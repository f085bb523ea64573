from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from annular_khr.category import (
    DEFAULT_TABLES,
    NotComposable,
    UndeterminedProduct,
    a,
    act3_s3,
    act_s2s1,
    act_s3,
    alpha,
    b,
    beta,
    bigrading,
    c,
    d,
    mu2,
    p,
    q,
    r,
    rbar,
    s,
    sbar,
    sigma_gen,
    tau_gen,
    verify_consistency,
    w,
)


def test_fukaya_products():
    assert mu2(q(0, 2, "+"), p(2, 0, "-")) == {c(0)}
    assert mu2(a(0), c(0)) == {c(0)}
    assert mu2(c(2), p(2, 0, "+")) == set()


def test_closure_actions():
    assert act_s3(a(2), w(2, "+")) == {w(2, "+")}
    assert act_s3(c(0), w(0, "+")) == set()
    assert act_s3(q(0, 2, "+"), w(2, "+")) == set()


def test_closure_triple_actions():
    assert act3_s3(c(0), q(0, 2, "+"), w(2, "+")) == {w(0, "+")}
    assert act3_s3(p(2, 0, "+"), c(0), w(0, "-")) == {w(2, "-")}
    assert act3_s3(c(0), q(0, 2, "-"), w(2, "+")) == set()


def test_s2s1_actions():
    assert act_s2s1(q(0, 2, "-"), sigma_gen(2)) == {beta()}
    assert act_s2s1(a(2), tau_gen(2)) == {tau_gen(2)}
    assert act_s2s1(c(0), alpha()) == {beta()}
    assert act_s2s1(c(0), beta()) == set()


def test_p_plus_on_alpha_follows_the_grading_rule():
    # p(+) lands on sigma; the other reading of the table (alpha -> 0) is the negative fixture below
    assert act_s2s1(p(2, 0, "+"), alpha()) == {sigma_gen(2)}


def test_consistency_passes():
    res = verify_consistency()
    assert all(v == [] for v in res.values()), res
    assert set(res) == {"orientation", "associativity", "invariance", "bigrading", "squares"}


def test_substitution_check_alone():
    assert verify_consistency()["invariance"] == []


def test_corrupted_entry_gives_associativity_witness():
    bad = DEFAULT_TABLES.copy()
    bad.perturbed[(b(0), c(0))] = c(0)
    res = verify_consistency(bad)
    assert res["associativity"]
    assert any("(b_0, b_0, c_0)" in x for x in res["associativity"])


def test_dropped_entry_is_caught():
    bad = DEFAULT_TABLES.copy()
    del bad.perturbed[(r(0, 2), s(2, 0))]
    res = verify_consistency(bad)
    assert res["associativity"] and res["invariance"]


def test_printed_p_plus_row_is_rejected():
    # the row read literally (alpha -> 0, beta -> sigma) breaks gradings and the squares
    bad = DEFAULT_TABLES.copy()
    del bad.ops_s2s1[(p(2, 0, "+"), alpha())]
    bad.ops_s2s1[(p(2, 0, "+"), beta())] = sigma_gen(2)
    res = verify_consistency(bad)
    assert res["bigrading"] and res["squares"]


def test_generator_gradings():
    assert tuple(bigrading(a(0))) == (0, 0)
    assert tuple(bigrading(b(2))) == (0, 0)
    assert tuple(bigrading(c(0))) == (0, -2)
    assert tuple(bigrading(d(0))) == (0, -2)
    for g in (r(2, 0), s(0, 2), p(2, 0, "+"), q(0, 2, "-"), sigma_gen(2), tau_gen(-2)):
        assert tuple(bigrading(g)) == (0, -1)
    assert tuple(bigrading(beta())) == (0, -2)


def test_winding_span_is_undetermined():
    with pytest.raises(UndeterminedProduct):
        mu2(p(4, 2, "+"), p(2, 0, "+"))


def test_not_composable():
    with pytest.raises(NotComposable):
        mu2(c(0), c(2))


L_GENS = [a(0), b(0), c(0), d(0), r(2, 0), rbar(2, 0), s(2, 0), sbar(2, 0),
          r(0, 2), rbar(0, 2), s(0, 2), sbar(0, 2), a(2), b(2), c(2), d(2)]


@given(st.sampled_from(L_GENS), st.sampled_from(L_GENS))
def test_products_respect_bigrading(g2, g1):
    if g1.tgt != g2.src:
        return
    expected = bigrading(g2) + bigrading(g1)
    for g in mu2(g2, g1):
        assert bigrading(g) == expected


@given(st.sampled_from(L_GENS))
def test_identity_products(g):
    assert mu2(a(g.tgt), g) == {g} == mu2(g, a(g.src))
