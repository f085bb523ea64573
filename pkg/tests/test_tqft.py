from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from annular_khr import tqft
from annular_khr.tqft import E, X


def test_comultiply_on_one_leg():
    d = tqft.comultiply(["a"], "a", "a1", "a2")
    e, x = 0, 1
    # legs are (a1, a2); bit i is the basis letter of leg i
    assert d(e) == {0b10, 0b01}
    assert d(x) == {0b11}


def test_sigma_on_no_legs_is_zero():
    for legs in ([], ["a"], ["a", "b", "c"]):
        assert tqft.sigma(legs, []).is_zero()


def test_sigma_two_legs_on_xx():
    s = tqft.sigma(["a", "b"], ["a", "b"])
    assert s(0b11) == {0b10, 0b01}


def test_counit_after_unit_is_zero():
    assert (tqft.counit(["c"], "c") @ tqft.unit([], "c")).is_zero()


def test_counit_dot_after_unit_is_one():
    m = tqft.counit_dot(["c"], "c") @ tqft.unit([], "c")
    assert m.source == () and m.target == ()
    assert m(0) == {0}


def test_multiply_after_comultiply_is_zero():
    m = tqft.multiply(["a1", "a2"], "a1", "a2", "a") @ tqft.comultiply(["a"], "a", "a1", "a2")
    assert m.is_zero()


@pytest.mark.parametrize("n", [2, 4])
def test_sigma_identities(n):
    assert tqft.verify_sigma_identities(n) == []


def test_unknown_leg():
    with pytest.raises(tqft.UnknownLeg):
        tqft.counit(["a"], "b")


def test_compose_checks_legs():
    with pytest.raises(tqft.LegSetMismatch):
        tqft.identity(["a"]) @ tqft.identity(["b"])


legs = st.lists(st.sampled_from("abcde"), unique=True, max_size=4)


@given(legs, st.data())
def test_operator_degrees(ls, data):
    if not ls:
        return
    leg = data.draw(st.sampled_from(ls))
    for kind, op in {
        "counit": tqft.counit(ls, leg),
        "counit_dot": tqft.counit_dot(ls, leg),
        "raise_ex": tqft.raise_ex(ls, leg),
        "comultiply": tqft.comultiply(ls, leg, "y1", "y2"),
        "unit": tqft.unit(ls, "new"),
        "unit_dot": tqft.unit_dot(ls, "new"),
    }.items():
        deg = op.degree()
        assert deg is None or deg == tqft.OPERATOR_DEGREES[kind]


@given(legs, st.data())
def test_sigma_is_sum_of_raises(ls, data):
    subset = data.draw(st.lists(st.sampled_from(ls), unique=True)) if ls else []
    acc = tqft.zero(ls, ls)
    for leg in subset:
        acc = acc + tqft.raise_ex(ls, leg)
    assert tqft.sigma(ls, subset) == acc


@given(legs)
def test_identity_is_neutral(ls):
    f = tqft.raise_ex(ls, ls[0]) if ls else tqft.identity(ls)
    assert tqft.identity(ls) @ f == f == f @ tqft.identity(ls)


def test_basis_letters():
    assert (E, X) == (0, 1)
