from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from annular_khr import _kernels
from annular_khr.gf2core import (
    BigradedComplex,
    Bigrading,
    DifferentialNotHomogeneous,
    DifferentialNotSquareZero,
    F2Matrix,
    cohomology_dims,
    rank,
)


def rank_by_ints(dense: np.ndarray) -> int:
    """Independent oracle: elimination on Python integers used as bit rows."""
    rows = [int("".join(str(int(v)) for v in row) or "0", 2) for row in dense]
    r = 0
    while rows:
        pivot = max(rows)
        rows.remove(pivot)
        if pivot == 0:
            break
        top = pivot.bit_length() - 1
        rows = [x ^ pivot if (x >> top) & 1 else x for x in rows]
        r += 1
    return r


matrices = st.integers(0, 9).flatmap(
    lambda n: st.integers(0, 140).flatmap(
        lambda m: st.lists(st.lists(st.integers(0, 1), min_size=m, max_size=m), min_size=n, max_size=n).map(
            lambda rows, m=m, n=n: np.array(rows, dtype=np.uint8).reshape(n, m)
        )
    )
)


def test_rank_examples():
    assert rank(F2Matrix(0, 0)) == 0
    assert rank(F2Matrix.identity(3)) == 3
    # the 2x2 block between the two middle vertices and the top of the double-cycle complex
    assert rank(F2Matrix.from_dense([[1, 1], [0, 1]])) == 2


@given(matrices)
def test_rank_matches_integer_oracle(a):
    assert rank(F2Matrix.from_dense(a)) == rank_by_ints(a)


@given(matrices)
def test_rank_transpose_and_bounds(a):
    m = F2Matrix.from_dense(a)
    r = rank(m)
    assert r <= min(a.shape)
    if a.size:
        assert rank(m.transpose()) == r


@given(matrices)
def test_backends_agree(a):
    m = F2Matrix.from_dense(a)
    if m.rows == 0 or m.cols == 0:
        return
    expected = _kernels.rank_packed_numpy(m.data.copy(), m.cols)
    if _kernels.rank_packed_numba is not None:
        assert _kernels.rank_packed_numba(m.data.copy(), m.cols) == expected
    assert _kernels._rank_loop(m.data.copy(), m.cols) == expected


@given(matrices)
def test_dense_roundtrip(a):
    assert np.array_equal(F2Matrix.from_dense(a).to_dense(), a)


def test_single_generator():
    c = BigradedComplex.from_pairs([("x", (2, 5))])
    assert cohomology_dims(c) == {Bigrading(2, 5): 1}


def trefoil_complex() -> BigradedComplex:
    # underpass closure of the clasp, hand-assembled: one w2 vertex, two w0 vertices, A on top
    elems = [("w2", (0, 2)), ("l", (2, 8)), ("r", (2, 8)), ("top_e", (3, 11)), ("top_x", (3, 9))]
    return BigradedComplex.from_pairs(elems, {"l": {"top_x"}, "r": {"top_x"}})


def double_cycle_complex() -> BigradedComplex:
    # the S2xS1 complex of the clasp, hand-assembled from the listed differentials
    elems = [
        ("sigma", (0, 1)), ("tau", (0, 1)),
        ("aL", (1, 4)), ("bL", (1, 2)), ("aR", (1, 4)), ("bR", (1, 2)),
        ("a_e", (2, 7)), ("a_x", (2, 5)), ("b_e", (2, 5)), ("b_x", (2, 3)),
    ]
    diff = {
        "sigma": {"bL", "bR"},
        "aL": {"a_x"}, "bL": {"b_x"},
        "aR": {"a_x", "b_e"}, "bR": {"b_x"},
    }
    return BigradedComplex.from_pairs(elems, diff)


def test_trefoil_complex_cohomology():
    assert cohomology_dims(trefoil_complex()) == {(0, 2): 1, (2, 8): 1, (3, 11): 1}


def test_double_cycle_complex_cohomology():
    assert cohomology_dims(double_cycle_complex()) == {(0, 1): 1, (2, 7): 1}


def test_check_rejects_nonzero_square():
    c = BigradedComplex.from_pairs([("a", (0, 0)), ("b", (1, 1)), ("c", (2, 2))], {"a": {"b"}, "b": {"c"}})
    with pytest.raises(DifferentialNotSquareZero):
        c.check()


def test_check_rejects_wrong_degree():
    c = BigradedComplex.from_pairs([("a", (0, 0)), ("b", (1, 3))], {"a": {"b"}})
    with pytest.raises(DifferentialNotHomogeneous):
        c.check()


@given(st.integers(1, 6), st.integers(0, 2**12))
def test_euler_characteristic_is_preserved(n, seed):
    rng = np.random.default_rng(seed)
    # a random two-term complex in each of two bigradings
    elems = [(f"u{i}", (0, 0)) for i in range(n)] + [(f"v{j}", (1, 1)) for j in range(n + 1)]
    diff = {f"u{i}": {f"v{j}" for j in range(n + 1) if rng.integers(0, 2)} for i in range(n)}
    h = cohomology_dims(BigradedComplex.from_pairs(elems, diff))
    assert h.get((0, 0), 0) - h.get((1, 1), 0) == n - (n + 1)
