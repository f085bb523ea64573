"""Rank kernels for bit-packed GF(2) matrices.

Rows are stored as uint64 words, column j living in word j // 64 at bit
j % 64.  The numba kernel is the default; set ``KHR_NO_NUMBA=1`` to force
the pure-numpy fallback (useful for debugging and for the benchmark).
"""
from __future__ import annotations

import os

import numpy as np

__all__ = ["rank_packed", "rank_packed_numpy", "rank_packed_numba", "BACKEND"]


def rank_packed_numpy(rows: np.ndarray, ncols: int) -> int:
    """Rank of a packed matrix by vectorized row reduction (destroys ``rows``)."""
    nrows = rows.shape[0]
    if nrows == 0 or ncols == 0:
        return 0
    rank = 0
    for col in range(ncols):
        if rank == nrows:
            break
        word, bit = divmod(col, 64)
        mask = np.uint64(1) << np.uint64(bit)
        hits = np.flatnonzero(rows[rank:, word] & mask)
        if hits.size == 0:
            continue
        piv = rank + hits[0]
        if piv != rank:
            rows[[rank, piv]] = rows[[piv, rank]]
        below = rank + 1 + np.flatnonzero(rows[rank + 1:, word] & mask)
        if below.size:
            rows[below] ^= rows[rank]
        rank += 1
    return rank


def _rank_loop(rows: np.ndarray, ncols: int) -> int:
    nrows = rows.shape[0]
    nwords = rows.shape[1]
    rank = 0
    one = np.uint64(1)
    for col in range(ncols):
        if rank == nrows:
            break
        word = col // 64
        mask = one << np.uint64(col % 64)
        piv = -1
        for i in range(rank, nrows):
            if rows[i, word] & mask:
                piv = i
                break
        if piv < 0:
            continue
        if piv != rank:
            for w in range(nwords):
                tmp = rows[rank, w]
                rows[rank, w] = rows[piv, w]
                rows[piv, w] = tmp
        for i in range(piv + 1, nrows):
            if rows[i, word] & mask:
                for w in range(word, nwords):
                    rows[i, w] ^= rows[rank, w]
        rank += 1
    return rank


try:
    if os.environ.get("KHR_NO_NUMBA", "") not in ("", "0"):
        raise ImportError("numba disabled by KHR_NO_NUMBA")
    import numba as nb

    rank_packed_numba = nb.njit(cache=True)(_rank_loop)
    BACKEND = "numba"
except ImportError:
    rank_packed_numba = None
    BACKEND = "numpy"


def rank_packed(rows: np.ndarray, ncols: int) -> int:
    """Rank of a packed matrix using the selected backend (destroys ``rows``)."""
    if rows.shape[0] == 0 or ncols == 0:
        return 0
    if rank_packed_numba is not None:
        return int(rank_packed_numba(rows, ncols))
    return rank_packed_numpy(rows, ncols)
