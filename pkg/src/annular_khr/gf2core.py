"""Linear algebra over GF(2) and cohomology of bigraded complexes."""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping, NamedTuple

import numpy as np

from ._kernels import rank_packed

__all__ = [
    "Bigrading",
    "F2Matrix",
    "BigradedComplex",
    "DifferentialNotSquareZero",
    "DifferentialNotHomogeneous",
    "rank",
    "cohomology_dims",
]


class Bigrading(NamedTuple):
    """Homological degree ``h`` and quantum degree ``q``."""

    h: int
    q: int

    def __add__(self, other):  # type: ignore[override]
        return Bigrading(self.h + other[0], self.q + other[1])

    def __sub__(self, other):
        return Bigrading(self.h - other[0], self.q - other[1])

    def __neg__(self):
        return Bigrading(-self.h, -self.q)


DEGREE_ONE = Bigrading(1, 1)


class DifferentialNotSquareZero(ValueError):
    """Raised when d(d(x)) != 0; ``witness`` is the offending basis label."""

    def __init__(self, witness, image=None):
        super().__init__(f"differential does not square to zero at {witness!r}")
        self.witness = witness
        self.image = image


class DifferentialNotHomogeneous(ValueError):
    def __init__(self, source, target, degree):
        super().__init__(
            f"differential component {source!r} -> {target!r} has degree {tuple(degree)}"
        )
        self.source = source
        self.target = target


class F2Matrix:
    """Dense GF(2) matrix with rows packed into uint64 words."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows: int, cols: int, data: np.ndarray | None = None):
        self.rows = rows
        self.cols = cols
        nwords = max(1, (cols + 63) // 64)
        if data is None:
            data = np.zeros((rows, nwords), dtype=np.uint64)
        self.data = data

    @classmethod
    def from_dense(cls, a) -> "F2Matrix":
        a = np.asarray(a, dtype=np.uint8) & 1
        rows, cols = a.shape
        m = cls(rows, cols)
        for j in range(cols):
            col = a[:, j].astype(np.uint64)
            m.data[:, j // 64] |= col << np.uint64(j % 64)
        return m

    @classmethod
    def from_row_sets(cls, rows: int, cols: int, row_sets: Iterable[Iterable[int]]) -> "F2Matrix":
        m = cls(rows, cols)
        for i, cs in enumerate(row_sets):
            for j in cs:
                m.data[i, j // 64] ^= np.uint64(1) << np.uint64(j % 64)
        return m

    @classmethod
    def identity(cls, n: int) -> "F2Matrix":
        return cls.from_row_sets(n, n, ([i] for i in range(n)))

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.rows, self.cols), dtype=np.uint8)
        for j in range(self.cols):
            out[:, j] = (self.data[:, j // 64] >> np.uint64(j % 64)) & np.uint64(1)
        return out

    def transpose(self) -> "F2Matrix":
        return F2Matrix.from_dense(self.to_dense().T)

    def __eq__(self, other):
        return (
            isinstance(other, F2Matrix)
            and (self.rows, self.cols) == (other.rows, other.cols)
            and np.array_equal(self.data, other.data)
        )

    def __repr__(self):
        return f"F2Matrix({self.rows}x{self.cols})"


def rank(m: F2Matrix) -> int:
    """Rank over GF(2)."""
    if m.rows == 0 or m.cols == 0:
        return 0
    work = np.ascontiguousarray(m.data.copy())
    return rank_packed(work, m.cols)


@dataclass
class BigradedComplex:
    """A bigraded GF(2) basis with a degree (1,1) differential.

    ``basis`` maps each label to its bigrading and ``differential`` maps a
    label to the set of labels in its image (absent labels map to zero).
    """

    basis: dict[Hashable, Bigrading]
    differential: dict[Hashable, frozenset] = field(default_factory=dict)

    @classmethod
    def from_pairs(cls, elements, differential: Mapping | None = None) -> "BigradedComplex":
        basis = {}
        for label, g in elements:
            if label in basis:
                raise ValueError(f"duplicate basis label {label!r}")
            basis[label] = Bigrading(*g)
        diff = {k: frozenset(v) for k, v in (differential or {}).items() if v}
        return cls(basis, diff)

    def dims(self) -> dict[Bigrading, int]:
        out: dict[Bigrading, int] = defaultdict(int)
        for g in self.basis.values():
            out[g] += 1
        return dict(out)

    def __len__(self):
        return len(self.basis)

    def check(self) -> None:
        """Raise unless the differential is homogeneous of degree (1,1) and squares to zero."""
        basis = self.basis
        for x, image in self.differential.items():
            gx = basis[x]
            for y in image:
                if y not in basis:
                    raise KeyError(f"differential of {x!r} hits unknown label {y!r}")
                if basis[y] - gx != DEGREE_ONE:
                    raise DifferentialNotHomogeneous(x, y, basis[y] - gx)
        for x, image in self.differential.items():
            acc: set = set()
            for y in image:
                acc ^= self.differential.get(y, frozenset())
            if acc:
                raise DifferentialNotSquareZero(x, frozenset(acc))

    def groups(self) -> dict[Bigrading, list]:
        out: dict[Bigrading, list] = defaultdict(list)
        for x, g in self.basis.items():
            out[g].append(x)
        return dict(out)

    def block(self, g: Bigrading, groups: dict | None = None) -> F2Matrix:
        """Matrix of the differential from bigrading ``g`` to ``g + (1,1)`` (rows = sources)."""
        groups = self.groups() if groups is None else groups
        src = groups.get(g, [])
        tgt = {y: j for j, y in enumerate(groups.get(g + DEGREE_ONE, []))}
        rows = [[tgt[y] for y in self.differential.get(x, ())] for x in src]
        return F2Matrix.from_row_sets(len(src), len(tgt), rows)


def cohomology_dims(c: BigradedComplex, check: bool = True) -> dict[Bigrading, int]:
    """Dimensions of cohomology, keyed by bigrading (zeros omitted)."""
    if check:
        c.check()
    groups = c.groups()
    dims = {g: len(v) for g, v in groups.items()}
    ranks = {g: rank(c.block(g, groups)) for g in dims if (g + DEGREE_ONE) in dims}
    out = {}
    for g, n in dims.items():
        h = n - ranks.get(g, 0) - ranks.get(g - DEGREE_ONE, 0)
        if h:
            out[g] = h
    return dict(sorted(out.items()))
