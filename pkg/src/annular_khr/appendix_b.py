"""Homotopy equivalences for the five planar 3-tangle families under a full twist.

Each family ``P2, P0R, P0L, P0C, Pm2`` gives a Z/2-collapsed two-term complex
``term0 <-> term1`` together with a single-term complex, maps ``F0, G0`` between
them and homotopies ``H0, H1``.  The maps are transcribed in a small positional
notation and evaluated as dense GF(2) matrices, for example::

    "1ab etadot eta I(l+r) + a0 m I(c+l) S(r)"

A term starts with a slot map acting on the morphism space ``(W_0, L_n)``:
``a0``/``c0`` act through the category tables and ``1xy`` sends basis letter
``y`` to ``x`` (letters ``a, b, s, t`` for alpha, beta, sigma, tau).  The
remaining tokens are tensored left to right over the A factors:

``1``, ``eta``, ``etadot``, ``eps``, ``epsdot``, ``Delta``, ``m``, ``m3``,
``ee.m`` (1_ee after m), ``ex.m`` (1_ex after m), ``I(n)``, ``S(n)`` (Sigma),
``T(a,b)`` (block swap) and ``[X ; Y]`` for the composite X after Y.

A basis vector of ``(W_0, L_n) (x) A^k`` has index ``slot * 2**k + legs`` with
the first A factor as the most significant leg bit.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Iterable, Mapping

import numpy as np

from . import tqft
from .category import DEFAULT_TABLES, a as gen_a, alpha, beta, bigrading, c as gen_c, sigma_gen, tau_gen

__all__ = [
    "UnknownFamily",
    "UnknownSaddleCase",
    "Space",
    "BlockMap",
    "FamilyInstance",
    "SaddleCase",
    "FAMILIES",
    "SADDLE_CASES",
    "IDENTITIES",
    "slot_map",
    "evaluate",
    "build_family",
    "verify_sdr",
    "verify_saddle_commutation",
    "check_parities",
    "family_grid",
    "saddle_grid",
    "verify_all",
]


class UnknownFamily(KeyError):
    pass


class UnknownSaddleCase(KeyError):
    pass


# -- spaces and slot maps ----------------------------------------------------------


@dataclass(frozen=True)
class Space:
    """``(W_0, L_winding) (x) A^legs``; always two slot basis vectors."""

    winding: int
    legs: int

    @property
    def dim(self) -> int:
        return 2 << self.legs

    def qparity(self) -> int:
        """Quantum-degree parity shared by every basis vector of the space."""
        slot = _slot_basis(self.winding)[0]
        return (bigrading(slot).q + self.legs) % 2

    def __str__(self):
        return f"(W0,L{self.winding})xA^{self.legs}"


def _slot_basis(n: int):
    if n == 0:
        return (alpha(0), beta(0))
    if n in (2, -2):
        return (sigma_gen(n), tau_gen(n))
    raise ValueError(f"no (W_0, L_{n}) space at winding {n}")


_LETTERS = {"a": (0, 0), "b": (0, 1), "s": (2, 0), "t": (2, 1)}


def slot_map(name: str, source: int, target: int) -> np.ndarray:
    """2x2 matrix of a slot token between ``(W_0, L_source)`` and ``(W_0, L_target)``."""
    if name in ("a0", "c0"):
        if source != target:
            raise ValueError(f"{name} cannot change winding {source} -> {target}")
        if name == "c0" and source != 0:
            raise ValueError("c0 only acts on (W_0, L_0)")
        gen = (gen_a if name == "a0" else gen_c)(source)
        basis = _slot_basis(source)
        out = np.zeros((2, 2), dtype=np.int64)
        for j, m in enumerate(basis):
            for hit in DEFAULT_TABLES.act_s2s1(gen, m):
                out[basis.index(hit), j] ^= 1
        return out
    match = re.fullmatch(r"1([abst])([abst])", name)
    if not match:
        raise ValueError(f"unknown slot token {name!r}")
    (tkind, ti), (skind, si) = _LETTERS[match.group(1)], _LETTERS[match.group(2)]
    if (tkind == 0) != (target == 0) or (skind == 0) != (source == 0):
        raise ValueError(f"slot map {name} does not fit L_{source} -> L_{target}")
    out = np.zeros((2, 2), dtype=np.int64)
    out[ti, si] = 1
    return out


# -- positional A-factor operators -------------------------------------------------


def _dense(op: tqft.TensorMap, inputs: list, outputs: list) -> np.ndarray:
    """Positional matrix of a labelled tensor map (first leg = high bit)."""
    nin, nout = len(inputs), len(outputs)
    spos = {leg: i for i, leg in enumerate(op.source)}
    tpos = {leg: i for i, leg in enumerate(op.target)}
    out = np.zeros((1 << nout, 1 << nin), dtype=np.int64)
    for col in range(1 << nin):
        mask = 0
        for p, leg in enumerate(inputs):
            if (col >> (nin - 1 - p)) & 1:
                mask |= 1 << spos[leg]
        for tmask in op(mask):
            row = 0
            for p, leg in enumerate(outputs):
                if (tmask >> tpos[leg]) & 1:
                    row |= 1 << (nout - 1 - p)
            out[row, col] ^= 1
    return out


@lru_cache(maxsize=None)
def _elementary(name: str) -> np.ndarray:
    if name == "1":
        return _dense(tqft.identity([0]), [0], [0])
    if name == "eta":
        return _dense(tqft.unit([], 0), [], [0])
    if name == "etadot":
        return _dense(tqft.unit_dot([], 0), [], [0])
    if name == "eps":
        return _dense(tqft.counit([0], 0), [0], [])
    if name == "epsdot":
        return _dense(tqft.counit_dot([0], 0), [0], [])
    if name == "Delta":
        return _dense(tqft.comultiply([0], 0, 1, 2), [0], [1, 2])
    if name == "m":
        return _dense(tqft.multiply([0, 1], 0, 1, 2), [0, 1], [2])
    if name == "m3":
        return _dense(tqft.multiply3([0, 1, 2], 0, 1, 2, 3), [0, 1, 2], [3])
    if name == "ee.m":
        m = tqft.multiply([0, 1], 0, 1, 2)
        return _dense(tqft.project_ee(m.target, 2) @ m, [0, 1], [2])
    if name == "ex.m":
        m = tqft.multiply([0, 1], 0, 1, 2)
        return _dense(tqft.raise_ex(m.target, 2) @ m, [0, 1], [2])
    raise ValueError(f"unknown operator token {name!r}")


@lru_cache(maxsize=None)
def _identity(n: int) -> np.ndarray:
    return np.eye(1 << n, dtype=np.int64)


@lru_cache(maxsize=None)
def _sigma(n: int) -> np.ndarray:
    legs = list(range(n))
    return _dense(tqft.sigma(legs, legs), legs, legs)


@lru_cache(maxsize=None)
def _swap(na: int, nb: int) -> np.ndarray:
    """tau_{a,b}: v (x) w -> w (x) v for blocks of na and nb legs."""
    out = np.zeros((1 << (na + nb),) * 2, dtype=np.int64)
    for col in range(1 << (na + nb)):
        hi, lo = col >> nb, col & ((1 << nb) - 1)
        out[(lo << na) | hi, col] = 1
    return out


@dataclass(frozen=True)
class _Op:
    nin: int
    nout: int
    mat: np.ndarray = field(compare=False)


def _tensor(ops: list[_Op]) -> _Op:
    mat = np.ones((1, 1), dtype=np.int64)
    for op in ops:
        mat = np.kron(mat, op.mat) % 2
    return _Op(sum(o.nin for o in ops), sum(o.nout for o in ops), mat)


_TOKEN = re.compile(r"\s*(\[|\]|;|\+|[A-Za-z0-9_.]+(?:\([^)]*\))?)")


def _tokens(text: str) -> list[str]:
    pos, out = 0, []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ValueError(f"cannot parse {text[pos:]!r}")
        out.append(m.group(1))
        pos = m.end()
    return out


def _value(expr: str, env: Mapping[str, int]) -> int:
    total = 0
    for part in expr.split("+"):
        part = part.strip()
        total += int(part) if part.isdigit() else env[part]
    return total


def _factor(tok: str, env: Mapping[str, int]) -> _Op:
    m = re.fullmatch(r"([A-Za-z]+)\(([^)]*)\)", tok)
    if m:
        kind, args = m.group(1), [_value(x, env) for x in m.group(2).split(",")]
        if kind == "I":
            return _Op(args[0], args[0], _identity(args[0]))
        if kind == "S":
            return _Op(args[0], args[0], _sigma(args[0]))
        if kind == "T":
            return _Op(args[0] + args[1], args[0] + args[1], _swap(args[0], args[1]))
        raise ValueError(f"unknown operator token {tok!r}")
    mat = _elementary(tok)
    return _Op(int(np.log2(mat.shape[1])), int(np.log2(mat.shape[0])), mat)


def _sequence(toks: list[str], i: int, env, stop: set) -> tuple[_Op, int]:
    ops = []
    while i < len(toks) and toks[i] not in stop:
        if toks[i] == "[":
            left, i = _sequence(toks, i + 1, env, {";"})
            right, i = _sequence(toks, i + 1, env, {"]"})
            if left.nin != right.nout:
                raise ValueError(f"composite does not chain: {right.nout} legs into {left.nin}")
            ops.append(_Op(right.nin, left.nout, (left.mat @ right.mat) % 2))
            i += 1
        else:
            ops.append(_factor(toks[i], env))
            i += 1
    return _tensor(ops), i


def evaluate(text: str, source: Space, target: Space, env: Mapping[str, int]) -> np.ndarray:
    """Dense matrix of a transcribed expression ``source -> target``."""
    toks = _tokens(text)
    out = np.zeros((target.dim, source.dim), dtype=np.int64)
    terms, cur = [], []
    for t in toks:
        if t == "+" and cur.count("[") == cur.count("]"):
            terms.append(cur)
            cur = []
        else:
            cur.append(t)
    terms.append(cur)
    for term in terms:
        slot = slot_map(term[0], source.winding, target.winding)
        op, _ = _sequence(term, 1, env, set())
        if (op.nin, op.nout) != (source.legs, target.legs):
            raise ValueError(
                f"term {' '.join(term)!r} has shape {op.nin}->{op.nout} legs, "
                f"expected {source.legs}->{target.legs}"
            )
        out ^= np.kron(slot, op.mat) % 2
    return out


# -- block maps --------------------------------------------------------------------


@dataclass
class BlockMap:
    """Matrix of maps between direct sums of spaces; ``blocks[i][j]``: source j -> target i."""

    source: tuple[Space, ...]
    target: tuple[Space, ...]
    blocks: list[list[np.ndarray]]

    @classmethod
    def from_text(cls, rows, source, target, env) -> "BlockMap":
        blocks = []
        for i, row in enumerate(rows):
            if len(row) != len(source):
                raise ValueError(f"row {i} has {len(row)} entries for {len(source)} source blocks")
            blocks.append(
                [
                    np.zeros((target[i].dim, source[j].dim), dtype=np.int64)
                    if entry in (0, None)
                    else evaluate(entry, source[j], target[i], env)
                    for j, entry in enumerate(row)
                ]
            )
        if len(blocks) != len(target):
            raise ValueError(f"{len(blocks)} rows for {len(target)} target blocks")
        return cls(tuple(source), tuple(target), blocks)

    @classmethod
    def identity(cls, spaces) -> "BlockMap":
        spaces = tuple(spaces)
        return cls(
            spaces,
            spaces,
            [
                [np.eye(s.dim, dtype=np.int64) if i == j else np.zeros((s.dim, t.dim), dtype=np.int64)
                 for j, t in enumerate(spaces)]
                for i, s in enumerate(spaces)
            ],
        )

    @classmethod
    def diagonal(cls, mats, source, target) -> "BlockMap":
        blocks = [
            [mats[i] if i == j else np.zeros((t.dim, s.dim), dtype=np.int64) for j, s in enumerate(source)]
            for i, t in enumerate(target)
        ]
        return cls(tuple(source), tuple(target), blocks)

    def full(self) -> np.ndarray:
        return np.block(self.blocks) % 2

    def __matmul__(self, other: "BlockMap") -> "BlockMap":
        if self.source != other.target:
            raise ValueError(f"cannot compose {self.source} after {other.target}")
        blocks = [
            [sum((self.blocks[i][k] @ other.blocks[k][j] for k in range(len(self.source))),
                 np.zeros((t.dim, s.dim), dtype=np.int64)) % 2
             for j, s in enumerate(other.source)]
            for i, t in enumerate(self.target)
        ]
        return BlockMap(other.source, self.target, blocks)

    def __add__(self, other: "BlockMap") -> "BlockMap":
        if (self.source, self.target) != (other.source, other.target):
            raise ValueError("cannot add block maps of different shapes")
        return BlockMap(self.source, self.target, [
            [(x + y) % 2 for x, y in zip(r1, r2)] for r1, r2 in zip(self.blocks, other.blocks)
        ])

    def difference(self, other: "BlockMap") -> list[str]:
        """Witnesses ``block (i,j): n entries`` where the two maps disagree."""
        diff = self + other
        out = []
        for i, row in enumerate(diff.blocks):
            for j, blk in enumerate(row):
                n = int(np.count_nonzero(blk))
                if n:
                    out.append(f"block ({i},{j}): {n} entries")
        return out

    def dual(self) -> "BlockMap":
        """Transpose with e<->x on every leg and the two slot vectors exchanged."""
        blocks = [
            [self.blocks[i][j].T[::-1, ::-1].copy() for i in range(len(self.target))]
            for j in range(len(self.source))
        ]
        return BlockMap(self.target, self.source, blocks)

    def parity_violations(self, expected: int) -> list[str]:
        out = []
        for i, row in enumerate(self.blocks):
            for j, blk in enumerate(row):
                if blk.any() and (self.target[i].qparity() - self.source[j].qparity()) % 2 != expected:
                    out.append(f"block ({i},{j}) {self.source[j]} -> {self.target[i]}")
        return out


# -- family transcriptions ---------------------------------------------------------

# Each family: region variable names, space builders and the six block maps.
# Rows of a block map are target blocks, columns are source blocks.

_P2_D1 = [["a0 etadot I(l+r) + c0 eta I(l+r)", "a0 etadot I(l+r)"], [0, 0]]
_P2_H0 = [
    ["1ab epsdot I(l+r) + 1aa epsdot I(l) S(r)", 0],
    ["a0 eps I(l+r) + 1ab epsdot I(l+r) + 1aa epsdot I(l) S(r)", 0],
]

FAMILIES: dict[str, dict] = {
    "P2": {
        "regions": ("l", "r"),
        "single": lambda k: Space(2, k),
        "term0": lambda k: (Space(0, k + 1), Space(2, k)),
        "term1": lambda k: (Space(0, k), Space(0, k)),
        "d0": [[0, "1bs I(l+r)"], [0, "1bs I(l+r)"]],
        "d1": _P2_D1,
        "F0": [["1as eta I(l+r) + 1bs eta I(l) S(r)"], ["1tt I(l+r)"]],
        "G0": [["1sa epsdot I(l+r)", "1tt I(l+r)"]],
        "H0": _P2_H0,
        "H1": [[0, 0], ["1sb I(l+r)", 0]],
    },
    "P0R": {
        "regions": ("l", "r", "c"),
        "single": lambda k: Space(0, k),
        "term0": lambda k: (Space(0, k + 2), Space(0, k)),
        "term1": lambda k: (Space(0, k + 1), Space(0, k + 1)),
        "d0": [[0, "a0 etadot I(l+r+c)"], [0, "a0 etadot I(l+r+c)"]],
        "d1": [["a0 Delta I(l+r+c)", "a0 1 etadot I(l+r+c)"], [0, 0]],
        "F0": [
            [
                "a0 eta eta I(l+r+c) + a0 etadot eta I(l) S(r) I(c) + 1bb etadot eta I(l+r) S(c)"
                " + 1ab etadot eta I(l+r+c) + 1ba eta eta I(l+r) S(c) + 1ba etadot eta I(l) S(r) S(c)"
            ],
            [0],
        ],
        "G0": [["a0 epsdot epsdot I(l+r+c) + 1ba epsdot epsdot I(l+r) S(c)", 0]],
        "H0": [
            ["a0 eps 1 I(l+r+c) + 1ab ee.m I(l+r+c) + a0 ee.m I(l) S(r+c)", 0],
            ["a0 ex.m I(l+r+c) + 1ab ee.m I(l+r+c) + a0 ee.m I(l) S(r+c)", 0],
        ],
        "H1": [[0, 0], [0, "a0 eps I(l+r+c)"]],
    },
    "P0L": {
        "regions": ("c", "l", "r"),
        "single": lambda k: Space(0, k),
        "term0": lambda k: (Space(0, k + 2), Space(0, k)),
        "term1": lambda k: (Space(0, k + 1), Space(0, k + 1)),
        "d0": [[0, "a0 etadot I(c+l+r) + c0 eta I(c+l+r)"], [0, "a0 etadot I(c+l+r) + c0 eta I(c+l+r)"]],
        "d1": [["a0 1 etadot I(c+l+r) + c0 1 eta I(c+l+r)", "a0 Delta I(c+l+r)"], [0, 0]],
        "F0": [
            [
                "1ab etadot eta I(c+l+r) + 1aa eta eta I(c+l+r) + 1aa etadot eta S(c) I(l+r)"
                " + a0 etadot eta I(c+l) S(r) + 1ba eta eta I(c+l) S(r) + 1ba etadot eta S(c) I(l) S(r)"
            ],
            [0],
        ],
        "G0": [
            [
                "a0 epsdot epsdot I(c+l+r) + 1ba eps epsdot I(c+l+r) + 1ba epsdot eps I(c+l+r)"
                " + 1ba epsdot epsdot S(c) I(l+r)",
                0,
            ]
        ],
        "H0": [
            ["1bb ex.m I(c+l+r) + 1ab eta epsdot epsdot I(c+l+r) + a0 m I(c+l) S(r)", 0],
            ["1aa 1 eps I(c+l+r) + 1bb eps 1 I(c+l+r) + 1ab eta epsdot epsdot I(c+l+r) + a0 m I(c+l) S(r)", 0],
        ],
        "H1": [[0, 0], ["a0 eps I(c+l+r) + a0 epsdot I(c+l) S(r) + 1ba eps I(c+l) S(r)", 0]],
    },
    "P0C": {
        "regions": ("l", "r"),
        "single": lambda k: Space(0, k + 1),
        "term0": lambda k: (Space(0, k + 3), Space(0, k + 1)),
        "term1": lambda k: (Space(0, k + 2), Space(0, k + 2)),
        "d0": [[0, "a0 Delta I(l+r)"], [0, "a0 Delta I(l+r)"]],
        "d1": [["a0 1 Delta I(l+r)", "a0 Delta 1 I(l+r)"], [0, 0]],
        "F0": [
            [
                "a0 1 eta eta I(l+r) + 1ab [1 eta 1 ; Delta] I(l+r) + a0 [1 eta 1 ; Delta] I(l) S(r)"
            ],
            [0],
        ],
        "G0": [["a0 1 epsdot epsdot I(l+r) + a0 epsdot 1 epsdot I(l+r) + a0 epsdot epsdot 1 I(l+r)", 0]],
        "H0": [
            ["a0 1 1 eps I(l+r) + 1ab m3 eta I(l+r) + a0 m3 eta I(l) S(r)", 0],
            ["a0 1 ex.m I(l+r) + 1ab m3 eta I(l+r) + a0 m3 eta I(l) S(r)", 0],
        ],
        "H1": [[0, 0], [0, "a0 1 eps I(l+r)"]],
    },
    "Pm2": {
        "regions": ("l", "r"),
        "single": lambda k: Space(-2, k),
        "term0": lambda k: (Space(0, k + 1), Space(-2, k)),
        "term1": lambda k: (Space(0, k), Space(0, k)),
        "d0": [[0, "1bt I(l+r)"], [0, "1bt I(l+r)"]],
        "d1": _P2_D1,
        "F0": [["1at eta I(l+r) + 1bt eta I(l) S(r)"], ["1ss I(l+r)"]],
        "G0": [["1ta epsdot I(l+r)", "1ss I(l+r)"]],
        "H0": _P2_H0,
        "H1": [[0, 0], ["1tb I(l+r)", 0]],
    },
}

_ALIASES = {
    "P2": "P2", "P₂": "P2", "P_2": "P2",
    "P0R": "P0R", "P₀^R": "P0R", "P0^R": "P0R",
    "P0L": "P0L", "P₀^L": "P0L", "P0^L": "P0L",
    "P0C": "P0C", "P₀^C": "P0C", "P0^C": "P0C",
    "Pm2": "Pm2", "P-2": "Pm2", "P₋₂": "Pm2", "P_-2": "Pm2",
}


def _family_name(name: str) -> str:
    try:
        return _ALIASES[name]
    except KeyError:
        raise UnknownFamily(name) from None


@dataclass
class FamilyInstance:
    family: str
    regions: dict[str, int]
    single: Space
    term0: tuple[Space, ...]
    term1: tuple[Space, ...]
    maps: dict[str, BlockMap]

    @property
    def label(self) -> str:
        inner = ",".join(f"{k}={v}" for k, v in self.regions.items())
        return f"{self.family}({inner})"

    def __getattr__(self, name):
        maps = self.__dict__.get("maps", {})
        if name in maps:
            return maps[name]
        raise AttributeError(name)


def build_family(family: str, l: int = 0, r: int = 0, c: int = 0, splits: Mapping[str, int] | None = None) -> FamilyInstance:
    """Materialize every block map of a family at the given region counts.

    ``splits`` is accepted for symmetry with the saddle checks, which supply
    their own region splits; it only has to agree with the region totals.
    """
    name = _family_name(family)
    fam_def = FAMILIES[name]
    if min(l, r, c) < 0:
        raise ValueError("region counts must be non-negative")
    regions = {"l": l, "r": r, "c": c}
    regions = {k: regions[k] for k in fam_def["regions"]}
    if name in ("P2", "P0C", "Pm2") and c:
        raise ValueError(f"{name} has no region c")
    if splits:
        for reg, total in regions.items():
            parts = [v for k, v in splits.items() if k in (reg + "e", reg + "n")]
            if parts and sum(parts) != total:
                raise ValueError(f"splits of region {reg} do not add up to {total}")
    k = sum(regions.values())
    single = (fam_def["single"](k),)
    term0, term1 = fam_def["term0"](k), fam_def["term1"](k)
    typing = {
        "d0": (term0, term1),
        "d1": (term1, term0),
        "F0": (single, term0),
        "G0": (term0, single),
        "H0": (term0, term1),
        "H1": (term1, term0),
    }
    maps = {key: BlockMap.from_text(fam_def[key], src, tgt, regions) for key, (src, tgt) in typing.items()}
    return FamilyInstance(name, regions, single[0], term0, term1, maps)


# -- strong deformation retraction -------------------------------------------------

IDENTITIES = ("d0F0=0", "G0d1=0", "G0F0=id", "F0G0+id=d1H0+H1d0", "id=d0H1+H0d1")


def verify_sdr(fi: FamilyInstance) -> dict[str, list[str]]:
    """Check the five identities by full evaluation; empty witness list = pass."""
    m = fi.maps
    single = (fi.single,)
    zero_st1 = BlockMap.from_text([[0]] * len(fi.term1), single, fi.term1, {})
    zero_t1s = BlockMap.from_text([[0] * len(fi.term1)], fi.term1, single, {})
    id0, id1, ids = BlockMap.identity(fi.term0), BlockMap.identity(fi.term1), BlockMap.identity(single)
    return {
        "d0F0=0": (m["d0"] @ m["F0"]).difference(zero_st1),
        "G0d1=0": (m["G0"] @ m["d1"]).difference(zero_t1s),
        "G0F0=id": (m["G0"] @ m["F0"]).difference(ids),
        "F0G0+id=d1H0+H1d0": (m["F0"] @ m["G0"] + id0).difference(m["d1"] @ m["H0"] + m["H1"] @ m["d0"]),
        "id=d0H1+H0d1": id1.difference(m["d0"] @ m["H1"] + m["H0"] @ m["d1"]),
    }


def check_parities(fi: FamilyInstance) -> list[str]:
    """Quantum-parity consistency of every block after the Z/2 collapse."""
    expected = {"d0": 1, "d1": 1, "H0": 1, "H1": 1, "F0": 0, "G0": 0}
    out = []
    for key, want in expected.items():
        out += [f"{key} {w}" for w in fi.maps[key].parity_violations(want)]
    return out


# -- saddle transcriptions ---------------------------------------------------------


@dataclass(frozen=True)
class SaddleCase:
    family: str
    name: str
    variables: tuple[str, ...]
    source: Mapping[str, str]
    target_family: str
    target: Mapping[str, str]
    d: str
    d_top: str
    reconstructed: bool = False


def _case(family, name, variables, source, target_family, target, d, d_top, reconstructed=False):
    return SaddleCase(family, name, tuple(variables.split()), source, target_family, target, d, d_top, reconstructed)


def _split_cases() -> list[SaddleCase]:
    """Transcribed saddle cases.

    For a circle split off an arc, the ``_e`` circles picked out by Sigma end
    up nested inside the new circle, so the target instance counts them in the
    new circle's region (the printed leg order keeps that block contiguous).
    """
    cases = []
    for fam, bs, suffix in (("P2", "1bs", "2"), ("Pm2", "1bt", "-2")):
        cases += [
            _case(fam, "split-l", "l re rn", {"l": "l", "r": "re+rn"}, fam, {"l": "l+1+re", "r": "rn"},
                  "a0 etadot I(l+re+rn)",
                  "a0 1 etadot I(l+re+rn) + c0 1 etadot I(l) S(re) I(rn)"),
            _case(fam, "split-r", "ln le r", {"l": "ln+le", "r": "r"}, fam, {"l": "ln", "r": "le+r+1"},
                  "a0 I(ln+le+r) etadot",
                  "a0 1 I(ln+le+r) etadot + c0 1 I(ln+le+r) eta + c0 1 I(ln) S(le) I(r) etadot"),
            _case(fam, "R" + suffix, "ln le r", {"l": "ln+le", "r": "r"}, "P0R", {"l": "ln", "r": "r", "c": "le"},
                  f"{bs} I(ln) T(le,r)",
                  "a0 etadot 1 I(ln) T(le,r) + c0 eta 1 I(ln) T(le,r) + c0 etadot 1 I(ln) [T(le,r) ; S(le) I(r)]"),
            _case(fam, "L" + suffix, "l re rn", {"l": "l", "r": "re+rn"}, "P0L", {"c": "re", "l": "l", "r": "rn"},
                  f"{bs} T(l,re) I(rn)",
                  "a0 etadot 1 T(l,re) I(rn) + c0 etadot 1 [T(l,re) ; I(l) S(re)] I(rn)"),
        ]
    cases += [
        _case("P0R", "split-l-left", "l re rn c", {"l": "l", "r": "re+rn", "c": "c"},
              "P0R", {"l": "l+1+re", "r": "rn", "c": "c"},
              "a0 etadot I(l+re+rn+c) + c0 etadot I(l) S(re) I(rn+c)",
              "a0 1 1 etadot I(l+re+rn+c) + c0 1 1 etadot I(l) S(re) I(rn+c)"),
        _case("P0R", "split-r-right", "ln le r c", {"l": "ln+le", "r": "r", "c": "c"},
              "P0R", {"l": "ln", "r": "le+r+1", "c": "c"},
              "a0 I(ln+le) etadot I(r+c) + c0 I(ln+le) eta I(r+c) + c0 I(ln) S(le) etadot I(r+c)",
              "a0 1 1 I(ln+le) etadot I(r+c) + c0 1 1 I(ln+le) eta I(r+c) + c0 1 1 I(ln) S(le) etadot I(r+c)"),
        _case("P0R", "split-r-left", "l r ce cn", {"l": "l", "r": "r", "c": "ce+cn"},
              "P0R", {"l": "l", "r": "r+1+ce", "c": "cn"},
              "a0 I(l+r) etadot I(ce+cn) + c0 I(l+r) etadot S(ce) I(cn)",
              "a0 eta epsdot 1 I(l+r) etadot I(ce+cn) + a0 etadot epsdot 1 I(l+r) eta I(ce+cn)"
              " + a0 etadot eps 1 I(l+r) etadot I(ce+cn)"),
        _case("P0R", "split-c-right", "l rn re c", {"l": "l", "r": "rn+re", "c": "c"},
              "P0R", {"l": "l", "r": "rn", "c": "re+c+1"},
              "a0 I(l+rn+re+c) etadot + c0 I(l+rn+re+c) eta + c0 I(l+rn) S(re) I(c) etadot",
              "a0 eta epsdot 1 I(l+rn+re+c) etadot + a0 etadot epsdot 1 I(l+rn+re+c) eta"
              " + a0 etadot eps 1 I(l+rn+re+c) etadot"),
        _case("P0R", "2R", "l r c", {"l": "l", "r": "r", "c": "c"}, "P2", {"l": "l+c", "r": "r"},
              "1sa I(l) T(r,c)",
              "a0 epsdot 1 I(l) T(r,c) + c0 eps 1 I(l) T(r,c) + c0 epsdot 1 I(l) [T(r,c) ; I(r) S(c)]"),
        _case("P0R", "CR", "l re rn c", {"l": "l", "r": "re+rn", "c": "c"}, "P0C", {"l": "l+re", "r": "rn+c"},
              "a0 etadot I(l+re+rn+c) + c0 etadot I(l) S(re) I(rn+c) + c0 etadot I(l+re+rn) S(c)",
              "a0 etadot T(1,1) I(l+re+rn+c) + c0 etadot T(1,1) I(l) S(re) I(rn+c)"),
        _case("P0R", "-2R", "l r c", {"l": "l", "r": "r", "c": "c"}, "Pm2", {"l": "l+c", "r": "r"},
              "1ta I(l) T(r,c)",
              "a0 epsdot 1 I(l) T(r,c) + c0 eps 1 I(l) T(r,c) + c0 epsdot 1 I(l) [T(r,c) ; I(r) S(c)]"),
        _case("P0L", "split-c-left", "c le ln r", {"c": "c", "l": "le+ln", "r": "r"},
              "P0L", {"c": "c+1+le", "l": "ln", "r": "r"},
              "a0 etadot I(c+le+ln+r) + c0 etadot I(c) S(le) I(ln+r)",
              "a0 eta epsdot 1 etadot I(c+le+ln+r) + a0 etadot epsdot 1 eta I(c+le+ln+r)"
              " + a0 etadot eps 1 etadot I(c+le+ln+r)"),
        _case("P0L", "split-l-right", "cn ce l r", {"c": "cn+ce", "l": "l", "r": "r"},
              "P0L", {"c": "cn", "l": "ce+l+1", "r": "r"},
              "a0 I(cn+ce) etadot I(l+r) + c0 I(cn+ce) eta I(l+r) + c0 I(cn) S(ce) etadot I(l+r)",
              "a0 eta epsdot 1 I(cn+ce) etadot I(l+r) + a0 etadot epsdot 1 I(cn+ce) eta I(l+r)"
              " + a0 etadot eps 1 I(cn+ce) etadot I(l+r)"),
        _case("P0L", "split-l-left", "c l re rn", {"c": "c", "l": "l", "r": "re+rn"},
              "P0L", {"c": "c", "l": "l+1+re", "r": "rn"},
              "a0 I(c+l) etadot I(re+rn) + c0 I(c+l) etadot S(re) I(rn)",
              "a0 1 1 I(c+l) etadot I(re+rn) + c0 1 1 I(c+l) etadot S(re) I(rn)"),
        _case("P0L", "split-r-right", "c ln le r", {"c": "c", "l": "ln+le", "r": "r"},
              "P0L", {"c": "c", "l": "ln", "r": "le+r+1"},
              "a0 I(c+ln+le+r) etadot + c0 I(c+ln+le+r) eta + c0 I(c+ln) S(le) I(r) etadot",
              "a0 1 1 I(c+ln+le+r) etadot + c0 1 1 I(c+ln+le+r) eta + c0 1 1 I(c+ln) S(le) I(r) etadot"),
        _case("P0L", "2L", "c l r", {"c": "c", "l": "l", "r": "r"}, "P2", {"l": "l", "r": "c+r"},
              "1sa T(c,l) I(r)",
              "a0 epsdot 1 T(c,l) I(r) + c0 epsdot 1 [T(c,l) ; S(c) I(l)] I(r)"),
        _case("P0L", "CL", "c ln le r", {"c": "c", "l": "ln+le", "r": "r"}, "P0C", {"l": "c+ln", "r": "le+r"},
              "a0 etadot I(c+ln+le+r) + c0 eta I(c+ln+le+r) + c0 etadot S(c) I(ln+le+r)"
              " + c0 etadot I(c+ln) S(le) I(r)",
              "a0 1 1 etadot I(c+ln+le+r) + c0 1 1 eta I(c+ln+le+r) + c0 1 1 etadot I(c+ln) S(le) I(r)"),
        _case("P0L", "-2L", "c l r", {"c": "c", "l": "l", "r": "r"}, "Pm2", {"l": "l", "r": "c+r"},
              "1ta T(c,l) I(r)",
              "a0 epsdot 1 T(c,l) I(r) + c0 epsdot 1 [T(c,l) ; S(c) I(l)] I(r)"),
        _case("P0C", "split-l-circle", "l r", {"l": "l", "r": "r"}, "P0C", {"l": "l+1", "r": "r"},
              "a0 eta epsdot etadot I(l+r) + a0 etadot epsdot eta I(l+r) + a0 etadot eps etadot I(l+r)",
              "a0 eta epsdot 1 1 etadot I(l+r) + a0 etadot epsdot 1 1 eta I(l+r)"
              " + a0 etadot eps 1 1 etadot I(l+r)"),
        _case("P0C", "split-l-arc", "l re rn", {"l": "l", "r": "re+rn"}, "P0C", {"l": "l+1+re", "r": "rn"},
              "a0 1 etadot I(l+re+rn) + c0 1 etadot I(l) S(re) I(rn)",
              "a0 1 1 1 etadot I(l+re+rn) + c0 1 1 1 etadot I(l) S(re) I(rn)"),
        _case("P0C", "split-r-arc", "ln le r", {"l": "ln+le", "r": "r"}, "P0C", {"l": "ln", "r": "le+r+1"},
              "a0 1 I(ln+le+r) etadot + c0 1 I(ln+le+r) eta + c0 1 I(ln) S(le) I(r) etadot",
              "a0 1 1 1 I(ln+le+r) etadot + c0 1 1 1 I(ln+le+r) eta + c0 1 1 1 I(ln) S(le) I(r) etadot"),
        _case("P0C", "split-r-circle", "l r", {"l": "l", "r": "r"}, "P0C", {"l": "l", "r": "r+1"},
              "a0 eta epsdot I(l+r) etadot + a0 etadot epsdot I(l+r) eta + a0 etadot eps I(l+r) etadot",
              "a0 1 1 eta epsdot I(l+r) etadot + a0 1 1 etadot epsdot I(l+r) eta"
              " + a0 1 1 etadot eps I(l+r) etadot"),
        _case("P0C", "RC", "ln le rn re", {"l": "ln+le", "r": "rn+re"}, "P0R", {"l": "ln", "r": "le+rn", "c": "re"},
              "a0 epsdot I(ln+le+rn+re) + c0 epsdot I(ln) S(le) I(rn+re) + c0 epsdot I(ln+le+rn) S(re)",
              "a0 epsdot T(1,1) I(ln+le+rn+re) + c0 epsdot T(1,1) I(ln) S(le) I(rn+re)"),
        _case("P0C", "LC", "le ln re rn", {"l": "le+ln", "r": "re+rn"}, "P0L", {"c": "le", "l": "ln+re", "r": "rn"},
              "a0 epsdot I(le+ln+re+rn) + c0 eps I(le+ln+re+rn) + c0 epsdot S(le) I(ln+re+rn)"
              " + c0 epsdot I(le+ln) S(re) I(rn)",
              "a0 1 1 epsdot I(le+ln+re+rn) + c0 1 1 eps I(le+ln+re+rn) + c0 1 1 epsdot I(le+ln) S(re) I(rn)"),
    ]
    return cases


_EXTRA_TOP = {"P2": 1, "Pm2": 1, "P0R": 2, "P0L": 2, "P0C": 3}
_EXTRA_SINGLE = {"P2": 0, "Pm2": 0, "P0R": 0, "P0L": 0, "P0C": 1}


def _circle_cases() -> list[SaddleCase]:
    """Circle-circle splits inside one region (claimed via the Sigma identities)."""
    cases = []
    for fam, fam_def in FAMILIES.items():
        regs = fam_def["regions"]
        for reg in regs:
            variables = " ".join(regs)
            before = "+".join(regs[: regs.index(reg)]) or "0"
            after = "+".join(regs[regs.index(reg) + 1:]) or "0"
            lead_single = "1 " * _EXTRA_SINGLE[fam]
            lead_top = "1 " * _EXTRA_TOP[fam]
            # the first circle of the region splits into two adjacent circles
            body = f"I({before}) Delta I({reg}+{after})"
            src = {k: k for k in regs}
            src[reg] = f"{reg}+1"
            tgt = {k: k for k in regs}
            tgt[reg] = f"{reg}+2"
            cases.append(
                _case(fam, f"cc-split-{reg}", variables, src, fam, tgt,
                      f"a0 {lead_single}{body}", f"a0 {lead_top}{body}", reconstructed=True)
            )
    return cases


def _merge_of(cs: SaddleCase) -> SaddleCase:
    return SaddleCase(cs.family, cs.name.replace("split", "merge"), cs.variables, cs.source,
                      cs.target_family, cs.target, cs.d, cs.d_top, reconstructed=True)


SPLIT_CASES = _split_cases() + _circle_cases()
SADDLE_CASES: dict[tuple[str, str], SaddleCase] = {(cs.family, cs.name): cs for cs in SPLIT_CASES}
for _cs in SPLIT_CASES:
    if "split" in _cs.name:
        _m = _merge_of(_cs)
        SADDLE_CASES[(_m.family, _m.name)] = _m


def _instance(family: str, exprs: Mapping[str, str], env: Mapping[str, int]) -> FamilyInstance:
    regions = {k: _value(v, env) for k, v in exprs.items()}
    return _cached_family(family, tuple(sorted(regions.items())))


@lru_cache(maxsize=256)
def _cached_family(family: str, regions: tuple) -> FamilyInstance:
    return build_family(family, **dict(regions))


@dataclass
class SaddleReport:
    family: str
    case: str
    params: dict[str, int]
    reconstructed: bool
    failures: dict[str, list[str]]

    @property
    def ok(self) -> bool:
        return not any(self.failures.values())

    def row(self) -> str:
        flag = " (reconstructed)" if self.reconstructed else ""
        params = ",".join(f"{k}={v}" for k, v in self.params.items())
        return f"{self.family} {self.case}[{params}]{flag}: {'ok' if self.ok else 'FAIL'}"


_CASE_ALIASES = {
    ("P0C", "circle-split-left"): "split-l-circle",
    ("P0C", "circle-split-right"): "split-r-circle",
    ("P0C", "circle-merge-left"): "merge-l-circle",
    ("P0C", "circle-merge-right"): "merge-r-circle",
}


def verify_saddle_commutation(fi: FamilyInstance | str, saddle: str, params: Mapping[str, int]) -> SaddleReport:
    """Check ``G0 d~ = d G0`` and ``d~ F0 = F0 d`` for one saddle case.

    ``fi`` is the family the saddle starts from (split cases) or the family it
    returns to (merge cases); a family name is accepted as well.
    """
    family = _family_name(fi.family if isinstance(fi, FamilyInstance) else fi)
    saddle = _CASE_ALIASES.get((family, saddle), saddle)
    cs = SADDLE_CASES.get((family, saddle))
    if cs is None:
        raise UnknownSaddleCase(f"{family} has no saddle case {saddle!r}")
    env = dict(params)
    missing = [v for v in cs.variables if v not in env]
    if missing:
        raise ValueError(f"saddle {saddle} needs values for {missing}")
    src = _instance(cs.family, cs.source, env)
    tgt = _instance(cs.target_family, cs.target, env)
    if isinstance(fi, FamilyInstance) and fi.regions != src.regions and "merge" not in saddle:
        raise ValueError(f"{fi.label} does not match the case source {src.label}")
    d = BlockMap.from_text([[cs.d]], (src.single,), (tgt.single,), env)
    top = evaluate(cs.d_top, src.term0[0], tgt.term0[0], env)
    d_tilde = BlockMap.diagonal([top, d.blocks[0][0]], src.term0, tgt.term0)
    if "merge" in saddle:
        src, tgt, d, d_tilde = tgt, src, d.dual(), d_tilde.dual()
    failures = {
        "G0 d~ = d G0": (tgt.maps["G0"] @ d_tilde).difference(d @ src.maps["G0"]),
        "d~ F0 = F0 d": (d_tilde @ src.maps["F0"]).difference(tgt.maps["F0"] @ d),
        "parity": d.parity_violations(1) + d_tilde.parity_violations(1),
    }
    return SaddleReport(family, saddle, {v: env[v] for v in cs.variables}, cs.reconstructed, failures)


# -- parameter grids ---------------------------------------------------------------


def family_grid(lmax: int = 2, rmax: int = 2, cmax: int = 2) -> list[tuple[str, dict[str, int]]]:
    out = []
    for fam, fam_def in FAMILIES.items():
        bounds = {"l": lmax, "r": rmax, "c": cmax}
        regs = fam_def["regions"]
        for values in product(*(range(bounds[k] + 1) for k in regs)):
            out.append((fam, dict(zip(regs, values))))
    return out


def saddle_grid(max_total: int = 2) -> list[tuple[str, str, dict[str, int]]]:
    """Every case with every split whose source region total is at most ``max_total``."""
    out = []
    for (fam, name), cs in SADDLE_CASES.items():
        for values in product(range(max_total + 1), repeat=len(cs.variables)):
            env = dict(zip(cs.variables, values))
            exprs = cs.target if "merge" in name else cs.source
            if sum(_value(v, env) for v in exprs.values()) <= max_total:
                out.append((fam, name, env))
    return out


def verify_all(lmax: int = 2, rmax: int = 2, cmax: int = 2, max_total: int = 2) -> dict:
    """Run the identity and saddle grids; returns rows and failures."""
    sdr_rows, saddle_rows, failures = [], [], []
    for fam, regions in family_grid(lmax, rmax, cmax):
        fi = _cached_family(fam, tuple(sorted(regions.items())))
        res = verify_sdr(fi)
        res["parity"] = check_parities(fi)
        sdr_rows.append((fi.label, {k: not v for k, v in res.items()}))
        failures += [f"{fi.label} {k}: {w}" for k, ws in res.items() for w in ws]
    for fam, name, env in saddle_grid(max_total):
        rep = verify_saddle_commutation(fam, name, env)
        saddle_rows.append(rep)
        failures += [f"{rep.row()} {k}: {w}" for k, ws in rep.failures.items() for w in ws]
    return {"sdr": sdr_rows, "saddles": saddle_rows, "failures": failures}
