"""Cochain complexes of closures: (C+-, d+-) for S^3 and (C0, d0) for S^2 x S^1."""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable

from . import category
from .category import (
    DEFAULT_TABLES,
    CategoryTables,
    Gen,
    UnsupportedWinding,
    alpha,
    beta,
    sigma_gen,
    tau_gen,
    w,
)
from .diagram import (
    TangleDiagram,
    add_full_twist,
    arc_shift,
    crossing_signs,
    cube,
    loop_number,
    resolve,
    seam_linking,
)
from .gf2core import Bigrading, BigradedComplex, cohomology_dims
from .tqft import qdeg
from .twisted import TwistedComplex, build_twisted

__all__ = [
    "LoopNumberNotZero",
    "KhrTable",
    "complex_s3",
    "complex_s2s1",
    "khr",
    "collapse_z2",
    "s3_table",
    "s2s1_table",
    "long_sigma_cancels",
    "plain_reduced_khovanov",
    "loop0_factor_check",
    "twist_invariance_check",
]


class LoopNumberNotZero(ValueError):
    pass


@dataclass(frozen=True)
class KhrTable:
    """Bigraded dimensions; ``convention`` is 'khr' (h, Q-h) or 'complex' (h, Q)."""

    dims: dict
    convention: str = "khr"

    def rows(self) -> list[list[int]]:
        return [[h, q, n] for (h, q), n in sorted(self.dims.items()) if n]

    def total(self) -> int:
        return sum(self.dims.values())

    def to_json(self, collapsed: bool = False) -> dict:
        out = {"convention": self.convention, "dims": self.rows()}
        if collapsed:
            out["collapsed"] = [[h, q, n] for (h, q), n in sorted(collapse_z2(self).items())]
        return out

    def __str__(self):
        if not self.dims:
            return "0"
        parts = []
        for (h, q), n in sorted(self.dims.items()):
            parts.append(f"{'' if n == 1 else n}F[{h},{q}]")
        return " + ".join(parts)


# -- S^3 closures ---------------------------------------------------------------------


def _closure_sign(closure: str) -> str:
    if closure == "over":
        return "+"
    if closure == "under":
        return "-"
    raise ValueError(f"closure must be 'over' or 'under', not {closure!r}")


def _vertex_basis(t: TwistedComplex, bits: str, generators, extra: Bigrading):
    v = t.vertices[bits]
    n = len(v.legs)
    for g in generators:
        base = category.bigrading(g) + v.shift + extra
        for mask in range(1 << n):
            yield (bits, g, mask), Bigrading(base.h, base.q + qdeg(mask, n))


def _add(diff: dict, src, targets: Iterable):
    acc = diff.setdefault(src, set())
    for y in targets:
        acc ^= {y}


def complex_s3(t: TwistedComplex, closure: str, shift: tuple[int, int] | None = None,
               tables: CategoryTables = DEFAULT_TABLES, long_terms: bool = True) -> BigradedComplex:
    """The complex of the overpass ('over') or underpass ('under') closure."""
    sign = _closure_sign(closure)
    if t.sign != sign:
        raise ValueError(f"{closure} closure needs the twisted complex built with sign {sign!r}")
    if shift is None:
        shift = arc_shift(seam_linking(t.cube.diagram, closure))
    extra = Bigrading(*shift)
    basis = {}
    wgen = {}
    for bits in sorted(t.vertices):
        wgen[bits] = w(t.vertices[bits].winding, sign)
        for label, g in _vertex_basis(t, bits, [wgen[bits]], extra):
            basis[label] = g
    diff: dict = {}
    for (i, j), m in sorted(t.delta.items()):
        for g, tm in m.terms.items():
            if not tables.act_s3(g, wgen[i]):
                continue
            for mask, image in tm.entries.items():
                _add(diff, (i, wgen[i], mask), ((j, wgen[j], y) for y in image))
    if long_terms:
        for i, j, k, tm in _long_terms(t, wgen, tables):
            for mask, image in tm.entries.items():
                _add(diff, (i, wgen[i], mask), ((k, wgen[k], y) for y in image))
    return BigradedComplex(basis, {x: frozenset(v) for x, v in diff.items() if v})


def _long_terms(t: TwistedComplex, wgen: dict, tables: CategoryTables):
    """Yield (i, j, k, tensor map) for every nonzero mu3 contribution along a path i -> j -> k."""
    out_edges = defaultdict(list)
    for (i, j) in t.delta:
        out_edges[i].append(j)
    for i in sorted(out_edges):
        for j in sorted(out_edges[i]):
            for k in sorted(out_edges.get(j, ())):
                f1, f2 = t.delta[(i, j)], t.delta[(j, k)]
                for g1, t1 in f1.terms.items():
                    for g2, t2 in f2.terms.items():
                        res = tables.act3_s3(g2, g1, wgen[i])
                        if not res:
                            continue
                        if res != {wgen[k]}:
                            raise AssertionError(f"mu3 landed on {set(res)} instead of {wgen[k]}")
                        yield i, j, k, t2 @ t1


def long_sigma_cancels(d: TangleDiagram, closure: str) -> bool:
    """Do the Sigma-bearing long-differential terms cancel in total?"""
    sign = _closure_sign(closure)
    cb = cube(d)
    full = complex_s3(build_twisted(cb, sign), closure)
    bare = complex_s3(build_twisted(cb, sign, drop_sigma=list(cb.edges)), closure)
    return full.differential == bare.differential


def khr(c: BigradedComplex, check: bool = True) -> KhrTable:
    """Khr(h, q) = H(h, h + q)."""
    dims = cohomology_dims(c, check=check)
    return KhrTable({Bigrading(h, q - h): n for (h, q), n in dims.items()}, "khr")


def collapse_z2(k: KhrTable) -> dict:
    out: dict = defaultdict(int)
    for (h, q), n in k.dims.items():
        out[(h % 2, q % 2)] += n
    return dict(sorted(out.items()))


def s3_table(d: TangleDiagram, closure: str) -> KhrTable:
    sign = _closure_sign(closure)
    return khr(complex_s3(build_twisted(cube(d), sign), closure))


# -- S^2 x S^1 -------------------------------------------------------------------------


def _w0_generators(n: int) -> list[Gen]:
    if n == 0:
        return [alpha(0), beta(0)]
    if abs(n) == 2:
        return [sigma_gen(n, 0), tau_gen(n, 0)]
    raise UnsupportedWinding(f"no (W0, L_{n}) generators are tabulated")


def complex_s2s1(t: TwistedComplex, tables: CategoryTables = DEFAULT_TABLES) -> BigradedComplex:
    """(C0, d0): the W0 functor applied to (X, delta_-)."""
    if t.sign != "-":
        raise ValueError("the S2xS1 complex is built from delta_-")
    windings = {v.winding for v in t.vertices.values()}
    if any(n % 2 for n in windings):
        return BigradedComplex({}, {})
    bad = sorted(n for n in windings if abs(n) > 2)
    if bad:
        raise UnsupportedWinding(f"vertex windings {bad} are outside the tabulated range")
    basis = {}
    gens = {}
    for bits in sorted(t.vertices):
        gens[bits] = _w0_generators(t.vertices[bits].winding)
        for label, g in _vertex_basis(t, bits, gens[bits], Bigrading(0, 0)):
            basis[label] = g
    diff: dict = {}
    for (i, j), m in sorted(t.delta.items()):
        for g, tm in m.terms.items():
            for x in gens[i]:
                for y in tables.act_s2s1(g, x):
                    for mask, image in tm.entries.items():
                        _add(diff, (i, x, mask), ((j, y, z) for z in image))
    return BigradedComplex(basis, {x: frozenset(v) for x, v in diff.items() if v})


def s2s1_table(d: TangleDiagram) -> KhrTable:
    return khr(complex_s2s1(build_twisted(cube(d), "-")))


# -- independent reduced Khovanov complex ---------------------------------------------


def plain_reduced_khovanov(d: TangleDiagram) -> KhrTable:
    """Reduced Khovanov homology of the closure, computed from circle sets alone.

    Each resolution is the marked component (the closed-up arc, pinned to
    v-) plus free circles carrying v+/v-.  Standard normalization: the
    differential has bigrading (1, 0) and the unknot sits at (0, 0).
    """
    n_plus, n_minus = crossing_signs(d)
    m = len(d.crossings)
    circles = {}
    for idx in range(1 << m):
        bits = format(idx, f"0{m}b") if m else ""
        circles[bits] = sorted(resolve(d, bits).circles)
    basis = {}
    diff: dict = {}
    for bits, cs in circles.items():
        r = bits.count("1")
        for mask in range(1 << len(cs)):
            npos = len(cs) - bin(mask).count("1")  # bit set means v-
            q = (npos - (len(cs) - npos)) + r + n_plus - 2 * n_minus
            basis[(bits, mask)] = Bigrading(r - n_minus, q)
    for bits, cs in circles.items():
        for k in range(m):
            if bits[k] == "1":
                continue
            tgt = bits[:k] + "1" + bits[k + 1:]
            ct = circles[tgt]
            gone = [c for c in cs if c not in ct]
            new = [c for c in ct if c not in cs]
            for mask in range(1 << len(cs)):
                val = {c: (mask >> i) & 1 for i, c in enumerate(cs)}  # 1 = v-
                images = _plain_images(val, gone, new)
                for img in images:
                    tmask = sum(img[c] << i for i, c in enumerate(ct))
                    _add(diff, (bits, mask), [(tgt, tmask)])
    c = BigradedComplex(basis, {x: frozenset(v) for x, v in diff.items() if v})
    return KhrTable(_homology_10(c), "khr")


def _plain_images(val: dict, gone: list, new: list) -> list[dict]:
    """Frobenius algebra Z[x]/x^2 with v+ = 1, v- = x; the marked component is always x."""
    keep = {c: v for c, v in val.items() if c not in gone}
    if len(gone) == 2 and len(new) == 1:  # merge two free circles
        a, b = (val[c] for c in gone)
        if a and b:
            return []
        return [{**keep, new[0]: a | b}]
    if len(gone) == 1 and len(new) == 2:  # split a free circle
        a = val[gone[0]]
        if a:
            return [{**keep, new[0]: 1, new[1]: 1}]
        return [{**keep, new[0]: 1, new[1]: 0}, {**keep, new[0]: 0, new[1]: 1}]
    if len(gone) == 1 and not new:  # merge into the marked component (x * v)
        return [] if val[gone[0]] else [keep]
    if not gone and len(new) == 1:  # split off the marked component: x -> x (x) x
        return [{**keep, new[0]: 1}]
    raise ValueError(f"unexpected saddle: removed {gone}, added {new}")


def _homology_10(c: BigradedComplex) -> dict:
    """Homology of a complex whose differential has bigrading (1, 0)."""
    # regrade (h, q) -> (h, q + h) so that the differential has degree (1, 1)
    shifted = BigradedComplex({x: Bigrading(g.h, g.q + g.h) for x, g in c.basis.items()}, c.differential)
    return {Bigrading(h, q - h): n for (h, q), n in cohomology_dims(shifted).items()}


# -- theorems as properties ------------------------------------------------------------


@dataclass
class PropertyReport:
    name: str
    ok: bool
    details: dict = field(default_factory=dict)


def loop0_factor_check(d: TangleDiagram) -> PropertyReport:
    """dim H(C0)(h,q) = dim H(C+)(h,q) + dim H(C+)(h,q+2) for loop number 0."""
    if loop_number(d) != 0:
        raise LoopNumberNotZero(f"loop number is {loop_number(d)}")
    cb = cube(d)
    h0 = cohomology_dims(complex_s2s1(build_twisted(cb, "-")))
    hp = cohomology_dims(complex_s3(build_twisted(cb, "+"), "over"))
    keys = set(h0) | {Bigrading(h, q) for h, q in hp} | {Bigrading(h, q - 2) for h, q in hp}
    mismatches = {}
    for g in sorted(keys):
        want = hp.get(g, 0) + hp.get(Bigrading(g.h, g.q + 2), 0)
        if h0.get(g, 0) != want:
            mismatches[tuple(g)] = (h0.get(g, 0), want)
    return PropertyReport("loop-0 factorization", not mismatches,
                          {"H(C0)": _rows(h0), "H(C+)": _rows(hp), "mismatches": mismatches})


def twist_invariance_check(d: TangleDiagram, twists: int = 1, handedness: int = 1) -> PropertyReport:
    """Z2-collapsed Khr(S2xS1) is unchanged by inserting full twists at the seam."""
    base = s2s1_table(d)
    cur = d
    for _ in range(twists):
        cur = add_full_twist(cur, handedness)
    other = s2s1_table(cur)
    a, b = collapse_z2(base), collapse_z2(other)
    return PropertyReport("full-twist invariance", a == b,
                          {"before": base.rows(), "after": other.rows(), "collapsed": sorted(a.items())})


def _rows(dims: dict) -> list:
    return [[h, q, n] for (h, q), n in sorted(dims.items())]
