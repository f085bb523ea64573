"""The twisted complex of a tangle diagram and the relations its maps satisfy.

An :class:`EdgeMap` is a morphism ``L_n (x) A^{legs} -> L_m (x) A^{legs'}``
written as a sum of (generator, tensor map) terms.  Composition multiplies
generators with :func:`category.mu2` and composes the tensor parts.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Mapping

from . import tqft
from .category import DEFAULT_TABLES, CategoryTables, Gen, UndeterminedProduct, a, bigrading, c, p, q
from .diagram import CubeOfResolutions, Saddle
from .gf2core import Bigrading
from .tqft import LegSet, TensorMap, legset

__all__ = [
    "check_edge_gradings",
    "UnknownCircle",
    "EdgeMap",
    "Vertex",
    "TwistedComplex",
    "winding_generators",
    "saddle_map",
    "build_twisted",
    "check_delta_squared",
    "cup",
    "cap",
    "verify_bar_natan",
    "verify_cup_cap_commute",
]


class UnknownCircle(KeyError):
    pass


Obj = tuple  # (winding, LegSet)


@dataclass(frozen=True, eq=False)
class EdgeMap:
    """Sum of generator (x) tensor-map terms between two (winding, legs) objects."""

    source: Obj
    target: Obj
    terms: Mapping[Gen, TensorMap] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for g, t in self.terms.items():
            if (g.src, g.tgt) != (self.source[0], self.target[0]):
                raise ValueError(f"generator {g} does not run {self.source[0]} -> {self.target[0]}")
            if (t.source, t.target) != (tuple(self.source[1]), tuple(self.target[1])):
                raise tqft.LegSetMismatch(f"tensor part of {g} has the wrong legs")
            if not t.is_zero():
                clean[g] = t
        object.__setattr__(self, "terms", clean)

    @classmethod
    def single(cls, g: Gen, t: TensorMap) -> "EdgeMap":
        return cls((g.src, legset(t.source)), (g.tgt, legset(t.target)), {g: t})

    @classmethod
    def zero(cls, source: Obj, target: Obj) -> "EdgeMap":
        return cls(source, target, {})

    @classmethod
    def identity(cls, obj: Obj) -> "EdgeMap":
        return cls(obj, obj, {a(obj[0]): tqft.identity(obj[1])})

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "EdgeMap") -> "EdgeMap":
        if (self.source, self.target) != (other.source, other.target):
            raise tqft.LegSetMismatch("cannot add edge maps between different objects")
        out = dict(self.terms)
        for g, t in other.terms.items():
            out[g] = out[g] + t if g in out else t
        return EdgeMap(self.source, self.target, out)

    def compose(self, other: "EdgeMap", tables: CategoryTables = DEFAULT_TABLES) -> "EdgeMap":
        """self after other."""
        if other.target != self.source:
            raise tqft.LegSetMismatch(f"cannot compose: {other.target} != {self.source}")
        out: dict = {}
        for g2, t2 in self.terms.items():
            for g1, t1 in other.terms.items():
                gens = tables.mu2(g2, g1)
                if not gens:
                    continue
                t = t2 @ t1
                if t.is_zero():
                    continue
                for g in gens:
                    out[g] = out[g] + t if g in out else t
        return EdgeMap(other.source, self.target, out)

    def __matmul__(self, other: "EdgeMap") -> "EdgeMap":
        return self.compose(other)

    def __eq__(self, other):
        if not isinstance(other, EdgeMap):
            return NotImplemented
        return (self.source, self.target) == (other.source, other.target) and self.terms == other.terms

    def __hash__(self):
        return hash((self.source, self.target, frozenset(self.terms)))

    def bigrading_violations(self, expected: Bigrading = Bigrading(0, -1)) -> list[str]:
        """Terms whose generator grading plus tensor q-degree differs from ``expected``."""
        bad = []
        for g, t in sorted(self.terms.items()):
            deg = t.degree()
            total = bigrading(g) + Bigrading(0, deg)
            if total != expected:
                bad.append(f"{g}: {tuple(total)}")
        return bad

    def describe(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"{g} (x) [{len(t.entries)} cols]" for g, t in sorted(self.terms.items()))


# -- building blocks ---------------------------------------------------------------


def winding_generators(sign: str) -> tuple[str, str]:
    """Orientation signs of (p, q) used by delta_+ ('+') or delta_- ('-')."""
    if sign == "+":
        return "-", "+"
    if sign == "-":
        return "+", "-"
    raise ValueError(f"sign must be '+' or '-', not {sign!r}")


def cup(n: int, legs: Iterable, new) -> EdgeMap:
    """a_n eta: create the circle ``new``."""
    legs = legset(legs)
    if new in legs:
        raise ValueError(f"circle {new!r} already present")
    return EdgeMap.single(a(n), tqft.unit(legs, new))


def cap(n: int, legs: Iterable, circle) -> EdgeMap:
    """a_n epsilon: remove ``circle``."""
    legs = legset(legs)
    if circle not in legs:
        raise UnknownCircle(circle)
    return EdgeMap.single(a(n), tqft.counit(legs, circle))


def _split_map(kind: str, n: int, legs: LegSet, new, enclosed, include_sigma=True) -> EdgeMap:
    """R+ or L+ splitting ``new`` off the arc, with Sigma over ``enclosed``."""
    eta_dot = tqft.unit_dot(legs, new)
    terms = {a(n): eta_dot}
    c_part = None
    if kind == "R":
        c_part = tqft.unit(legs, new)
    if include_sigma and enclosed:
        s = eta_dot @ tqft.sigma(legs, enclosed)
        c_part = s if c_part is None else c_part + s
    if c_part is not None:
        terms[c(n)] = c_part
    return EdgeMap((n, legs), (n, eta_dot.target), terms)


def _merge_map(kind: str, n: int, legs: LegSet, old, enclosed, include_sigma=True) -> EdgeMap:
    """R- or L- merging ``old`` into the arc, with Sigma over ``enclosed``."""
    eps_dot = tqft.counit_dot(legs, old)
    terms = {a(n): eps_dot}
    c_part = None
    if kind == "R":
        c_part = tqft.counit(legs, old)
    if include_sigma and enclosed:
        s = eps_dot @ tqft.sigma(legs, enclosed)
        c_part = s if c_part is None else c_part + s
    if c_part is not None:
        terms[c(n)] = c_part
    return EdgeMap((n, legs), (n, eps_dot.target), terms)


def saddle_map(s: Saddle, legs: LegSet, sign: str, include_sigma: bool = True) -> EdgeMap:
    """The differential assigned to saddle ``s`` acting on ``legs``."""
    n = s.source_winding
    legs = legset(legs)
    if s.kind == "C+":
        (old,), (n1, n2) = s.removed, s.added
        return EdgeMap.single(a(n), tqft.comultiply(legs, old, n1, n2))
    if s.kind == "C-":
        (o1, o2), (new,) = s.removed, s.added
        return EdgeMap.single(a(n), tqft.multiply(legs, o1, o2, new))
    if s.kind in ("R+", "L+"):
        return _split_map(s.kind[0], n, legs, s.added[0], s.enclosed, include_sigma)
    if s.kind in ("R-", "L-"):
        return _merge_map(s.kind[0], n, legs, s.removed[0], s.enclosed, include_sigma)
    psign, qsign = winding_generators(sign)
    if s.kind == "W+":
        return EdgeMap.single(p(n + 2, n, psign), tqft.identity(legs))
    if s.kind == "W-":
        return EdgeMap.single(q(n - 2, n, qsign), tqft.identity(legs))
    raise ValueError(f"unknown saddle kind {s.kind!r}")


# -- the twisted complex -----------------------------------------------------------


@dataclass(frozen=True)
class Vertex:
    winding: int
    legs: LegSet
    shift: Bigrading

    @property
    def obj(self) -> Obj:
        return (self.winding, self.legs)


@dataclass(frozen=True, eq=False)
class TwistedComplex:
    cube: CubeOfResolutions
    sign: str
    vertices: dict  # bits -> Vertex
    delta: dict  # (bits_i, bits_j) -> EdgeMap

    @property
    def shift_T(self) -> Bigrading:
        return Bigrading(-self.cube.m_minus, self.cube.m_plus - 3 * self.cube.m_minus)


def build_twisted(cb: CubeOfResolutions, sign: str = "-", drop_sigma: Iterable = ()) -> TwistedComplex:
    """Assemble (X, delta_sign); ``drop_sigma`` lists edges whose Sigma terms are omitted."""
    drop = set(drop_sigma)
    hT, qT = -cb.m_minus, cb.m_plus - 3 * cb.m_minus
    vertices = {}
    for bits, t in cb.vertices.items():
        r = bits.count("1")
        vertices[bits] = Vertex(t.winding, t.legs, Bigrading(r + hT, 2 * r + qT))
    delta = {}
    for edge, s in cb.edges.items():
        m = saddle_map(s, vertices[edge[0]].legs, sign, include_sigma=edge not in drop)
        if m.target != vertices[edge[1]].obj:
            raise AssertionError(f"edge {edge} lands in {m.target}, expected {vertices[edge[1]].obj}")
        delta[edge] = m
    return TwistedComplex(cb, sign, vertices, delta)


def check_edge_gradings(t: TwistedComplex) -> list[str]:
    """Every term of every edge map must have bigrading (0, -1)."""
    out = []
    for edge, m in sorted(t.delta.items()):
        out += [f"{edge}: {w}" for w in m.bigrading_violations()]
    return out


@dataclass
class SquareReport:
    checked: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def check_delta_squared(t: TwistedComplex, tables: CategoryTables = DEFAULT_TABLES) -> SquareReport:
    """Check that both paths around every square of the cube agree."""
    rep = SquareReport()
    for i, j1, j2, k in t.cube.squares():
        left = t.delta[(j1, k)].compose(t.delta[(i, j1)], tables)
        right = t.delta[(j2, k)].compose(t.delta[(i, j2)], tables)
        rep.checked += 1
        if left != right:
            rep.failures.append((i, j1, j2, k))
    return rep


# -- Bar-Natan relations and Reidemeister homotopies --------------------------------


def _eq(x: EdgeMap, y: EdgeMap) -> bool:
    return x == y


def _others(prefix: str, count: int) -> list:
    return [f"{prefix}{i}" for i in range(count)]


@dataclass
class RelationCheck:
    relation: str
    case: str
    params: dict
    ok: bool

    def row(self) -> str:
        params = ",".join(f"{k}={v}" for k, v in self.params.items())
        return f"{self.relation:<28} {self.case:<34} {params:<28} {'pass' if self.ok else 'FAIL'}"


class _Block:
    """A matrix of EdgeMaps between direct sums of objects (rows = targets)."""

    def __init__(self, sources: list, targets: list, entries: dict | None = None):
        self.sources = sources
        self.targets = targets
        self.entries = {k: v for k, v in (entries or {}).items() if not v.is_zero()}

    def __matmul__(self, other: "_Block") -> "_Block":
        if other.targets != self.sources:
            raise tqft.LegSetMismatch("block shapes do not compose")
        out: dict = {}
        for (i, k), f in self.entries.items():
            for (k2, j), g in other.entries.items():
                if k2 != k:
                    continue
                h = f @ g
                out[(i, j)] = out[(i, j)] + h if (i, j) in out else h
        return _Block(other.sources, self.targets, out)

    def __add__(self, other: "_Block") -> "_Block":
        out = dict(self.entries)
        for key, v in other.entries.items():
            out[key] = out[key] + v if key in out else v
        return _Block(self.sources, self.targets, out)

    def __eq__(self, other):
        keys = set(self.entries) | set(other.entries)
        for key in keys:
            x = self.entries.get(key)
            y = other.entries.get(key)
            if x is None or y is None or x != y:
                if not ((x is None or x.is_zero()) and (y is None or y.is_zero())):
                    return False
        return True

    @classmethod
    def identity(cls, objs: list) -> "_Block":
        return cls(objs, objs, {(i, i): EdgeMap.identity(o) for i, o in enumerate(objs)})

    @classmethod
    def zero(cls, sources: list, targets: list) -> "_Block":
        return cls(sources, targets, {})


def _rel1_cases(n: int, r: int):
    """(case name, legs of P_n(r), d_A+, d_A-) for the three rel-1 configurations."""
    others = _others("o", r)
    base = legset(others + ["K"])
    plus = legset(list(base) + ["C"])
    yield (
        "arc on a circle",
        base,
        EdgeMap.single(a(n), tqft.comultiply(base, "K", "K", "C")),
        EdgeMap.single(a(n), tqft.multiply(plus, "K", "C", "K")),
    )
    legs = legset(others)
    for side in ("R", "L"):
        yield (
            f"arc component, {'right' if side == 'R' else 'left'} side",
            legs,
            _split_map(side, n, legs, "C", ()),
            _merge_map(side, n, legset(list(legs) + ["C"]), "C", ()),
        )


def _rel2_cases(n: int, r: int, sign: str):
    """Yield (case, base obj, d_A+, d_B-, d_=||, d_||=) for every rel-2 configuration.

    The base object carries arcs A and B; C is the circle created between
    them.  ``r`` circles are distributed between enclosed and non-enclosed
    regions in all possible ways.
    """
    psign, qsign = winding_generators(sign)
    for re_ in range(r + 1):
        enc = _others("e", re_)
        non = _others("n", r - re_)
        legs = legset(enc + non)
        withC = legset(list(legs) + ["C"])
        split = {"re": re_, "rn": r - re_}
        # both strands on the arc component; the =|| saddle splits D off the arc
        for side_c, side_d, label in (
            ("L", "R", "arc/arc, kinds as printed (case 1)"),
            ("R", "L", "arc/arc, kinds as printed (case 2)"),
            ("R", "R", "arc/arc, right-right reading"),
            ("L", "L", "arc/arc, left-left reading"),
        ):
            dA = _split_map(side_c, n, legs, "C", ())
            dB = _merge_map(side_c, n, withC, "C", ())
            dd = _split_map(side_d, n, legs, "D", enc)
            du = _merge_map(side_d, n, legset(list(legs) + ["D"]), "D", enc)
            yield label, split, (n, legs), dA, dB, dd, du
        if re_ == 0:
            # winding-changing configurations (no enclosed circles involved)
            dA = _split_map("R", n, legs, "C", ())
            dB = _merge_map("L", n, withC, "C", ())
            dd = EdgeMap.single(p(n + 2, n, psign), tqft.identity(legs))
            du = EdgeMap.single(q(n, n + 2, qsign), tqft.identity(legs))
            yield f"split right, merge left, W+W- (delta{sign})", split, (n, legs), dA, dB, dd, du
            dA = _split_map("L", n, legs, "C", ())
            dB = _merge_map("R", n, withC, "C", ())
            dd = EdgeMap.single(q(n - 2, n, qsign), tqft.identity(legs))
            du = EdgeMap.single(p(n, n - 2, psign), tqft.identity(legs))
            yield f"split left, merge right, W-W+ (delta{sign})", split, (n, legs), dA, dB, dd, du
        # A on a circle K (enclosing ``enc``), B on the arc
        legsK = legset(list(legs) + ["K"])
        withCK = legset(list(legsK) + ["C"])
        for side in ("R", "L"):
            dA = EdgeMap.single(a(n), tqft.comultiply(legsK, "K", "K", "C"))
            dB = _merge_map(side, n, withCK, "C", ())
            dd = _merge_map(side, n, legsK, "K", enc)
            du = _split_map(side, n, legs, "K", enc)
            yield f"circle/arc, merge {'right' if side == 'R' else 'left'}", split, (n, legsK), dA, dB, dd, du
        if re_ == 0:
            # A and B on distinct circles K1, K2
            legs2 = legset(list(legs) + ["K1", "K2"])
            with2 = legset(list(legs2) + ["C"])
            dA = EdgeMap.single(a(n), tqft.comultiply(legs2, "K1", "K1", "C"))
            dB = EdgeMap.single(a(n), tqft.multiply(with2, "C", "K2", "K2"))
            dd = EdgeMap.single(a(n), tqft.multiply(legs2, "K1", "K2", "K"))
            du = EdgeMap.single(a(n), tqft.comultiply(legset(list(legs) + ["K"]), "K", "K1", "K2"))
            yield "distinct circles", split, (n, legs2), dA, dB, dd, du
            # A and B on the same circle K: =|| splits K, ||= merges it back
            legs1 = legset(list(legs) + ["K"])
            with1 = legset(list(legs1) + ["C"])
            dA = EdgeMap.single(a(n), tqft.comultiply(legs1, "K", "K", "C"))
            dB = EdgeMap.single(a(n), tqft.multiply(with1, "C", "K", "K"))
            dd = EdgeMap.single(a(n), tqft.comultiply(legs1, "K", "K1", "K2"))
            du = EdgeMap.single(a(n), tqft.multiply(legset(list(legs) + ["K1", "K2"]), "K1", "K2", "K"))
            yield "same circle", split, (n, legs1), dA, dB, dd, du


def verify_bar_natan(max_regions: int = 3, windings: Iterable[int] = (0, 2)) -> list[RelationCheck]:
    """Evaluate every sphere, neck-cutting, 4-tube, R1 and R2 identity on full bases."""
    out: list[RelationCheck] = []

    def rec(rel, case, params, ok):
        out.append(RelationCheck(rel, case, params, bool(ok)))

    for n in windings:
        for r in range(max_regions + 1):
            legs = legset(_others("o", r))
            cu = cup(n, legs, "C")
            ca = cap(n, cu.target[1], "C")
            rec("sphere", "cap after cup", {"n": n, "r": r}, (ca @ cu).is_zero())
        for r in range(max_regions):
            for case, base, dAp, dAm in _rel1_cases(n, r):
                obj = (n, base)
                cu = cup(n, base, "C")
                ca = cap(n, cu.target[1], "C")
                idb = EdgeMap.identity(obj)
                idp = EdgeMap.identity(cu.target)
                prm = {"n": n, "r": r}
                rec("isotopy d_A- cup", case, prm, dAm @ cu == idb)
                rec("isotopy cap d_A+", case, prm, ca @ dAp == idb)
                rec("neck cutting", case, prm, (dAp @ ca) + (cu @ dAm) == idp)
                rec("neck cutting d_A- d_A+", case, prm, (dAm @ dAp).is_zero())
                # R1 with a negative crossing: F = cup, G = d_A-, H = cap, d0 = d_A+
                rec("R1- G d0 = 0", case, prm, (dAm @ dAp).is_zero())
                rec("R1- G F = id", case, prm, dAm @ cu == idb)
                rec("R1- H d0 = id", case, prm, ca @ dAp == idb)
                rec("R1- d0 H + F G = id", case, prm, (dAp @ ca) + (cu @ dAm) == idp)
                rec("R1- H F = 0", case, prm, (ca @ cu).is_zero())
                # R1 with a positive crossing: d0 = d_A-, F = d_A+, G = cap, H = cup
                rec("R1+ d0 F = 0", case, prm, (dAm @ dAp).is_zero())
                rec("R1+ G F = id", case, prm, ca @ dAp == idb)
                rec("R1+ F G + id = H d0", case, prm, (dAp @ ca) + idp == cu @ dAm)
                rec("R1+ d0 H = id", case, prm, dAm @ cu == idb)
        for sign in "+-":
            for r in range(max_regions - 1):
                for case, split, base, dA, dB, dd, du in _rel2_cases(n, r, sign):
                    prm = {"n": n, **split}
                    try:
                        _check_rel2(rec, case, prm, base, dA, dB, dd, du)
                    except UndeterminedProduct as exc:
                        rec("rel-2", case, prm, False)
                        raise exc
    return out


def _check_rel2(rec, case, prm, base, dA, dB, dd, du):
    n = base[0]
    withC = dA.target
    mid = dd.target
    cu = cup(n, base[1], "C")
    ca = cap(n, withC[1], "C")
    rec("rel-2 isotopy", case, prm, dB @ dA == du @ dd)
    tube = (dA @ ca) + (cu @ (du @ dd) @ ca) + (cu @ dB)
    rec("4-tube", case, prm, tube == EdgeMap.identity(withC))
    # R2 homotopy equivalence between (x_A, d) and (x_B, 0) = mid
    t0, t1, t2 = [base], [withC, mid], [base]
    d0 = _Block(t0, t1, {(0, 0): dA, (1, 0): dd})
    d1 = _Block(t1, t2, {(0, 0): dB, (0, 1): du})
    F = _Block([mid], t1, {(0, 0): cu @ du, (1, 0): EdgeMap.identity(mid)})
    G = _Block(t1, [mid], {(0, 0): dd @ ca, (0, 1): EdgeMap.identity(mid)})
    H1 = _Block(t1, t0, {(0, 0): ca})
    H2 = _Block(t2, t1, {(0, 0): cu})
    rec("R2 d1 d0 = 0", case, prm, d1 @ d0 == _Block.zero(t0, t2))
    rec("R2 d1 F = 0", case, prm, d1 @ F == _Block.zero([mid], t2))
    rec("R2 G d0 = 0", case, prm, G @ d0 == _Block.zero(t0, [mid]))
    rec("R2 H1 d0 = id", case, prm, H1 @ d0 == _Block.identity(t0))
    rec("R2 d1 H2 = id", case, prm, d1 @ H2 == _Block.identity(t2))
    rec("R2 G F = id", case, prm, G @ F == _Block.identity([mid]))
    rec("R2 d0 H1 + F G + H2 d1 = id", case, prm, (d0 @ H1) + (F @ G) + (H2 @ d1) == _Block.identity(t1))
    rec("R2 H1 F = 0", case, prm, H1 @ F == _Block.zero([mid], t0))


def verify_cup_cap_commute(max_regions: int = 2, n: int = 0, sign: str = "-") -> list[RelationCheck]:
    """Cups and caps of an untouched circle Z commute with every saddle differential."""
    out = []
    psign, qsign = winding_generators(sign)
    for r in range(max_regions + 1):
        for re_ in range(r + 1):
            enc = _others("e", re_)
            non = _others("n", r - re_)
            legs = legset(enc + non)
            for z_enclosed in (False, True):
                # each builder takes the untouched legs and the enclosed set
                saddles = []
                saddles.append(("C+", lambda L, E: EdgeMap.single(a(n), tqft.comultiply(legset(list(L) + ["K"]), "K", "K1", "K2"))))
                saddles.append(("C-", lambda L, E: EdgeMap.single(a(n), tqft.multiply(legset(list(L) + ["K1", "K2"]), "K1", "K2", "K"))))
                for side in "RL":
                    saddles.append((f"{side}+", lambda L, E, side=side: _split_map(side, n, legset(L), "S", E)))
                    saddles.append((f"{side}-", lambda L, E, side=side: _merge_map(side, n, legset(list(L) + ["S"]), "S", E)))
                saddles.append(("W+", lambda L, E: EdgeMap.single(p(n + 2, n, psign), tqft.identity(legset(L)))))
                saddles.append(("W-", lambda L, E: EdgeMap.single(q(n - 2, n, qsign), tqft.identity(legset(L)))))
                for name, build in saddles:
                    if z_enclosed and name[0] not in "RL":
                        continue
                    small = build(list(legs), enc)
                    big = build(list(legs) + ["Z"], enc + (["Z"] if z_enclosed else []))
                    s0, s1 = small.source, small.target
                    cu0 = cup(s0[0], s0[1], "Z")
                    cu1 = cup(s1[0], s1[1], "Z")
                    ca0 = cap(big.source[0], big.source[1], "Z")
                    ca1 = cap(big.target[0], big.target[1], "Z")
                    prm = {"re": re_, "rn": r - re_, "Z enclosed": z_enclosed}
                    out.append(RelationCheck("cup commutes", name, prm, big @ cu0 == cu1 @ small))
                    out.append(RelationCheck("cap commutes", name, prm, ca1 @ big == small @ ca0))
    return out
