"""Morphism generators of the formal category of the objects L_n and their operation tables.

Conventions
-----------
A generator ``Gen(kind, tgt, src)`` of a morphism space between L-objects
is a morphism from ``L_src`` to ``L_tgt`` (so ``r_{2,0}`` goes from L_0 to
L_2).  ``mu2(g2, g1)`` is the composite "g2 after g1".

Module generators use the same two indices: ``Gen("sigma", 2, 0)`` is
sigma_{2,0} in (W_0, L_2), ``Gen("alpha", 0, 0)`` is alpha_0, and
``Gen("w", n, n, "+")`` is the closure generator w_{n,+}.

The explicit product tables below are stated for windings in {0, 2}; every
other composable triple is obtained by translating all windings by a
common amount.  Compositions spanning a winding change of 4 (p after p, q
after q) are undetermined and raise :class:`UndeterminedProduct`.
"""
from __future__ import annotations

import copy
from dataclasses import dataclass
from itertools import product
from typing import Iterable

from .gf2core import Bigrading

__all__ = [
    "Gen",
    "NotComposable",
    "UndeterminedProduct",
    "UnsupportedWinding",
    "CategoryTables",
    "DEFAULT_TABLES",
    "a",
    "b",
    "c",
    "d",
    "r",
    "rbar",
    "s",
    "sbar",
    "p",
    "q",
    "w",
    "alpha",
    "beta",
    "sigma_gen",
    "tau_gen",
    "bigrading",
    "orientation",
    "mu2",
    "act_s3",
    "act3_s3",
    "act_s2s1",
    "verify_consistency",
]


@dataclass(frozen=True, order=True)
class Gen:
    kind: str
    tgt: int
    src: int
    sign: str = ""

    def shift(self, t: int) -> "Gen":
        return Gen(self.kind, self.tgt + t, self.src + t, self.sign)

    def __str__(self):
        sign = f"^({self.sign})" if self.sign else ""
        if self.kind in ("a", "b", "c", "d", "alpha", "beta"):
            return f"{self.kind}_{self.tgt}{sign}"
        if self.kind == "w":
            return f"w_{{{self.tgt},{self.sign}}}"
        return f"{self.kind}_{{{self.tgt},{self.src}}}{sign}"


class NotComposable(ValueError):
    pass


class UndeterminedProduct(ArithmeticError):
    """A composition whose value the tables deliberately leave open."""


class UnsupportedWinding(ValueError):
    pass


def a(n: int) -> Gen:
    return Gen("a", n, n)


def b(n: int) -> Gen:
    return Gen("b", n, n)


def c(n: int) -> Gen:
    return Gen("c", n, n)


def d(n: int) -> Gen:
    return Gen("d", n, n)


def r(tgt: int, src: int) -> Gen:
    return Gen("r", tgt, src)


def rbar(tgt: int, src: int) -> Gen:
    return Gen("rbar", tgt, src)


def s(tgt: int, src: int) -> Gen:
    return Gen("s", tgt, src)


def sbar(tgt: int, src: int) -> Gen:
    return Gen("sbar", tgt, src)


def p(tgt: int, src: int, sign: str) -> Gen:
    if tgt != src + 2:
        raise ValueError("p raises the winding by two")
    return Gen("p", tgt, src, sign)


def q(tgt: int, src: int, sign: str) -> Gen:
    if tgt != src - 2:
        raise ValueError("q lowers the winding by two")
    return Gen("q", tgt, src, sign)


def w(n: int, sign: str) -> Gen:
    return Gen("w", n, n, sign)


def alpha(n: int = 0) -> Gen:
    return Gen("alpha", n, n)


def beta(n: int = 0) -> Gen:
    return Gen("beta", n, n)


def sigma_gen(tgt: int, src: int = 0) -> Gen:
    return Gen("sigma", tgt, src)


def tau_gen(tgt: int, src: int = 0) -> Gen:
    return Gen("tau", tgt, src)


L_KINDS = {"a", "b", "c", "d", "r", "rbar", "s", "sbar", "p", "q"}
FUKAYA_KINDS = {"a", "c", "p", "q"}
W0_KINDS = {"alpha", "beta", "sigma", "tau"}

_GRADINGS = {
    "a": (0, 0),
    "b": (0, 0),
    "c": (0, -2),
    "d": (0, -2),
    "r": (0, -1),
    "rbar": (0, -1),
    "s": (0, -1),
    "sbar": (0, -1),
    "p": (0, -1),
    "q": (0, -1),
    "alpha": (0, 0),
    "beta": (0, -2),
    "sigma": (0, -1),
    "tau": (0, -1),
}

_ORIENT = {
    "a": 1,
    "b": -1,
    "c": -1,
    "d": 1,
    "r": -1,
    "rbar": -1,
    "s": 1,
    "sbar": 1,
    "alpha": -1,
    "beta": 1,
    "sigma": -1,
    "tau": 1,
    "w": 1,
}


def bigrading(g: Gen) -> Bigrading:
    if g.kind == "w":
        n = g.tgt
        if n % 2 == 0:
            h = n // 2 if g.sign == "+" else -n // 2
        else:
            h = (1 + n) // 2 if g.sign == "+" else (1 - n) // 2
        return Bigrading(h, 2 * n if g.sign == "+" else -2 * n)
    return Bigrading(*_GRADINGS[g.kind])


def orientation(g: Gen) -> int:
    if g.kind in ("p", "q"):
        return 1 if g.sign == "+" else -1
    return _ORIENT[g.kind]


Sum = frozenset  # formal GF(2) sum of generators


def _expand(g: Gen) -> list[Gen]:
    """Write p/q as sums of r/s generators; other generators are returned as is."""
    if g.kind == "p":
        names = ("r", "rbar") if g.sign == "-" else ("s", "sbar")
    elif g.kind == "q":
        names = ("s", "sbar") if g.sign == "+" else ("r", "rbar")
    else:
        return [g]
    return [Gen(k, g.tgt, g.src) for k in names]


def _xor_into(acc: set, terms: Iterable[Gen]) -> None:
    for t in terms:
        acc ^= {t}


class CategoryTables:
    """All product tables; copy and edit an instance to build negative controls."""

    def __init__(self):
        # composable pairs with windings in {0, 2}; identity products are implicit
        self.perturbed: dict[tuple[Gen, Gen], Gen] = {
            (b(0), c(0)): d(0),
            (c(0), b(0)): d(0),
            (sbar(0, 2), rbar(2, 0)): c(0),
            (r(0, 2), s(2, 0)): c(0),
            (r(0, 2), r(2, 0)): d(0),
            (rbar(0, 2), rbar(2, 0)): d(0),
            (s(0, 2), s(2, 0)): d(0),
            (sbar(0, 2), sbar(2, 0)): d(0),
            (r(2, 0), sbar(0, 2)): c(2),
            (s(2, 0), rbar(0, 2)): c(2),
            (r(2, 0), r(0, 2)): d(2),
            (rbar(2, 0), rbar(0, 2)): d(2),
            (s(2, 0), s(0, 2)): d(2),
            (sbar(2, 0), sbar(0, 2)): d(2),
            (rbar(2, 0), b(0)): sbar(2, 0),
            (s(2, 0), b(0)): r(2, 0),
            (sbar(0, 2), b(2)): r(0, 2),
            (rbar(0, 2), b(2)): s(0, 2),
            (b(2), r(2, 0)): sbar(2, 0),
            (b(2), s(2, 0)): rbar(2, 0),
            (b(0), sbar(0, 2)): rbar(0, 2),
            (b(0), r(0, 2)): s(0, 2),
        }
        # actions on the generators of (W_0, L_n), n in {0, +-2}
        self.unperturbed: dict[tuple[Gen, Gen], Gen] = {
            (c(0), alpha()): beta(),
            (sbar(0, 2), tau_gen(2)): beta(),
            (s(0, -2), tau_gen(-2)): beta(),
            (r(0, 2), sigma_gen(2)): beta(),
            (r(0, -2), sigma_gen(-2)): beta(),
            (s(2, 0), alpha()): sigma_gen(2),
            (rbar(2, 0), alpha()): tau_gen(2),
            (b(2), sigma_gen(2)): tau_gen(2),
            (sbar(-2, 0), alpha()): sigma_gen(-2),
            (rbar(-2, 0), alpha()): tau_gen(-2),
            (b(-2), sigma_gen(-2)): tau_gen(-2),
        }
        # the operations consumed by the S^2 x S^1 pipeline
        self.ops_s2s1: dict[tuple[Gen, Gen], Gen] = {
            (c(0), alpha()): beta(),
            (p(2, 0, "-"), alpha()): tau_gen(2),
            (p(2, 0, "+"), alpha()): sigma_gen(2),
            (q(-2, 0, "+"), alpha()): sigma_gen(-2),
            (q(-2, 0, "-"), alpha()): tau_gen(-2),
            (p(0, -2, "-"), sigma_gen(-2)): beta(),
            (p(0, -2, "+"), tau_gen(-2)): beta(),
            (q(0, 2, "+"), tau_gen(2)): beta(),
            (q(0, 2, "-"), sigma_gen(2)): beta(),
        }

    def copy(self) -> "CategoryTables":
        return copy.deepcopy(self)

    # -- L-morphism products -------------------------------------------------

    def mu2(self, g2: Gen, g1: Gen) -> Sum:
        """Composite g2 after g1 as a formal sum of generators."""
        if g2.kind not in L_KINDS or g1.kind not in L_KINDS:
            raise NotComposable(f"{g2} and {g1} are not both morphisms between L-objects")
        if g1.tgt != g2.src:
            raise NotComposable(f"{g2} cannot follow {g1}")
        if g2.kind == "a":
            return Sum([g1])
        if g1.kind == "a":
            return Sum([g2])
        if abs(g2.tgt - g1.src) > 2:
            raise UndeterminedProduct(f"mu2({g2}, {g1}) spans a winding change of {g2.tgt - g1.src}")
        if g2.kind in FUKAYA_KINDS and g1.kind in FUKAYA_KINDS:
            matched = {("q", "+", "p", "-"), ("p", "-", "q", "+"), ("q", "-", "p", "+"), ("p", "+", "q", "-")}
            if (g2.kind, g2.sign, g1.kind, g1.sign) in matched:
                return Sum([c(g1.src)])
            if "c" in (g2.kind, g1.kind):
                return Sum()
        acc: set = set()
        for x2 in _expand(g2):
            for x1 in _expand(g1):
                _xor_into(acc, self._perturbed_pair(x2, x1))
        return Sum(acc)

    def _perturbed_pair(self, g2: Gen, g1: Gen) -> list[Gen]:
        if g2.kind == "a":
            return [g1]
        if g1.kind == "a":
            return [g2]
        t = min(g1.src, g1.tgt, g2.tgt)
        key = (g2.shift(-t), g1.shift(-t))
        res = self.perturbed.get(key)
        return [res.shift(t)] if res is not None else []

    # -- module actions ------------------------------------------------------

    def act_unperturbed(self, g: Gen, m: Gen) -> Sum:
        """Action of an L-morphism on a generator of (W_0, L_n) using the b/r/s level table."""
        if m.kind not in W0_KINDS:
            raise NotComposable(f"{m} is not a generator of (W_0, L_n)")
        if g.src != m.tgt:
            raise NotComposable(f"{g} cannot act on {m}")
        if abs(g.tgt) > 2 or abs(g.src) > 2:
            raise UnsupportedWinding(f"{g} leaves the windings {{0, +-2}}")
        if g.kind == "a":
            return Sum([m])
        acc: set = set()
        for x in _expand(g):
            res = self.unperturbed.get((x, m))
            if res is not None:
                acc ^= {res}
        return Sum(acc)

    def act_s2s1(self, g: Gen, m: Gen) -> Sum:
        """Action of a, c, p, q on a generator of (W_0, L_n), n in {0, +-2}."""
        if m.kind not in W0_KINDS:
            raise NotComposable(f"{m} is not a generator of (W_0, L_n)")
        if g.kind not in FUKAYA_KINDS:
            raise NotComposable(f"{g} is not one of a, c, p, q")
        if g.src != m.tgt:
            raise NotComposable(f"{g} cannot act on {m}")
        if abs(g.tgt) > 2 or abs(g.src) > 2:
            raise UnsupportedWinding(f"{g} leaves the windings {{0, +-2}}")
        if g.kind == "a":
            return Sum([m])
        res = self.ops_s2s1.get((g, m))
        return Sum([res]) if res is not None else Sum()

    def act_s3(self, g: Gen, m: Gen) -> Sum:
        if m.kind != "w":
            raise NotComposable(f"{m} is not a closure generator")
        if g.src != m.tgt:
            raise NotComposable(f"{g} cannot act on {m}")
        return Sum([m]) if g.kind == "a" else Sum()

    def act3_s3(self, g2: Gen, g1: Gen, m: Gen) -> Sum:
        if m.kind != "w":
            raise NotComposable(f"{m} is not a closure generator")
        if g1.src != m.tgt or g2.src != g1.tgt:
            raise NotComposable(f"{g2}, {g1} do not chain onto {m}")
        n = m.tgt
        if m.sign == "+":
            hits = {(c(n - 2), q(n - 2, n, "+")), (q(n - 2, n, "+"), c(n))}
            if (g2, g1) in hits:
                return Sum([w(n - 2, "+")])
        else:
            hits = {(c(n + 2), p(n + 2, n, "+")), (p(n + 2, n, "+"), c(n))}
            if (g2, g1) in hits:
                return Sum([w(n + 2, "-")])
        return Sum()


DEFAULT_TABLES = CategoryTables()


def mu2(g2: Gen, g1: Gen) -> Sum:
    return DEFAULT_TABLES.mu2(g2, g1)


def act_s3(g: Gen, m: Gen) -> Sum:
    return DEFAULT_TABLES.act_s3(g, m)


def act3_s3(g2: Gen, g1: Gen, m: Gen) -> Sum:
    return DEFAULT_TABLES.act3_s3(g2, g1, m)


def act_s2s1(g: Gen, m: Gen) -> Sum:
    return DEFAULT_TABLES.act_s2s1(g, m)


# -- consistency checks ------------------------------------------------------------


def _l_generators(windings=(0, 2)) -> list[Gen]:
    gens = []
    for n in windings:
        gens += [a(n), b(n), c(n), d(n)]
    for n0 in windings:
        for n1 in windings:
            if n1 - n0 in (2, -2):
                gens += [Gen(k, n1, n0) for k in ("r", "rbar", "s", "sbar")]
    return gens


def _w0_generators() -> list[Gen]:
    return [alpha(), beta(), sigma_gen(2), tau_gen(2), sigma_gen(-2), tau_gen(-2)]


def _fukaya_generators(windings=(-2, 0, 2)) -> list[Gen]:
    gens = []
    for n in windings:
        gens += [a(n), c(n)]
        for sign in "+-":
            if n + 2 in windings:
                gens.append(p(n + 2, n, sign))
            if n - 2 in windings:
                gens.append(q(n - 2, n, sign))
    return gens


def _sum_str(x: Iterable[Gen]) -> str:
    x = sorted(x)
    return " + ".join(map(str, x)) if x else "0"


def _check_gradings(tables: CategoryTables) -> list[str]:
    """Bigrading and orientation of every explicit table entry."""
    bad = []
    entries = list(tables.perturbed.items()) + list(tables.unperturbed.items()) + list(tables.ops_s2s1.items())
    for (g2, g1), res in entries:
        if bigrading(res) != bigrading(g2) + bigrading(g1):
            bad.append(f"bigrading: {g2} * {g1} = {res}")
    return bad


def _check_orientations(tables: CategoryTables) -> list[str]:
    bad = []
    entries = list(tables.perturbed.items()) + list(tables.unperturbed.items()) + list(tables.ops_s2s1.items())
    for (g2, g1), res in entries:
        if orientation(res) != orientation(g2) * orientation(g1):
            bad.append(f"orientation: {g2} * {g1} = {res}")
    for g2, g1 in product(_fukaya_generators(), repeat=2):
        try:
            res = tables.mu2(g2, g1)
        except (NotComposable, UndeterminedProduct):
            continue
        for x in res:
            if orientation(x) != orientation(g2) * orientation(g1):
                bad.append(f"orientation: {g2} * {g1} = {x}")
    # triple operations carry one extra sign flip relative to the plain product
    for n in (-2, 0, 2):
        for sign in "+-":
            m = w(n, sign)
            for g2, g1 in product(_fukaya_generators((n - 2, n, n + 2)), repeat=2):
                try:
                    res = tables.act3_s3(g2, g1, m)
                except NotComposable:
                    continue
                for x in res:
                    if orientation(x) != -orientation(g2) * orientation(g1) * orientation(m):
                        bad.append(f"orientation: mu3({g2}, {g1}, {m}) = {x}")
                    if bigrading(x) != bigrading(g2) + bigrading(g1) + bigrading(m) - (1, 1):
                        bad.append(f"bigrading: mu3({g2}, {g1}, {m}) = {x}")
    return bad


def _check_associativity(tables: CategoryTables) -> list[str]:
    bad = []
    gens = _l_generators()
    for g3, g2, g1 in product(gens, repeat=3):
        if g1.tgt != g2.src or g2.tgt != g3.src:
            continue
        left: set = set()
        right: set = set()
        for x in tables.mu2(g2, g1):
            _xor_into(left, tables.mu2(g3, x))
        for x in tables.mu2(g3, g2):
            _xor_into(right, tables.mu2(x, g1))
        if left != right:
            bad.append(f"associativity: ({g3}, {g2}, {g1}): {_sum_str(left)} != {_sum_str(right)}")
    # module actions of the b/r/s level on (W_0, L_n)
    lgens = _l_generators((-2, 0, 2))
    for g2, g1, m in product(lgens, lgens, _w0_generators()):
        if g1.src != m.tgt or g2.src != g1.tgt or abs(g2.tgt - g1.src) > 2:
            continue
        left = set()
        for x in tables.act_unperturbed(g1, m):
            _xor_into(left, tables.act_unperturbed(g2, x))
        right = set()
        for x in tables.mu2(g2, g1):
            _xor_into(right, tables.act_unperturbed(x, m))
        if left != right:
            bad.append(f"associativity: ({g2}, {g1}, {m}): {_sum_str(left)} != {_sum_str(right)}")
    # the a, c, p, q level, on both L-objects and (W_0, L_n)
    fgens = _fukaya_generators()
    for g3, g2, g1 in product(fgens, repeat=3):
        if g1.tgt != g2.src or g2.tgt != g3.src:
            continue
        try:
            left = set()
            for x in tables.mu2(g2, g1):
                _xor_into(left, tables.mu2(g3, x))
            right = set()
            for x in tables.mu2(g3, g2):
                _xor_into(right, tables.mu2(x, g1))
        except UndeterminedProduct:
            continue
        if left != right:
            bad.append(f"associativity: ({g3}, {g2}, {g1}): {_sum_str(left)} != {_sum_str(right)}")
    for g2, g1, m in product(fgens, fgens, _w0_generators()):
        if g1.src != m.tgt or g2.src != g1.tgt:
            continue
        try:
            right = set()
            for x in tables.mu2(g2, g1):
                _xor_into(right, tables.act_s2s1(x, m))
        except UndeterminedProduct:
            continue
        left = set()
        for x in tables.act_s2s1(g1, m):
            _xor_into(left, tables.act_s2s1(g2, x))
        if left != right:
            bad.append(f"associativity: ({g2}, {g1}, {m}): {_sum_str(left)} != {_sum_str(right)}")
    return bad


_INVARIANCE = {
    a(0): a(2),
    b(0): b(2),
    c(0): c(2),
    d(0): d(2),
    r(2, 0): r(0, 2),
    rbar(2, 0): rbar(0, 2),
    s(2, 0): sbar(0, 2),
    sbar(2, 0): s(0, 2),
}
_INVARIANCE.update({v: k for k, v in list(_INVARIANCE.items())})


def _check_invariance(tables: CategoryTables) -> list[str]:
    bad = []
    gens = _l_generators()
    for g2, g1 in product(gens, repeat=2):
        if g1.tgt != g2.src:
            continue
        lhs = Sum(_INVARIANCE[x] for x in tables.mu2(g2, g1))
        rhs = tables.mu2(_INVARIANCE[g2], _INVARIANCE[g1])
        if lhs != rhs:
            bad.append(f"invariance: ({g2}, {g1}): {_sum_str(lhs)} vs {_sum_str(rhs)}")
    return bad


def _identify(m: Gen, letter: str) -> Sum:
    """The isomorphism (W_0, L_n) (x) V -> (L_0, L_n) on basis vectors."""
    n = m.tgt
    table = {
        ("alpha", "e"): [a(0)],
        ("alpha", "v"): [b(0)],
        ("beta", "e"): [c(0)],
        ("beta", "v"): [d(0)],
        ("sigma", "e"): [s(n, 0), sbar(n, 0)],
        ("sigma", "v"): [r(n, 0)],
        ("tau", "e"): [r(n, 0), rbar(n, 0)],
        ("tau", "v"): [sbar(n, 0)] if n == 2 else [s(n, 0)],
    }
    return Sum(table[(m.kind, letter)])


def _check_squares(tables: CategoryTables) -> list[str]:
    bad = []
    maps = [c(0), c(2), c(-2)]
    for sign in "+-":
        maps += [p(2, 0, sign), q(0, 2, sign), q(-2, 0, sign), p(0, -2, sign)]
    for f in maps:
        for m in _w0_generators():
            if m.tgt != f.src:
                continue
            for letter in "ev":
                top: set = set()
                for x in tables.act_s2s1(f, m):
                    _xor_into(top, _identify(x, letter))
                bottom: set = set()
                for y in _identify(m, letter):
                    for z in tables.mu2(f, y):
                        _xor_into(bottom, _expand(z))
                if top != bottom:
                    bad.append(
                        f"square {f} on {m} (x) {letter}: {_sum_str(top)} vs {_sum_str(bottom)}"
                    )
    # the a, c, p, q actions must agree with the b/r/s level action
    for f in maps + [a(0), a(2), a(-2)]:
        for m in _w0_generators():
            if m.tgt != f.src:
                continue
            if tables.act_s2s1(f, m) != tables.act_unperturbed(f, m):
                bad.append(f"expansion: {f} on {m}")
    return bad


def verify_consistency(tables: CategoryTables | None = None) -> dict[str, list[str]]:
    """Run all table checks; each key maps to its list of counterexamples."""
    tables = DEFAULT_TABLES if tables is None else tables
    return {
        "orientation": _check_orientations(tables),
        "associativity": _check_associativity(tables),
        "invariance": _check_invariance(tables),
        "bigrading": _check_gradings(tables),
        "squares": _check_squares(tables),
    }
