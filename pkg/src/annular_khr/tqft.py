"""The Frobenius algebra A = <e, x> and leg-labelled operators on its tensor powers.

A basis vector of A^{legs} is an int bitmask: bit i set means the i-th leg
(in the canonical sorted order of the leg set) carries ``x``, clear means
``e``.  Quantum degree is (#e) - (#x); every operator here has homological
degree 0.
"""
from __future__ import annotations

from itertools import product
from typing import Hashable, Iterable, Mapping, Sequence

__all__ = [
    "LegSet",
    "TensorMap",
    "UnknownLeg",
    "ArityMismatch",
    "LegSetMismatch",
    "legset",
    "qdeg",
    "identity",
    "zero",
    "unit",
    "unit_dot",
    "counit",
    "counit_dot",
    "raise_ex",
    "lower_xe",
    "project_ee",
    "multiply",
    "comultiply",
    "multiply3",
    "sigma",
    "relabel",
    "local_operator",
    "build_operator",
    "verify_sigma_identities",
    "OPERATOR_DEGREES",
]

E, X = 0, 1

LegSet = tuple


class UnknownLeg(KeyError):
    pass


class ArityMismatch(ValueError):
    pass


class LegSetMismatch(ValueError):
    pass


def _leg_key(label):
    return (type(label).__name__, label)


def legset(labels: Iterable[Hashable]) -> LegSet:
    """Canonical (sorted, duplicate-free) leg set."""
    labels = list(labels)
    if len(set(labels)) != len(labels):
        raise ValueError(f"duplicate leg labels in {labels!r}")
    return tuple(sorted(labels, key=_leg_key))


def qdeg(mask: int, nlegs: int) -> int:
    nx = bin(mask).count("1")
    return nlegs - 2 * nx


class TensorMap:
    """A GF(2)-linear map A^{source} -> A^{target} stored column-wise."""

    __slots__ = ("source", "target", "entries")

    def __init__(self, source: LegSet, target: LegSet, entries: Mapping[int, Iterable[int]]):
        self.source = tuple(source)
        self.target = tuple(target)
        self.entries = {k: frozenset(v) for k, v in entries.items() if v}

    def __call__(self, mask: int) -> frozenset:
        return self.entries.get(mask, frozenset())

    def apply(self, vector: Iterable[int]) -> frozenset:
        acc: set = set()
        for m in vector:
            acc ^= self.entries.get(m, frozenset())
        return frozenset(acc)

    def is_zero(self) -> bool:
        return not self.entries

    def degrees(self) -> set[int]:
        ns, nt = len(self.source), len(self.target)
        return {qdeg(t, nt) - qdeg(s, ns) for s, ts in self.entries.items() for t in ts}

    def degree(self) -> int | None:
        """Quantum degree, or None for the zero map; raises if inhomogeneous."""
        d = self.degrees()
        if len(d) > 1:
            raise ValueError(f"inhomogeneous map with degrees {sorted(d)}")
        return next(iter(d)) if d else None

    def __add__(self, other: "TensorMap") -> "TensorMap":
        if (self.source, self.target) != (other.source, other.target):
            raise LegSetMismatch(f"cannot add maps {self.source}->{self.target} and {other.source}->{other.target}")
        out = dict(self.entries)
        for k, v in other.entries.items():
            out[k] = out.get(k, frozenset()) ^ v
        return TensorMap(self.source, self.target, out)

    def __matmul__(self, other: "TensorMap") -> "TensorMap":
        return compose(self, other)

    def __eq__(self, other):
        if not isinstance(other, TensorMap):
            return NotImplemented
        return (self.source, self.target) == (other.source, other.target) and self.entries == other.entries

    def __hash__(self):
        return hash((self.source, self.target, frozenset(self.entries.items())))

    def __repr__(self):
        return f"TensorMap({self.source}->{self.target}, {len(self.entries)} nonzero columns)"


def compose(g: TensorMap, f: TensorMap) -> TensorMap:
    """g after f."""
    if f.target != g.source:
        raise LegSetMismatch(f"compose: {f.target} != {g.source}")
    out = {}
    for s, ts in f.entries.items():
        acc: set = set()
        for t in ts:
            acc ^= g.entries.get(t, frozenset())
        if acc:
            out[s] = acc
    return TensorMap(f.source, g.target, out)


def zero(source: Sequence, target: Sequence) -> TensorMap:
    return TensorMap(legset(source), legset(target), {})


def identity(legs: Sequence) -> TensorMap:
    legs = legset(legs)
    return TensorMap(legs, legs, {m: (m,) for m in range(1 << len(legs))})


def local_operator(source: Sequence, inputs: Sequence, outputs: Sequence, table) -> TensorMap:
    """Operator acting by ``table`` on the named input legs, identity elsewhere.

    ``table`` maps a tuple of input letters (0 = e, 1 = x) to a list of
    tuples of output letters; the inputs are removed and outputs created.
    """
    source = legset(source)
    for leg in inputs:
        if leg not in source:
            raise UnknownLeg(leg)
    rest = [leg for leg in source if leg not in inputs]
    for leg in outputs:
        if leg in rest:
            raise ValueError(f"output leg {leg!r} already present")
    target = legset(rest + list(outputs))
    spos = {leg: i for i, leg in enumerate(source)}
    tpos = {leg: i for i, leg in enumerate(target)}
    in_pos = [spos[leg] for leg in inputs]
    out_pos = [tpos[leg] for leg in outputs]
    rest_pairs = [(spos[leg], tpos[leg]) for leg in rest]
    for key, vals in table.items():
        if len(key) != len(inputs) or any(len(v) != len(outputs) for v in vals):
            raise ArityMismatch(f"table entry {key}->{vals} does not fit {len(inputs)}->{len(outputs)} legs")
    out_masks = {
        key: [sum(bit << p for bit, p in zip(v, out_pos)) for v in vals] for key, vals in table.items()
    }
    entries = {}
    for m in range(1 << len(source)):
        key = tuple((m >> p) & 1 for p in in_pos)
        outs = out_masks.get(key)
        if not outs:
            continue
        base = 0
        for sp, tp in rest_pairs:
            base |= ((m >> sp) & 1) << tp
        acc: set = set()
        for o in outs:
            acc ^= {base | o}
        if acc:
            entries[m] = acc
    return TensorMap(source, target, entries)


_TABLES = {
    "unit": {(): [(E,)]},
    "unit_dot": {(): [(X,)]},
    "counit": {(X,): [()]},
    "counit_dot": {(E,): [()]},
    "raise_ex": {(X,): [(E,)]},
    "lower_xe": {(E,): [(X,)]},
    "project_ee": {(E,): [(E,)]},
    "multiply": {(E, E): [(E,)], (E, X): [(X,)], (X, E): [(X,)]},
    "comultiply": {(E,): [(E, X), (X, E)], (X,): [(X, X)]},
    "multiply3": {(E, E, E): [(E,)], (X, E, E): [(X,)], (E, X, E): [(X,)], (E, E, X): [(X,)]},
}

OPERATOR_DEGREES = {
    "unit": 1,
    "unit_dot": -1,
    "counit": 1,
    "counit_dot": -1,
    "raise_ex": 2,
    "lower_xe": -2,
    "project_ee": 0,
    "multiply": -1,
    "comultiply": -1,
    "multiply3": -2,
    "sigma": 2,
    "identity": 0,
    "relabel": 0,
}


def _checked(kind: str, op: TensorMap) -> TensorMap:
    d = op.degree()
    if d is not None and d != OPERATOR_DEGREES[kind]:
        raise AssertionError(f"{kind} built with degree {d}")
    return op


def unit(legs: Sequence, new) -> TensorMap:
    """eta: create leg ``new`` carrying e."""
    return _checked("unit", local_operator(legs, (), (new,), _TABLES["unit"]))


def unit_dot(legs: Sequence, new) -> TensorMap:
    """Dotted unit: create leg ``new`` carrying x."""
    return _checked("unit_dot", local_operator(legs, (), (new,), _TABLES["unit_dot"]))


def counit(legs: Sequence, leg) -> TensorMap:
    """epsilon: e -> 0, x -> 1."""
    return _checked("counit", local_operator(legs, (leg,), (), _TABLES["counit"]))


def counit_dot(legs: Sequence, leg) -> TensorMap:
    """Dotted counit: e -> 1, x -> 0."""
    return _checked("counit_dot", local_operator(legs, (leg,), (), _TABLES["counit_dot"]))


def raise_ex(legs: Sequence, leg) -> TensorMap:
    """1_ex: x -> e, e -> 0."""
    return _checked("raise_ex", local_operator(legs, (leg,), (leg,), _TABLES["raise_ex"]))


def lower_xe(legs: Sequence, leg) -> TensorMap:
    """1_xe: e -> x, x -> 0."""
    return _checked("lower_xe", local_operator(legs, (leg,), (leg,), _TABLES["lower_xe"]))


def project_ee(legs: Sequence, leg) -> TensorMap:
    """1_ee: e -> e, x -> 0."""
    return _checked("project_ee", local_operator(legs, (leg,), (leg,), _TABLES["project_ee"]))


def multiply(legs: Sequence, a, b, new) -> TensorMap:
    """Fuse legs ``a`` and ``b`` into ``new``."""
    return _checked("multiply", local_operator(legs, (a, b), (new,), _TABLES["multiply"]))


def comultiply(legs: Sequence, a, new1, new2) -> TensorMap:
    """Split leg ``a`` into ``new1`` and ``new2``."""
    return _checked("comultiply", local_operator(legs, (a,), (new1, new2), _TABLES["comultiply"]))


def multiply3(legs: Sequence, a, b, c, new) -> TensorMap:
    """Triple product m(1 (x) m) fusing ``a``, ``b``, ``c`` into ``new``."""
    return _checked("multiply3", local_operator(legs, (a, b, c), (new,), _TABLES["multiply3"]))


def sigma(legs: Sequence, subset: Iterable) -> TensorMap:
    """Sum of 1_ex over the legs in ``subset``; the empty sum is zero."""
    legs = legset(legs)
    out = zero(legs, legs)
    for leg in subset:
        out = out + raise_ex(legs, leg)
    return out


def relabel(legs: Sequence, mapping: Mapping) -> TensorMap:
    """Rename legs (this is how swaps are expressed on labelled legs)."""
    legs = legset(legs)
    moved = [leg for leg in legs if mapping.get(leg, leg) != leg]
    new = [mapping[leg] for leg in moved]
    table = {bits: [bits] for bits in product((E, X), repeat=len(moved))}
    tmp = [("__relabel__", i) for i in range(len(moved))]
    # route through temporary labels so that cyclic renamings work
    first = local_operator(legs, tuple(moved), tuple(tmp), table)
    return _checked("relabel", local_operator(first.target, tuple(tmp), tuple(new), table) @ first)


def build_operator(kind: str, source: Sequence, **params) -> TensorMap:
    """Dispatch by operator name; parameters name the affected legs."""
    builders = {
        "identity": lambda: identity(source),
        "unit": lambda: unit(source, params["new"]),
        "unit_dot": lambda: unit_dot(source, params["new"]),
        "counit": lambda: counit(source, params["leg"]),
        "counit_dot": lambda: counit_dot(source, params["leg"]),
        "raise_ex": lambda: raise_ex(source, params["leg"]),
        "lower_xe": lambda: lower_xe(source, params["leg"]),
        "project_ee": lambda: project_ee(source, params["leg"]),
        "multiply": lambda: multiply(source, params["a"], params["b"], params["new"]),
        "comultiply": lambda: comultiply(source, params["leg"], params["new1"], params["new2"]),
        "multiply3": lambda: multiply3(source, params["a"], params["b"], params["c"], params["new"]),
        "sigma": lambda: sigma(source, params["subset"]),
        "relabel": lambda: relabel(source, params["mapping"]),
    }
    if kind not in builders:
        raise ValueError(f"unknown operator kind {kind!r}")
    return builders[kind]()


def verify_sigma_identities(max_legs: int) -> list[str]:
    """Exhaustively check the Sigma splitting and (co)multiplication identities.

    Returns a list of failure descriptions (empty when everything holds).
    """
    if max_legs < 2:
        raise ValueError("max_legs must be at least 2")
    failures = []
    for n in range(max_legs + 1):
        legs = [f"l{i}" for i in range(n)]
        whole = sigma(legs, legs)
        for a in range(n + 1):
            split = sigma(legs, legs[:a]) + sigma(legs, legs[a:])
            if split != whole:
                failures.append(f"Sigma_{{{a}+{n - a}}} split")
    for n in range(max_legs - 1):
        rest = [f"r{i}" for i in range(n)]
        src = ["a"] + rest
        mid = ["b", "c"] + rest
        lhs = sigma(mid, ["b", "c"]) @ comultiply(src, "a", "b", "c")
        rhs = comultiply(src, "a", "b", "c") @ sigma(src, ["a"])
        if lhs != rhs:
            failures.append(f"Sigma_2 Delta = Delta Sigma_1 with {n} spectators")
        lhs = sigma(["a"] + rest, ["a"]) @ multiply(mid, "b", "c", "a")
        rhs = multiply(mid, "b", "c", "a") @ sigma(mid, ["b", "c"])
        if lhs != rhs:
            failures.append(f"Sigma_1 m = m Sigma_2 with {n} spectators")
    return failures
