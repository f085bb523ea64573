"""Annular 1-tangle diagrams: parsing, resolutions, saddles and the cube of resolutions.

Geometry conventions
--------------------
* The annulus is the plane punctured at the origin.  The arc runs from a
  point ``p1`` on the circle of radius ``outer_radius`` to the origin, and
  its final segment lies on the seam ray (the ray from the origin through
  ``p1``).  This makes the arc's winding number an integer.
* Winding numbers count clockwise turns as positive.
* A crossing is positive when ``cross(over_direction, under_direction) > 0``.
* The 0-resolution turns left when travelling along the overpass.
* Resolutions are built geometrically: each strand is cut at distance
  ``rho`` before and after every crossing and the four cut points are
  joined by two short chords.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations, product
from typing import Iterable, Sequence

import numpy as np

from .tqft import LegSet, legset

__all__ = [
    "ParseError",
    "ValidationError",
    "EssentialCircle",
    "InvalidWindingJump",
    "LoopNumberNotTwo",
    "Strand",
    "Crossing",
    "TangleDiagram",
    "Circle",
    "PlanarTangle",
    "Saddle",
    "CubeOfResolutions",
    "parse_atd",
    "load_atd",
    "dump_atd",
    "find_intersections",
    "crossing_signs",
    "resolve",
    "classify_saddle",
    "cube",
    "winding_of_strands",
    "seam_linking",
    "arc_shift",
    "loop_number",
    "add_full_twist",
    "random_diagram",
    "point_in_polygon",
]


class ParseError(ValueError):
    pass


class ValidationError(ValueError):
    """A diagram invariant failed; ``invariant`` names it and ``witness`` locates it."""

    def __init__(self, invariant: str, witness=None):
        super().__init__(f"{invariant}: {witness!r}" if witness is not None else invariant)
        self.invariant = invariant
        self.witness = witness


class EssentialCircle(ValidationError):
    pass


class InvalidWindingJump(ValueError):
    pass


class LoopNumberNotTwo(ValueError):
    pass


def _cross(a, b) -> float:
    return float(a[0] * b[1] - a[1] * b[0])


# -- input objects -----------------------------------------------------------------


@dataclass(frozen=True)
class Strand:
    id: str
    kind: str  # "arc" or "circle"
    points: tuple[tuple[float, float], ...]

    @property
    def closed(self) -> bool:
        return self.kind == "circle"

    def segments(self) -> list[tuple[np.ndarray, np.ndarray]]:
        pts = [np.array(p, dtype=float) for p in self.points]
        n = len(pts)
        m = n if self.closed else n - 1
        return [(pts[i], pts[(i + 1) % n]) for i in range(m)]


@dataclass(frozen=True)
class Crossing:
    at: tuple[float, float]
    over: str
    under: str
    # for a strand crossing itself: which pass (in point order) is the overpass
    over_pass: str | None = None


@dataclass(frozen=True)
class _Pass:
    strand: str
    segment: int
    t: float  # parameter along the segment

    @property
    def pos(self) -> float:
        return self.segment + self.t


@dataclass(frozen=True)
class _Intersection:
    point: tuple[float, float]
    first: _Pass
    second: _Pass


@dataclass(frozen=True, eq=False)
class TangleDiagram:
    outer_radius: float
    strands: tuple[Strand, ...]
    crossings: tuple[Crossing, ...]
    comments: tuple[str, ...] = ()
    tolerance: float = 1e-9
    match_tolerance: float = 1e-6

    @property
    def arc(self) -> Strand:
        return next(s for s in self.strands if s.kind == "arc")

    def strand(self, sid: str) -> Strand:
        for s in self.strands:
            if s.id == sid:
                return s
        raise KeyError(sid)

    @property
    def seam_direction(self) -> np.ndarray:
        p1 = np.array(self.arc.points[0], dtype=float)
        return p1 / np.linalg.norm(p1)

    def __len__(self):
        return len(self.crossings)

    @cached_property
    def _geometry(self) -> "_Geometry":
        return _Geometry(self)

    def validate(self) -> "TangleDiagram":
        _validate(self)
        _ = self._geometry
        return self


# -- parsing -----------------------------------------------------------------------


def parse_atd(text: str, tolerance: float = 1e-9) -> TangleDiagram:
    """Parse ATD text: '#' comment lines followed by one JSON object."""
    comments, body = [], []
    for line in text.splitlines():
        if line.lstrip().startswith("#"):
            comments.append(line.lstrip()[1:].strip())
        else:
            body.append(line)
    try:
        raw = json.loads("\n".join(body))
    except json.JSONDecodeError as exc:
        raise ParseError(f"not valid JSON: {exc}") from exc
    try:
        strands = []
        for s in raw["strands"]:
            pts = tuple((float(x), float(y)) for x, y in s["points"])
            if s["kind"] == "circle" and len(pts) > 1 and pts[0] == pts[-1]:
                pts = pts[:-1]
            if s["kind"] not in ("arc", "circle"):
                raise ParseError(f"strand {s['id']!r} has unknown kind {s['kind']!r}")
            strands.append(Strand(str(s["id"]), s["kind"], pts))
        crossings = tuple(
            Crossing(
                (float(c["at"][0]), float(c["at"][1])),
                str(c["over"]),
                str(c["under"]),
                c.get("over_pass"),
            )
            for c in raw.get("crossings", [])
        )
        d = TangleDiagram(float(raw["outer_radius"]), tuple(strands), crossings, tuple(comments), tolerance)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"malformed ATD record: {exc!r}") from exc
    return d.validate()


def load_atd(path, tolerance: float = 1e-9) -> TangleDiagram:
    with open(path, encoding="utf-8") as fh:
        return parse_atd(fh.read(), tolerance)


def dump_atd(d: TangleDiagram) -> str:
    """Canonical serialization (comments first, then JSON with 12-digit coordinates)."""

    def num(v):
        return round(float(v), 12)

    doc = {
        "outer_radius": num(d.outer_radius),
        "strands": [
            {"id": s.id, "kind": s.kind, "points": [[num(x), num(y)] for x, y in s.points]}
            for s in d.strands
        ],
        "crossings": [
            dict(
                {"at": [num(c.at[0]), num(c.at[1])], "over": c.over, "under": c.under},
                **({"over_pass": c.over_pass} if c.over_pass else {}),
            )
            for c in d.crossings
        ],
    }
    head = "".join(f"# {line}\n" for line in d.comments)
    return head + json.dumps(doc, indent=1) + "\n"


# -- validation --------------------------------------------------------------------


def _segment_intersection(p, p2, q, q2, tol):
    """Return (s, t) for a transverse interior intersection, None if disjoint.

    Raises ValidationError for overlaps and touching endpoints.
    """
    r = p2 - p
    s = q2 - q
    denom = _cross(r, s)
    qp = q - p
    scale = max(np.linalg.norm(r), np.linalg.norm(s), 1.0)
    if abs(denom) <= tol * scale * scale:
        if abs(_cross(qp, r)) <= tol * scale * scale:
            # collinear: overlap unless the projections are disjoint
            rr = float(np.dot(r, r))
            t0 = float(np.dot(qp, r)) / rr
            t1 = float(np.dot(q2 - p, r)) / rr
            lo, hi = min(t0, t1), max(t0, t1)
            if hi >= -tol and lo <= 1 + tol:
                raise ValidationError("collinear overlap", (tuple(p), tuple(p2), tuple(q), tuple(q2)))
        return None
    t = _cross(qp, s) / denom
    u = _cross(qp, r) / denom
    eps = tol
    if t < -eps or t > 1 + eps or u < -eps or u > 1 + eps:
        return None
    if min(t, 1 - t, u, 1 - u) <= eps:
        raise ValidationError("intersection at a vertex", tuple(p + t * r))
    return t, u


def find_intersections(strands: Sequence[Strand], tol: float = 1e-9) -> list[_Intersection]:
    """All transverse strand intersections, each reported once."""
    segs = []
    for st in strands:
        for i, (a, b) in enumerate(st.segments()):
            segs.append((st, i, a, b))
    out = []
    for (s1, i1, a1, b1), (s2, i2, a2, b2) in combinations(segs, 2):
        if s1.id == s2.id:
            nseg = len(s1.segments())
            if abs(i1 - i2) == 1 or (s1.closed and abs(i1 - i2) == nseg - 1):
                # adjacent segments only meet at their shared vertex; reject folds
                shared = b1 if i2 == (i1 + 1) % nseg else a1
                other1 = a1 if shared is b1 else b1
                other2 = b2 if shared is a2 or np.allclose(shared, a2) else a2
                d1, d2 = other1 - shared, other2 - shared
                if abs(_cross(d1, d2)) <= tol * np.linalg.norm(d1) * np.linalg.norm(d2) and np.dot(d1, d2) > 0:
                    raise ValidationError("strand folds back on itself", (s1.id, i1, i2))
                continue
        hit = _segment_intersection(a1, b1, a2, b2, tol)
        if hit is None:
            continue
        t, u = hit
        pt = a1 + t * (b1 - a1)
        out.append(_Intersection((float(pt[0]), float(pt[1])), _Pass(s1.id, i1, t), _Pass(s2.id, i2, u)))
    return out


def _dist_point_segment(x, a, b) -> float:
    ab = b - a
    denom = float(np.dot(ab, ab))
    t = 0.0 if denom == 0 else min(1.0, max(0.0, float(np.dot(x - a, ab)) / denom))
    return float(np.linalg.norm(x - (a + t * ab)))


def _validate(d: TangleDiagram) -> list[tuple[_Pass, _Pass]]:
    tol = d.tolerance
    R = d.outer_radius
    if R <= 0:
        raise ValidationError("outer radius must be positive", R)
    arcs = [s for s in d.strands if s.kind == "arc"]
    if len(arcs) != 1:
        raise ValidationError("exactly one arc strand", len(arcs))
    ids = [s.id for s in d.strands]
    if len(set(ids)) != len(ids):
        raise ValidationError("strand ids must be unique", ids)
    arc = arcs[0]
    if len(arc.points) < 2:
        raise ValidationError("arc needs at least two points", arc.id)
    p1 = np.array(arc.points[0])
    if abs(np.linalg.norm(p1) - R) > max(tol, 1e-9 * R) * 10:
        raise ValidationError("arc must start on the outer circle", tuple(p1))
    if np.linalg.norm(arc.points[-1]) > tol:
        raise ValidationError("arc must end at the puncture", arc.points[-1])
    q = np.array(arc.points[-2])
    if abs(_cross(p1, q)) > tol * R * R * 10 or np.dot(p1, q) <= 0:
        raise ValidationError("final arc segment must lie on the seam ray", tuple(q))
    for s in d.strands:
        if s.kind == "circle" and len(s.points) < 3:
            raise ValidationError("circle needs at least three points", s.id)
        pts = np.array(s.points)
        if len(np.unique(pts.round(12), axis=0)) != len(pts):
            raise ValidationError("repeated vertex", s.id)
        last = len(pts) - 1 if s.kind == "arc" else None
        for i, pt in enumerate(pts):
            r = np.linalg.norm(pt)
            if r > R + tol or (r >= R - tol and not (s is arc and i == 0)):
                raise ValidationError("point outside the annulus", (s.id, tuple(pt)))
            if r <= tol and not (s is arc and i == last):
                raise ValidationError("point at the puncture", (s.id, i))
        for i, (a, b) in enumerate(s.segments()):
            if s is arc and i == len(pts) - 2:
                continue
            if _dist_point_segment(np.zeros(2), a, b) <= tol:
                raise ValidationError("strand passes through the puncture", (s.id, i))
    hits = find_intersections(d.strands, tol)
    # no triple points
    for h1, h2 in combinations(hits, 2):
        if math.dist(h1.point, h2.point) <= tol * max(R, 1.0):
            raise ValidationError("triple point", h1.point)
    # every intersection listed exactly once, every listed crossing real
    used = set()
    passes = []
    for k, c in enumerate(d.crossings):
        best = None
        for j, h in enumerate(hits):
            if math.dist(h.point, c.at) <= d.match_tolerance * max(R, 1.0):
                if best is not None:
                    raise ValidationError("crossing matches several intersections", c.at)
                best = j
        if best is None:
            raise ValidationError("listed crossing is not an intersection", c.at)
        if best in used:
            raise ValidationError("intersection listed twice", c.at)
        used.add(best)
        h = hits[best]
        if {h.first.strand, h.second.strand} != {c.over, c.under}:
            raise ValidationError("crossing strand ids do not match the geometry", (c.at, c.over, c.under))
        if c.over == c.under:
            first, second = sorted((h.first, h.second), key=lambda p: p.pos)
            if c.over_pass not in ("first", "second"):
                raise ValidationError("self crossing needs over_pass 'first' or 'second'", c.at)
            over, under = (first, second) if c.over_pass == "first" else (second, first)
        else:
            over, under = (h.first, h.second) if h.first.strand == c.over else (h.second, h.first)
        passes.append((over, under))
    missing = [hits[j].point for j in range(len(hits)) if j not in used]
    if missing:
        raise ValidationError("intersection without a crossing record", missing[0])
    return passes


# -- resolution geometry -----------------------------------------------------------


@dataclass(frozen=True)
class _Piece:
    id: str
    points: tuple[tuple[float, float], ...]
    start: tuple | None  # port at the start, None for the arc start
    end: tuple | None  # port at the end, None for the arc end
    closed: bool = False


class _Geometry:
    """Pieces of strands between crossing neighbourhoods and the ports joining them."""

    def __init__(self, d: TangleDiagram):
        passes = _validate(d)
        self.passes = passes
        strands = {s.id: s for s in d.strands}
        self.directions = []
        for over, under in passes:
            self.directions.append((self._direction(strands[over.strand], over), self._direction(strands[under.strand], under)))
        self.signs = [1 if _cross(o, u) > 0 else -1 for o, u in self.directions]
        self.rho = self._radius(d)
        self.pieces: dict[str, _Piece] = {}
        self.port_piece: dict[tuple, tuple[str, str]] = {}  # port -> (piece id, "start"|"end")
        self.port_point: dict[tuple, tuple[float, float]] = {}
        for s in d.strands:
            self._cut(s)

    @staticmethod
    def _direction(s: Strand, p: _Pass) -> np.ndarray:
        a, b = s.segments()[p.segment]
        v = b - a
        return v / np.linalg.norm(v)

    def _radius(self, d: TangleDiagram) -> float:
        if not self.passes:
            return 0.0
        strands = {s.id: s for s in d.strands}
        centres = []
        for over, _ in self.passes:
            a, b = strands[over.strand].segments()[over.segment]
            centres.append(a + over.t * (b - a))
        best = math.inf
        allpts = [np.array(p) for s in d.strands for p in s.points]
        for k, c in enumerate(centres):
            best = min(best, float(np.linalg.norm(c)))
            for p in allpts:
                best = min(best, float(np.linalg.norm(p - c)))
            for j, c2 in enumerate(centres):
                if j != k:
                    best = min(best, float(np.linalg.norm(c2 - c)))
            own = {(self.passes[k][0].strand, self.passes[k][0].segment), (self.passes[k][1].strand, self.passes[k][1].segment)}
            for s in d.strands:
                for i, (a, b) in enumerate(s.segments()):
                    if (s.id, i) not in own:
                        best = min(best, _dist_point_segment(c, a, b))
        rho = 0.3 * best
        if rho <= 10 * d.tolerance:
            raise ValidationError("features closer than the tolerance near a crossing", best)
        return rho

    def _cut(self, s: Strand) -> None:
        segs = s.segments()
        pts = [tuple(map(float, p)) for p in s.points]
        events = []
        for k, (over, under) in enumerate(self.passes):
            for role, p in (("over", over), ("under", under)):
                if p.strand == s.id:
                    events.append((p.pos, k, role))
        events.sort()

        def at(pos: float) -> tuple[float, float]:
            i = min(int(math.floor(pos)), len(segs) - 1)
            a, b = segs[i]
            pt = a + (pos - i) * (b - a)
            return (float(pt[0]), float(pt[1]))

        def ports(ev):
            pos, k, role = ev
            seglen = float(np.linalg.norm(segs[int(pos)][1] - segs[int(pos)][0]))
            delta = self.rho / seglen
            pin, pout = (k, role, "in"), (k, role, "out")
            self.port_point[pin] = at(pos - delta)
            self.port_point[pout] = at(pos + delta)
            return pin, pout

        def vertices_between(lo: float, hi: float) -> list:
            # strand vertices with parameter strictly inside (lo, hi), cyclically for circles
            n = len(pts)
            out = []
            if not s.closed:
                for i in range(n):
                    if lo < i < hi:
                        out.append(pts[i])
                return out
            if hi <= lo:
                hi += n
            for i in range(int(math.floor(lo)) + 1, int(math.ceil(hi))):
                if lo < i < hi:
                    out.append(pts[i % n])
            return out

        if not events:
            pid = f"{s.id}.0"
            self.pieces[pid] = _Piece(pid, tuple(pts), None, None, closed=s.closed)
            return
        pp = [ports(ev) for ev in events]
        if not s.closed:
            bounds = [(0.0, None, None)]
            for ev, (pin, pout) in zip(events, pp):
                bounds.append((ev[0], pin, pout))
            bounds.append((float(len(pts) - 1), None, None))
            for j in range(len(bounds) - 1):
                lo, _, start = bounds[j]
                hi, end, _ = bounds[j + 1]
                first = self.port_point[start] if start else pts[0]
                last = self.port_point[end] if end else pts[-1]
                body = (first, *vertices_between(lo, hi), last)
                self._add(f"{s.id}.{j}", body, start, end)
        else:
            m = len(events)
            for j in range(m):
                lo = events[j][0]
                hi = events[(j + 1) % m][0]
                start = pp[j][1]
                end = pp[(j + 1) % m][0]
                if m == 1:
                    hi = lo + len(pts)
                body = (self.port_point[start], *vertices_between(lo, hi), self.port_point[end])
                self._add(f"{s.id}.{j}", body, start, end)

    def _add(self, pid, points, start, end):
        self.pieces[pid] = _Piece(pid, tuple(points), start, end)
        if start is not None:
            self.port_piece[start] = (pid, "start")
        if end is not None:
            self.port_piece[end] = (pid, "end")

    def pairing(self, k: int, bit: int) -> dict[tuple, tuple]:
        o, u = self.directions[k]
        left_turn_to_under_out = _cross(o, u) > 0
        if left_turn_to_under_out:
            zero = [((k, "over", "in"), (k, "under", "out")), ((k, "under", "in"), (k, "over", "out"))]
            one = [((k, "over", "in"), (k, "under", "in")), ((k, "over", "out"), (k, "under", "out"))]
        else:
            zero = [((k, "over", "in"), (k, "under", "in")), ((k, "over", "out"), (k, "under", "out"))]
            one = [((k, "over", "in"), (k, "under", "out")), ((k, "under", "in"), (k, "over", "out"))]
        out = {}
        for x, y in zero if bit == 0 else one:
            out[x] = y
            out[y] = x
        return out


def point_in_polygon(pt, poly) -> bool:
    """Even-odd rule test for a point against a closed polygon."""
    x, y = pt
    inside = False
    n = len(poly)
    for i in range(n):
        x1, y1 = poly[i]
        x2, y2 = poly[(i + 1) % n]
        if (y1 > y) != (y2 > y):
            xs = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if xs > x:
                inside = not inside
    return inside


def _turning(points: Sequence) -> float:
    """Total signed angle swept about the origin along a polyline."""
    pts = np.asarray(points, dtype=float)
    ang = np.arctan2(pts[:, 1], pts[:, 0])
    diff = np.diff(ang)
    diff = (diff + np.pi) % (2 * np.pi) - np.pi
    return float(diff.sum())


def _cw_winding(points: Sequence, closed: bool) -> float:
    pts = list(points) + ([points[0]] if closed else [])
    return -_turning(pts) / (2 * np.pi)


# -- resolved diagrams -------------------------------------------------------------


@dataclass(frozen=True)
class Circle:
    label: tuple[str, ...]
    polygon: tuple[tuple[float, float], ...]
    parent: tuple[str, ...] | None = None


@dataclass(frozen=True)
class _Chord:
    crossing: int
    component: object  # "arc" or a circle label
    start: tuple[float, float]
    end: tuple[float, float]


@dataclass(frozen=True, eq=False)
class PlanarTangle:
    """One vertex of the cube: an arc of winding ``winding`` plus labelled trivial circles."""

    winding: int
    circles: dict
    arc_points: tuple[tuple[float, float], ...]
    chords: tuple[_Chord, ...] = ()

    @property
    def legs(self) -> LegSet:
        return legset(self.circles)

    def enclosed(self, label) -> tuple:
        poly = self.circles[label].polygon
        return legset(
            other for other, c in self.circles.items() if other != label and point_in_polygon(c.polygon[0], poly)
        )

    def chords_at(self, k: int) -> list[_Chord]:
        return [c for c in self.chords if c.crossing == k]


def resolve(d: TangleDiagram, bits: str | Sequence[int]) -> PlanarTangle:
    """Resolve every crossing (bit 0 or 1) and trace the resulting components."""
    bits = [int(b) for b in bits]
    if len(bits) != len(d.crossings):
        raise ValueError(f"expected {len(d.crossings)} bits, got {len(bits)}")
    g = d._geometry
    pair: dict = {}
    for k, b in enumerate(bits):
        pair.update(g.pairing(k, b))

    used: set[str] = set()

    def walk(pid: str, forward: bool, component):
        """Follow pieces from ``pid`` until the component closes or reaches the puncture."""
        pts: list = []
        ids: list = []
        chords: list = []
        cur, fwd = pid, forward
        while True:
            piece = g.pieces[cur]
            used.add(cur)
            ids.append(cur)
            body = piece.points if fwd else piece.points[::-1]
            pts.extend(body if not pts else body[1:] if pts[-1] == body[0] else body)
            port = piece.end if fwd else piece.start
            if port is None:
                return pts, ids, chords
            nxt = pair[port]
            chords.append((port[0], g.port_point[port], g.port_point[nxt]))
            cur, role = g.port_piece[nxt]
            fwd = role == "start"
            if cur == pid:
                return pts, ids, chords

    arc_start = next(p for p in g.pieces.values() if p.id.startswith(d.arc.id + ".") and p.start is None)
    arc_pts, _, arc_chords = walk(arc_start.id, True, "arc")
    total = _cw_winding(arc_pts[:-1], closed=False)
    n = round(total)
    if abs(total - n) > 1e-6:
        raise ValidationError("arc winding is not an integer", total)
    chords = [_Chord(k, "arc", a, b) for k, a, b in arc_chords]
    circles = {}
    for pid in sorted(g.pieces):
        if pid in used:
            continue
        piece = g.pieces[pid]
        if piece.closed:
            used.add(pid)
            pts, ids = list(piece.points), [pid]
            cch = []
        else:
            pts, ids, cch = walk(pid, True, None)
            if pts[0] == pts[-1]:
                pts = pts[:-1]
        label = tuple(sorted(ids))
        w = _cw_winding(pts, closed=True)
        if abs(w) > 1e-6:
            raise EssentialCircle("resolved circle winds around the puncture", label)
        circles[label] = Circle(label, tuple(pts))
        chords += [_Chord(k, label, a, b) for k, a, b in cch]
    # nesting forest: parent = smallest enclosing circle
    nested = {}
    for lab, c in circles.items():
        containers = [o for o in circles if o != lab and point_in_polygon(c.polygon[0], circles[o].polygon)]
        parent = None
        if containers:
            parent = min(containers, key=lambda o: abs(_polygon_area(circles[o].polygon)))
        nested[lab] = Circle(lab, c.polygon, parent)
    return PlanarTangle(int(n), nested, tuple(arc_pts), tuple(chords))


def _polygon_area(poly) -> float:
    p = np.asarray(poly)
    return 0.5 * float(np.sum(p[:, 0] * np.roll(p[:, 1], -1) - np.roll(p[:, 0], -1) * p[:, 1]))


# -- saddles and the cube ----------------------------------------------------------


@dataclass(frozen=True)
class Saddle:
    kind: str  # C+, C-, L+, L-, R+, R-, W+, W-
    crossing: int
    source_winding: int
    target_winding: int
    removed: tuple = ()  # circle labels present only at the source
    added: tuple = ()  # circle labels present only at the target
    enclosed: tuple = ()  # legs enclosed by the split or merged circle (L/R only)

    @property
    def family(self) -> str:
        return self.kind[0]


def classify_saddle(ti: PlanarTangle, tj: PlanarTangle, crossing: int) -> Saddle:
    dn = tj.winding - ti.winding
    if dn not in (-2, 0, 2):
        raise InvalidWindingJump(f"winding jumps from {ti.winding} to {tj.winding}")
    removed = tuple(sorted(set(ti.circles) - set(tj.circles)))
    added = tuple(sorted(set(tj.circles) - set(ti.circles)))
    if dn:
        if removed or added:
            raise ValueError(f"winding saddle at crossing {crossing} also changes circles")
        return Saddle("W+" if dn > 0 else "W-", crossing, ti.winding, tj.winding)
    shape = (len(removed), len(added))
    if shape == (1, 2):
        return Saddle("C+", crossing, ti.winding, tj.winding, removed, added)
    if shape == (2, 1):
        return Saddle("C-", crossing, ti.winding, tj.winding, removed, added)
    if shape not in ((0, 1), (1, 0)):
        raise ValueError(f"saddle at crossing {crossing} changes circles {removed} -> {added}")
    split = shape == (0, 1)
    t = tj if split else ti
    label = added[0] if split else removed[0]
    side = _side(t, crossing, label)
    kind = f"{side}{'+' if split else '-'}"
    return Saddle(kind, crossing, ti.winding, tj.winding, removed, added, t.enclosed(label))


def _side(t: PlanarTangle, k: int, label) -> str:
    chords = t.chords_at(k)
    arc = [c for c in chords if c.component == "arc"]
    circ = [c for c in chords if c.component == label]
    if len(arc) != 1 or len(circ) != 1:
        raise ValueError(f"crossing {k} does not join the arc to circle {label}")
    a, c = arc[0], circ[0]
    direction = np.subtract(a.end, a.start)
    disp = np.subtract(np.add(c.start, c.end) / 2, np.add(a.start, a.end) / 2)
    return "L" if _cross(direction, disp) > 0 else "R"


@dataclass(frozen=True, eq=False)
class CubeOfResolutions:
    diagram: TangleDiagram
    vertices: dict  # bit string -> PlanarTangle
    edges: dict  # (source bits, target bits) -> Saddle
    signs: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.signs)

    @property
    def m_plus(self) -> int:
        return sum(1 for s in self.signs if s > 0)

    @property
    def m_minus(self) -> int:
        return sum(1 for s in self.signs if s < 0)

    def squares(self):
        """Yield (i, j1, j2, k) for every square i -> j1, j2 -> k of the cube."""
        m = self.size
        for bits in self.vertices:
            zeros = [p for p in range(m) if bits[p] == "0"]
            for a_, b_ in combinations(zeros, 2):
                j1 = _flip(bits, a_)
                j2 = _flip(bits, b_)
                yield bits, j1, j2, _flip(j1, b_)


def _flip(bits: str, k: int) -> str:
    return bits[:k] + ("1" if bits[k] == "0" else "0") + bits[k + 1:]


def crossing_signs(d: TangleDiagram) -> tuple[int, int]:
    s = d._geometry.signs
    return sum(1 for x in s if x > 0), sum(1 for x in s if x < 0)


def cube(d: TangleDiagram) -> CubeOfResolutions:
    m = len(d.crossings)
    vertices = {"".join(b): resolve(d, "".join(b)) for b in product("01", repeat=m)}
    edges = {}
    for bits, t in vertices.items():
        for k in range(m):
            if bits[k] == "0":
                j = _flip(bits, k)
                edges[(bits, j)] = classify_saddle(t, vertices[j], k)
    return CubeOfResolutions(d, vertices, edges, tuple(d._geometry.signs))


# -- seam, loops and twists --------------------------------------------------------


def winding_of_strands(d: TangleDiagram) -> dict[str, int]:
    """Clockwise winding of every strand about the puncture (the arc measured seam to seam)."""
    out = {}
    for s in d.strands:
        if s.kind == "arc":
            w = _cw_winding(s.points[:-1], closed=False)
        else:
            w = _cw_winding(s.points, closed=True)
        out[s.id] = int(round(w))
    return out


def seam_linking(d: TangleDiagram, closure: str = "over") -> int:
    """a+ - a- for the closure arc running along the seam (over or under the diagram)."""
    total = sum(winding_of_strands(d).values())
    if closure == "over":
        return -total
    if closure == "under":
        return total
    raise ValueError(f"closure must be 'over' or 'under', not {closure!r}")


def arc_shift(a_diff: int) -> tuple[int, int]:
    r = a_diff // 2
    return (r, 4 * r) if a_diff % 2 == 0 else (r, 4 * r + 2)


def _seam_window(d: TangleDiagram) -> tuple[float, float]:
    """A thin angular window just counter-clockwise of the seam with no vertices or crossings."""
    theta0 = math.atan2(*d.seam_direction[::-1])
    offsets = []
    for s in d.strands:
        for p in s.points:
            if np.linalg.norm(p) > d.tolerance:
                off = (math.atan2(p[1], p[0]) - theta0) % (2 * math.pi)
                if off > 1e-12:
                    offsets.append(off)
    for c in d.crossings:
        off = (math.atan2(c.at[1], c.at[0]) - theta0) % (2 * math.pi)
        if off > 1e-12:
            offsets.append(off)
    gap = min(offsets + [math.pi / 2])
    return theta0 + 0.25 * gap, theta0 + 0.75 * gap


def _ray_hits(d: TangleDiagram, theta: float) -> list[tuple[str, int, float, float]]:
    """(strand, segment, segment parameter, radius) for every strand crossing of a ray."""
    u = np.array([math.cos(theta), math.sin(theta)])
    out = []
    for s in d.strands:
        for i, (a, b) in enumerate(s.segments()):
            r = b - a
            denom = _cross(r, u)
            if abs(denom) < 1e-15:
                continue
            t = _cross(-a, u) / denom
            rad = _cross(-a, r) / denom
            if 0 <= t < 1 and rad > 0:
                out.append((s.id, i, t, rad))
    return sorted(out, key=lambda h: h[3])


def loop_number(d: TangleDiagram) -> int:
    """Number of times the strands loop around the annulus (sum of absolute windings)."""
    return sum(abs(w) for w in winding_of_strands(d).values())


def add_full_twist(d: TangleDiagram, handedness: int = 1) -> TangleDiagram:
    """Insert a full twist of the two strands passing the seam (loop number 2 only)."""
    lo, hi = _seam_window(d)
    h_lo, h_hi = _ray_hits(d, lo), _ray_hits(d, hi)
    if len(h_lo) != 2 or len(h_hi) != 2:
        raise LoopNumberNotTwo(f"{len(_ray_hits(d, 0.5 * (lo + hi)))} strand passes at the seam")
    if [(h[0], h[1]) for h in h_lo] != [(h[0], h[1]) for h in h_hi]:
        raise LoopNumberNotTwo("strand passes leave the seam window through different segments")
    inner, outer = h_lo
    angles = [lo + (hi - lo) * f for f in (0.2, 0.4, 0.6, 0.8)]

    def pt(theta, rad):
        return (rad * math.cos(theta), rad * math.sin(theta))

    r_in0, r_in1 = inner[3], h_hi[0][3]
    r_out0, r_out1 = outer[3], h_hi[1][3]

    def radii(f, swap):
        a = r_in0 + (r_in1 - r_in0) * f
        b = r_out0 + (r_out1 - r_out0) * f
        return b if swap else a

    # inner pass: in, out, in  /  outer pass: out, in, out (two crossings)
    inner_route = [pt(angles[0], radii(0.2, False)), pt(angles[1], radii(0.4, True)),
                   pt(angles[2], radii(0.6, True)), pt(angles[3], radii(0.8, False))]
    outer_route = [pt(angles[0], radii(0.2, True)), pt(angles[1], radii(0.4, False)),
                   pt(angles[2], radii(0.6, False)), pt(angles[3], radii(0.8, True))]
    new_strands = []
    for s in d.strands:
        pts = list(s.points)
        inserts = []
        for hit, route in ((inner, inner_route), (outer, outer_route)):
            if hit[0] == s.id:
                inserts.append((hit[1], hit[2], route))
        for seg, t, route in sorted(inserts, key=lambda x: -(x[0] + x[1])):
            a, b = s.segments()[seg]
            # the segment runs either with or against increasing angle
            forward = _cross(a, b - a) > 0
            pts[seg + 1:seg + 1] = route if forward else route[::-1]
        new_strands.append(Strand(s.id, s.kind, tuple(pts)))
    tmp = TangleDiagram(d.outer_radius, tuple(new_strands), (), d.comments, d.tolerance, d.match_tolerance)
    route_pts = set(inner_route) | set(outer_route)
    inner_pts = set(inner_route)
    segs = {s.id: s.segments() for s in new_strands}

    def endpoints(p: _Pass):
        a, b = segs[p.strand][p.segment]
        return (float(a[0]), float(a[1])), (float(b[0]), float(b[1]))

    def on_route(p: _Pass) -> bool:
        return all(e in route_pts for e in endpoints(p))

    def is_inner(p: _Pass) -> bool:
        return any(e in inner_pts for e in endpoints(p))

    fresh, moved = [], []
    for h in find_intersections(tmp.strands, d.tolerance):
        (fresh if on_route(h.first) and on_route(h.second) else moved).append(h)
    if len(fresh) != 2 or len(moved) != len(d.crossings):
        raise LoopNumberNotTwo(f"twist produced {len(fresh)} new crossings")
    # crossings cut by the inserted routes move slightly; carry their data over
    crossings = []
    pool = list(moved)
    for c in d.crossings:
        same = [h for h in pool if {h.first.strand, h.second.strand} == {c.over, c.under}]
        h = min(same, key=lambda h: math.dist(h.point, c.at))
        pool.remove(h)
        crossings.append(Crossing(h.point, c.over, c.under, c.over_pass))
    fresh.sort(key=lambda h: (math.atan2(h.point[1], h.point[0]) - lo) % (2 * math.pi))

    for idx, h in enumerate(fresh):
        # alternate which pass is over so that both crossings have the same sign
        inner_over = (idx == 0) == (handedness > 0)
        p_in, p_out = (h.first, h.second) if is_inner(h.first) else (h.second, h.first)
        over, under = (p_in, p_out) if inner_over else (p_out, p_in)
        over_pass = None
        if over.strand == under.strand:
            over_pass = "first" if over.pos < under.pos else "second"
        crossings.append(Crossing(h.point, over.strand, under.strand, over_pass))
    out = TangleDiagram(d.outer_radius, tuple(new_strands), tuple(crossings), d.comments, d.tolerance, d.match_tolerance)
    return out.validate()


# -- random diagrams for fuzzing ---------------------------------------------------


def random_diagram(rng: np.random.Generator, max_crossings: int = 8, loops: int | None = None,
                   n_circles: int | None = None, tries: int = 200) -> TangleDiagram:
    """A random valid diagram: a jittered clockwise spiral arc plus a few small circles."""
    R = 10.0
    for _ in range(tries):
        nloops = int(rng.integers(0, 3)) if loops is None else loops
        ncirc = int(rng.integers(0, 3)) if n_circles is None else n_circles
        theta0 = math.pi / 2
        pts = [(0.0, R)]
        steps = max(3, 5 * nloops) + int(rng.integers(0, 4))
        total = -2 * math.pi * nloops
        r_hi, r_lo = 8.0, 2.0
        for k in range(1, steps):
            f = k / steps
            th = theta0 + total * f + rng.normal(0, 0.4)
            rad = r_hi + (r_lo - r_hi) * f + rng.normal(0, 1.2)
            rad = min(max(rad, 0.8), 9.3)
            pts.append((rad * math.cos(th), rad * math.sin(th)))
        pts.append((0.0, float(rng.uniform(0.6, 1.5))))
        pts.append((0.0, 0.0))
        strands = [Strand("a", "arc", tuple(pts))]
        for c in range(ncirc):
            cx, cy = rng.uniform(-6, 6, size=2)
            rad = rng.uniform(0.8, 2.5)
            k = int(rng.integers(4, 7))
            base = rng.uniform(0, 2 * math.pi)
            poly = []
            for j in range(k):
                th = base + 2 * math.pi * j / k
                rr = rad * rng.uniform(0.7, 1.3)
                poly.append((cx + rr * math.cos(th), cy + rr * math.sin(th)))
            strands.append(Strand(f"c{c}", "circle", tuple(poly)))
        try:
            bare = TangleDiagram(R, tuple(strands), ())
            hits = find_intersections(bare.strands, 1e-9)
            if len(hits) > max_crossings:
                continue
            crossings = []
            for h in hits:
                flip = bool(rng.integers(0, 2))
                if h.first.strand == h.second.strand:
                    crossings.append(Crossing(h.point, h.first.strand, h.first.strand, "first" if flip else "second"))
                else:
                    a_, b_ = (h.first.strand, h.second.strand) if flip else (h.second.strand, h.first.strand)
                    crossings.append(Crossing(h.point, a_, b_))
            d = TangleDiagram(R, tuple(strands), tuple(crossings), match_tolerance=1e-9)
            d.validate()
            if d._geometry.rho < 1e-4:
                continue
            return d
        except ValidationError:
            continue
    raise RuntimeError("could not generate a valid random diagram")
