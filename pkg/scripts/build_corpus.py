"""Regenerate the bundled ATD corpus under src/annular_khr/corpus/.

Every diagram is built from explicit polylines; crossing data is assigned
by a small rule per diagram so that the geometry stays reproducible.
Run from the repository root:  python scripts/build_corpus.py
"""
from __future__ import annotations

import math
from pathlib import Path

from annular_khr.diagram import (
    Crossing,
    Strand,
    TangleDiagram,
    add_full_twist,
    dump_atd,
    find_intersections,
)

R = 10.0
OUT = Path(__file__).resolve().parents[1] / "src" / "annular_khr" / "corpus"


def polar(deg: float, rad: float) -> tuple[float, float]:
    t = math.radians(deg)
    return (round(rad * math.cos(t), 9), round(rad * math.sin(t), 9))


def circle(cx: float, cy: float, rad: float, k: int = 12, phase: float = 0.0, clockwise: bool = False):
    pts = []
    for j in range(k):
        th = phase + 2 * math.pi * j / k
        pts.append((round(cx + rad * math.cos(th), 9), round(cy + rad * math.sin(th), 9)))
    return tuple(pts[::-1] if clockwise else pts)


def assemble(strands, rule, comments=()) -> TangleDiagram:
    """Find all intersections and let ``rule(index, hit)`` pick (over, under, over_pass)."""
    hits = find_intersections(strands)
    hits.sort(key=lambda h: (round(h.point[0], 6), round(h.point[1], 6)))
    crossings = []
    for i, h in enumerate(hits):
        over, under, over_pass = rule(i, h)
        crossings.append(Crossing(h.point, over, under, over_pass))
    return TangleDiagram(R, tuple(strands), tuple(crossings), tuple(comments)).validate()


def pass_order(strand: Strand, hits):
    """Positions of all passes of ``strand`` through the given self-intersections, in order."""
    events = []
    for i, h in enumerate(hits):
        for p in (h.first, h.second):
            if p.strand == strand.id:
                events.append((p.pos, i, p))
    return sorted(events, key=lambda e: e[0])


def alternating(strand: Strand, start_over: bool = True):
    """Rule making a single strand alternate over/under along its own length."""
    hits = find_intersections([strand])
    hits.sort(key=lambda h: (round(h.point[0], 6), round(h.point[1], 6)))
    over_at = {}
    for k, (pos, i, p) in enumerate(pass_order(strand, hits)):
        if (k % 2 == 0) == start_over:
            over_at[i] = pos
    def rule(i, h):
        first_is_over = abs(over_at[i] - min(h.first.pos, h.second.pos)) < 1e-12
        return (strand.id, strand.id, "first" if first_is_over else "second")
    return rule


def strand_over(order):
    """Rule for crossings between distinct strands: earlier id in ``order`` goes over."""
    rank = {sid: k for k, sid in enumerate(order)}

    def rule(i, h):
        a, b = h.first.strand, h.second.strand
        if a == b:
            raise ValueError("self-crossing needs an explicit rule")
        return (a, b, None) if rank[a] < rank[b] else (b, a, None)

    return rule


def keep_self(base: TangleDiagram, order):
    """Reuse the self-crossings of ``base``; crossings between strands follow ``order``."""
    known = {(round(c.at[0], 6), round(c.at[1], 6)): c.over_pass for c in base.crossings}
    other = strand_over(order)

    def rule(i, h):
        if h.first.strand == h.second.strand:
            return (h.first.strand, h.first.strand, known[(round(h.point[0], 6), round(h.point[1], 6))])
        return other(i, h)

    return rule


def by_index(table):
    """Explicit per-hit choice: table[i] = over strand id, or 'first'/'second' for self-crossings."""

    def rule(i, h):
        choice = table[i]
        if choice in ("first", "second"):
            return (h.first.strand, h.first.strand, choice)
        other = h.second.strand if h.first.strand == choice else h.first.strand
        return (choice, other, None)

    return rule


# -- building blocks -----------------------------------------------------------------


def straight_arc():
    return Strand("a", "arc", ((0.0, R), (0.0, 0.0)))


def spiral_points(bulge: bool):
    pts = [(0.0, R)]
    for k in range(25):
        rad = 6.5 - 3.5 * k / 24
        if bulge and k in (17, 18, 19):
            rad = 7.5
        pts.append(polar(90 - 30 * k, rad))
    pts.append((0.0, 0.0))
    return tuple(pts)


def clasp(swap: bool = False) -> TangleDiagram:
    arc = Strand("a", "arc", spiral_points(True))
    hits = find_intersections([arc])
    # the lower-right crossing has the first pass over, the other the second
    base = {}
    for h in hits:
        base[h.point] = "first" if h.point[0] > 0 else "second"
    if swap:
        base = {k: ("second" if v == "first" else "first") for k, v in base.items()}
    return assemble([arc], lambda i, h: ("a", "a", base[h.point]))


def p2_planar(extra=()) -> list:
    return [Strand("a", "arc", spiral_points(False)), *extra]


def kink(positive: bool) -> TangleDiagram:
    arc = Strand("a", "arc", ((0.0, R), (0.0, 8.0), (1.5, 5.5), (4.5, 5.5), (4.5, 7.5), (1.5, 7.5), (0.0, 5.5), (0.0, 0.0)))
    return assemble([arc], lambda i, h: ("a", "a", "second" if positive else "first"))


def write(name: str, d: TangleDiagram, comments):
    d = TangleDiagram(d.outer_radius, d.strands, d.crossings, tuple(comments), d.tolerance, d.match_tolerance)
    OUT.mkdir(parents=True, exist_ok=True)
    (OUT / f"{name}.atd").write_text(dump_atd(d), encoding="utf-8")
    return d


def build() -> dict[str, TangleDiagram]:
    out = {}

    def put(name, d, *comments):
        out[name] = write(name, d, comments)

    put("trivial_arc", assemble([straight_arc()], strand_over(["a"])),
        "A straight arc from the outer to the inner boundary with no crossings.",
        "Oracle for the loop-0 grading offsets (acceptance criterion 10).")
    put("clasp", clasp(),
        "Reconstructs the two-crossing example tangle whose arc winds twice about the puncture.",
        "Overpass closure is the unknot, underpass closure the right trefoil.",
        "Consumed by acceptance criteria 1, 2, 3, 4, 5, 9.")
    put("clasp_mirror", clasp(swap=True),
        "The clasp tangle with every crossing switched (both crossings negative).",
        "Consumed by acceptance criteria 5 and 9.")
    put("p2_planar", assemble(p2_planar(), strand_over(["a"])),
        "Crossingless arc winding twice about the puncture.",
        "Consumed by acceptance criteria 3 and 9.")
    put("p2_twisted", add_full_twist(out["p2_planar"], 1),
        "The planar double spiral with one full twist inserted at the seam.",
        "Consumed by acceptance criteria 5 and 9.")
    put("kink_positive", kink(True),
        "Trivial arc with one positive curl (R1 partner of trivial_arc).",
        "Consumed by acceptance criteria 5 and 11.")
    put("kink_negative", kink(False),
        "Trivial arc with one negative curl (R1 partner of trivial_arc).",
        "Consumed by acceptance criteria 5 and 11.")
    put("clasp_circle", assemble([*clasp().strands, Strand("z", "circle", circle(-6.0, 6.0, 1.5))], keep_self(clasp(), ["a", "z"])),
        "The clasp tangle together with a small unlinked circle.",
        "Consumed by acceptance criterion 5.")

    # nested fixture: an arc curl enclosing a figure-eight circle
    # (the curl sits on the right of the descending arc so the arc-side saddle is R+)
    eight = Strand("f", "circle", ((-2.5, 6.0), (-4.0, 7.0), (-4.0, 6.0), (-2.5, 7.0)))
    arc = Strand("a", "arc", tuple((-x, y) for x, y in kink(False).arc.points))
    put("nested_sigma", assemble([arc, eight], by_index({0: "first", 1: "second"})),
        "Arc curl enclosing a figure-eight circle: a circle split happens inside a circle split from the arc.",
        "Dropping the Sigma term of the arc-side split breaks the square (acceptance criterion 5).")

    # loop-0 links
    hopf_circle = Strand("z", "circle", circle(1.0, 6.0, 2.0, k=16, phase=0.1))
    put("hopf_tangle", assemble([straight_arc(), hopf_circle], by_index({0: "a", 1: "z"})),
        "Straight arc threaded once through a circle: its closure is the Hopf link.",
        "Consumed by acceptance criterion 10.")
    put("trefoil_tangle", long_trefoil(),
        "A long trefoil tied in the arc away from the puncture (loop number 0).",
        "Consumed by acceptance criterion 10.")

    # isotopic pairs for acceptance criterion 11
    free = Strand("z", "circle", circle(-5.0, 5.0, 1.5))
    put("r2_before", assemble([straight_arc(), free], strand_over(["a", "z"])),
        "Straight arc beside an unlinked circle.",
        "R2 partner of r2_after (acceptance criterion 11).")
    pushed = Strand("z", "circle", circle(-1.0, 5.0, 1.5))
    put("r2_after", assemble([straight_arc(), pushed], strand_over(["a", "z"])),
        "The circle of r2_before pushed under the arc (two crossings, arc over both).",
        "R2 partner of r2_before (acceptance criterion 11).")
    for name, x in (("r3_left", -0.35), ("r3_right", 0.35)):
        c1 = Strand("u", "circle", circle(-0.6, 5.5, 1.6, k=16, phase=0.05))
        c2 = Strand("v", "circle", circle(0.6, 5.5, 1.6, k=16, phase=0.15))
        arc = Strand("a", "arc", ((0.0, R), (x, 8.5), (x, 2.5), (0.0, 1.5), (0.0, 0.0)))
        # the two circles form a Hopf link, the arc lies above both
        rule = hopf_pair_rule()
        put(name, assemble([arc, c1, c2], rule),
            f"Arc over a Hopf pair of circles, passing {'left' if x < 0 else 'right'} of both circle crossings.",
            "r3_left and r3_right differ by two R3 moves (acceptance criterion 11).")
    spiral = p2_planar()[0]
    put("p2_r2_before", assemble([spiral, Strand("z", "circle", circle(-7.8, -4.0, 0.9))], strand_over(["a", "z"])),
        "Planar double spiral with an unlinked circle outside it.",
        "R2 partner of p2_r2_after (acceptance criterion 11).")
    put("p2_r2_after", assemble([spiral, Strand("z", "circle", circle(-5.02, -2.9, 0.9))], strand_over(["a", "z"])),
        "The circle of p2_r2_before pushed under the outer spiral turn.",
        "R2 partner of p2_r2_before (acceptance criterion 11).")
    put("clasp_kink", clasp_with_kink(),
        "The clasp tangle with an extra negative curl on its outer end (R1 partner of clasp).",
        "Consumed by acceptance criterion 11.")

    # reconstructions of the loop-2 example pairs (acceptance criterion 13)
    for name, d, text in example_pairs():
        put(name, d, *text)
    return out


def hopf_pair_rule():
    def rule(i, h):
        ids = {h.first.strand, h.second.strand}
        if "a" in ids:
            other = (ids - {"a"}).pop()
            return ("a", other, None)
        # u over v at the upper crossing, v over u at the lower one
        return ("u", "v", None) if h.point[1] > 5.5 else ("v", "u", None)

    return rule


def long_trefoil() -> TangleDiagram:
    cx, cy, s = 0.0, 5.5, 1.0
    ts = [3 * math.pi - 0.15 - (2 * math.pi - 0.3) * k / 72 for k in range(73)]
    body = [(round(cx + s * (math.sin(t) + 2 * math.sin(2 * t)), 9), round(cy + s * (math.cos(t) - 2 * math.cos(2 * t)), 9)) for t in ts]
    pts = ((0.0, R), (-5.0, 8.0), (-5.0, 1.5), body[0]) + tuple(body[1:]) + ((0.0, 1.5), (0.0, 0.0))
    arc = Strand("a", "arc", pts)
    return assemble([arc], alternating(arc, start_over=True))


def clasp_with_kink() -> TangleDiagram:
    base = spiral_points(True)
    # a small curl on the first segment near the outer boundary
    curl = ((0.0, 9.5), (0.6, 8.9), (1.4, 8.9), (1.4, 9.5), (0.6, 9.5), (0.3, 8.6))
    pts = (base[0],) + curl + base[1:]
    arc = Strand("a", "arc", pts)
    hits = find_intersections([arc])
    choice = {}
    for h in hits:
        if h.point[1] > 8.0:
            choice[h.point] = "second"
        else:
            choice[h.point] = "first" if h.point[0] > 0 else "second"
    return assemble([arc], lambda i, h: ("a", "a", choice[h.point]))


def ring(rad: float, k: int = 24, phase: float = 0.13, clockwise: bool = True):
    return circle(0.0, 0.0, rad, k=k, phase=phase, clockwise=clockwise)


def double_loop(k: int = 48):
    """A closed curve winding twice about the puncture with one self-crossing."""
    pts = []
    for j in range(k):
        th = 2 * (2 * math.pi * j / k)
        rad = 5.0 + 1.8 * math.sin(math.pi * j / k - 0.4)
        pts.append(polar(-math.degrees(th) + 37.0, rad))
    return tuple(pts)


def example_pairs():
    out = []
    arc = straight_arc()
    # two cycles and an unknot: a straight arc crossed by two concentric rings
    rings = [Strand("u", "circle", ring(4.0)), Strand("v", "circle", ring(6.5))]
    out.append(("two_cycles_t1", assemble([arc, *rings], strand_over(["a", "u", "v"])),
                ("Reconstruction: straight arc (the unknot) crossed by two parallel clockwise rings.",
                 "Isotopic in S2xS1 to two_cycles_t2 (acceptance criterion 13).")))
    spiral1 = Strand("a", "arc", ((0.0, R),) + tuple(polar(90 - 30 * k, 8.0 - 5.0 * k / 12) for k in range(13)) + ((0.0, 0.0),))
    ring1 = Strand("u", "circle", ring(5.2))
    small = Strand("z", "circle", circle(-1.5, -1.0, 0.5))
    out.append(("two_cycles_t2", assemble([spiral1, ring1, small], strand_over(["a", "u", "z"])),
                ("Reconstruction: arc winding once, one clockwise ring crossing it, and a separate small circle.",
                 "Isotopic in S2xS1 to two_cycles_t1 (acceptance criterion 13).")))
    rings_flip = [Strand("u", "circle", ring(4.0)), Strand("v", "circle", ring(6.5, clockwise=False))]
    out.append(("two_cycles_t3", assemble([arc, *rings_flip], strand_over(["a", "u", "v"])),
                ("two_cycles_t1 with the outer ring reversed.",
                 "Isotopic in S2xS1 to two_cycles_t4 (acceptance criterion 13).")))
    ring1_flip = Strand("u", "circle", ring(5.2, clockwise=False))
    out.append(("two_cycles_t4", assemble([spiral1, ring1_flip, small], strand_over(["a", "u", "z"])),
                ("two_cycles_t2 with its ring reversed.",
                 "Isotopic in S2xS1 to two_cycles_t3 (acceptance criterion 13).")))
    loop2 = Strand("u", "circle", double_loop())
    out.append(("double_cycle_t1", assemble([arc, loop2], double_cycle_rule()),
                ("Reconstruction: straight arc (the unknot) crossed by a circle winding twice.",
                 "Isotopic in S2xS1 to double_cycle_t2 (acceptance criterion 13).")))
    out.append(("double_cycle_t2", assemble(p2_planar([Strand("z", "circle", circle(-7.8, -4.0, 0.9))]), strand_over(["a", "z"])),
                ("Reconstruction: the planar double spiral together with a separate small circle.",
                 "Isotopic in S2xS1 to double_cycle_t1 (acceptance criterion 13).")))
    return out


def double_cycle_rule():
    # chosen so that all three crossings are positive; the other seven
    # over/under assignments give different tables
    def rule(i, h):
        if h.first.strand == h.second.strand:
            return ("u", "u", "second")
        return ("a", "u", None)

    return rule


if __name__ == "__main__":
    for name, d in sorted(build().items()):
        print(f"{name:<18} crossings={len(d.crossings)}")
