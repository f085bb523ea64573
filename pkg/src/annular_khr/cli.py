"""The ``khr`` command line.

Every run produces one report ``{command, inputs, results, failures, timings}``,
printed either as a text table or as a single JSON document.  Exit status is 0
when everything passes, 1 on a verification failure and 2 on bad input.

Numeric knobs read ``KHR_*`` environment variables when the flag is absent.
Timings are omitted unless ``--timings`` is given, so reports are byte-stable.
"""
from __future__ import annotations

import csv
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Callable, Iterable, Sequence

import click
import numpy as np

from . import appendix_b, geometry
from .category import UndeterminedProduct, UnsupportedWinding, verify_consistency
from .complexes import collapse_z2, complex_s2s1, complex_s3, s2s1_table, s3_table
from .diagram import (
    ParseError,
    TangleDiagram,
    ValidationError,
    add_full_twist,
    cube,
    dump_atd,
    load_atd,
    random_diagram,
)
from .gf2core import DifferentialNotHomogeneous, DifferentialNotSquareZero
from .twisted import (
    build_twisted,
    check_delta_squared,
    check_edge_gradings,
    verify_bar_natan,
    verify_cup_cap_commute,
)

__all__ = ["main", "run", "Report", "InputError", "corpus_names", "corpus_path", "resolve_input"]


class InputError(click.ClickException):
    exit_code = 2


@dataclass
class Report:
    command: str
    inputs: dict = field(default_factory=dict)
    results: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)
    text: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self, with_timings: bool) -> str:
        doc = {
            "command": self.command,
            "inputs": self.inputs,
            "results": self.results,
            "failures": self.failures,
            "timings": {k: round(v, 4) for k, v in sorted(self.timings.items())} if with_timings else {},
        }
        return json.dumps(_jsonable(doc), indent=2, sort_keys=True)

    def render_text(self, with_timings: bool) -> str:
        lines = list(self.text)
        for f in self.failures:
            lines.append(f"FAIL {f}")
        lines.append(f"{self.command}: {'ok' if self.ok else f'{len(self.failures)} failure(s)'}")
        if with_timings:
            lines += [f"  {k}: {v:.3f}s" for k, v in sorted(self.timings.items())]
        return "\n".join(lines)


def _jsonable(x: Any):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, float):
        return float(f"{x:.6g}")
    return x


# -- corpus ------------------------------------------------------------------------


def _corpus_dir():
    return resources.files("annular_khr") / "corpus"


def corpus_names() -> list[str]:
    return sorted(p.name[:-4] for p in _corpus_dir().iterdir() if p.name.endswith(".atd"))


def corpus_path(name: str):
    name = Path(name).name
    if name.endswith(".atd"):
        name = name[:-4]
    if name not in corpus_names():
        raise InputError(f"no corpus diagram named {name!r}")
    return _corpus_dir() / f"{name}.atd"


def resolve_input(arg: str):
    """A filesystem path, or the name of a bundled diagram (``clasp``, ``corpus/clasp.atd``)."""
    p = Path(arg)
    if p.is_file():
        return p
    return corpus_path(arg)


def _load(arg: str) -> TangleDiagram:
    path = resolve_input(arg)
    try:
        return load_atd(path)
    except (ParseError, ValidationError) as e:
        raise InputError(f"{arg}: {type(e).__name__}: {e}") from e


def _timed(rep: Report, key: str, fn: Callable, *args, **kw):
    t0 = time.perf_counter()
    try:
        return fn(*args, **kw)
    finally:
        rep.timings[key] = rep.timings.get(key, 0.0) + time.perf_counter() - t0


def _pmap(fn: Callable, items: Sequence, jobs: int) -> list:
    """Order-preserving map, optionally across worker processes."""
    if jobs <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * jobs))))


# -- homology commands ---------------------------------------------------------------


def s3_report(arg: str, closure: str) -> Report:
    rep = Report("s3", {"diagram": arg, "closure": closure})
    d = _load(arg)
    try:
        table = _timed(rep, "homology", s3_table, d, closure)
    except (UndeterminedProduct, UnsupportedWinding) as e:
        raise InputError(f"{type(e).__name__}: {e}") from e
    rep.results = {"khr": table.to_json(), "summary": str(table)}
    rep.text = [str(table)] + [f"  h={h:>3} q={q:>3}  dim {n}" for h, q, n in table.rows()]
    return rep


def s2s1_report(arg: str, collapse: bool) -> Report:
    rep = Report("s2s1", {"diagram": arg, "collapse_z2": collapse})
    d = _load(arg)
    try:
        table = _timed(rep, "homology", s2s1_table, d)
    except (UndeterminedProduct, UnsupportedWinding) as e:
        raise InputError(f"{type(e).__name__}: {e}") from e
    rep.results = {"khr": table.to_json(collapsed=collapse), "summary": str(table)}
    rep.text = [str(table)] + [f"  h={h:>3} q={q:>3}  dim {n}" for h, q, n in table.rows()]
    if collapse:
        z2 = collapse_z2(table)
        rep.text.append("mod 2: " + " + ".join(f"{n}F[{h},{q}]" for (h, q), n in z2.items()))
    return rep


def cube_report(arg: str, sign: str) -> Report:
    rep = Report("cube", {"diagram": arg, "sign": sign})
    d = _load(arg)
    t = build_twisted(cube(d), sign)
    vertices, edges = [], []
    for bits in sorted(t.vertices):
        v = t.vertices[bits]
        vertices.append({"bits": bits, "winding": v.winding, "legs": len(v.legs), "shift": list(v.shift)})
        rep.text.append(f"{bits}: L_{v.winding} (x) A^{len(v.legs)} [{v.shift.h},{v.shift.q}]")
    for (i, j), m in sorted(t.delta.items()):
        terms = [
            {"generator": str(g), "columns": {str(k): sorted(v) for k, v in sorted(tm.entries.items())}}
            for g, tm in sorted(m.terms.items())
        ]
        edges.append({"from": i, "to": j, "terms": terms})
        rep.text.append(f"{i} -> {j}: {m.describe()}")
    rep.results = {"vertices": vertices, "edges": edges}
    rep.failures = [f"grading {w}" for w in check_edge_gradings(t)]
    return rep


def twist_report(arg: str, count: int, handedness: int) -> Report:
    rep = Report("twist add", {"diagram": arg, "count": count, "handedness": handedness})
    d = _load(arg)
    for _ in range(count):
        try:
            d = add_full_twist(d, handedness)
        except ValueError as e:
            raise InputError(f"{type(e).__name__}: {e}") from e
    text = dump_atd(d)
    rep.results = {"atd": text, "crossings": len(d.crossings)}
    rep.text = [text.rstrip("\n")]
    return rep


# -- verifiers ------------------------------------------------------------------------


def verify_relations(max_regions: int = 3) -> Report:
    rep = Report("verify relations", {"max_regions": max_regions})
    rows = _timed(rep, "bar-natan", verify_bar_natan, max_regions)
    rows += _timed(rep, "cup-cap", verify_cup_cap_commute, min(max_regions, 2))
    counts: dict[str, list[int]] = {}
    for r in rows:
        c = counts.setdefault(r.relation, [0, 0])
        c[0 if r.ok else 1] += 1
        if not r.ok:
            rep.failures.append(r.row().rstrip())
    rep.results = {"checks": len(rows), "by_relation": {k: {"pass": v[0], "fail": v[1]} for k, v in sorted(counts.items())}}
    rep.text = [f"{k:<28} pass {v[0]:>4}  fail {v[1]}" for k, v in sorted(counts.items())]
    return rep


def verify_category() -> Report:
    rep = Report("verify category")
    res = _timed(rep, "consistency", verify_consistency)
    rep.results = {k: {"ok": not v, "witnesses": v[:5]} for k, v in res.items()}
    for k, v in res.items():
        rep.text.append(f"{k:<14} {'ok' if not v else f'{len(v)} counterexample(s)'}")
        rep.failures += [f"{k}: {w}" for w in v]
    return rep


def _sdr_task(item):
    fam, regions = item
    fi = appendix_b.build_family(fam, **regions)
    res = appendix_b.verify_sdr(fi)
    res["parity"] = appendix_b.check_parities(fi)
    return fi.label, res


def _saddle_task(item):
    fam, name, env = item
    r = appendix_b.verify_saddle_commutation(fam, name, env)
    return r.row(), r.reconstructed, r.failures


def verify_appendix_b(lmax: int = 2, rmax: int = 2, cmax: int = 2, max_total: int = 2, jobs: int = 1) -> Report:
    rep = Report("verify appendix-b", {"lmax": lmax, "rmax": rmax, "cmax": cmax, "max_total": max_total})
    sdr = _timed(rep, "sdr", _pmap, _sdr_task, appendix_b.family_grid(lmax, rmax, cmax), jobs)
    saddles = _timed(rep, "saddles", _pmap, _saddle_task, appendix_b.saddle_grid(max_total), jobs)
    matrix = {}
    for label, res in sdr:
        matrix[label] = {k: not v for k, v in res.items()}
        rep.failures += [f"{label} {k}: {w}" for k, ws in res.items() for w in ws]
        rep.text.append(f"{label:<28} " + " ".join(f"{k}={'ok' if not v else 'FAIL'}" for k, v in res.items()))
    rows = []
    for row, recon, fails in saddles:
        rows.append({"case": row, "reconstructed": recon, "ok": not any(fails.values())})
        rep.failures += [f"{row} {k}: {w}" for k, ws in fails.items() for w in ws]
    rep.text.append(f"saddle checks: {len(rows)} ({sum(r['ok'] for r in rows)} ok)")
    rep.results = {"sdr": matrix, "saddles": rows}
    return rep


def _square_task(item):
    """δ² per sign and ∂² per closure for one diagram; undetermined products are reported, not failed."""
    name, d = item
    out: dict[str, str] = {}
    cb = cube(d)
    for sign in "+-":
        try:
            t = build_twisted(cb, sign)
            out[f"delta{sign}"] = "ok" if check_delta_squared(t).ok else "FAIL"
        except UndeterminedProduct:
            out[f"delta{sign}"] = "undetermined"
            continue
        builders = {"+": [("over", lambda: complex_s3(t, "over"))],
                    "-": [("under", lambda: complex_s3(t, "under")), ("s2s1", lambda: complex_s2s1(t))]}
        for key, build in builders[sign]:
            try:
                build().check()
                out[f"d2 {key}"] = "ok"
            except (UndeterminedProduct, UnsupportedWinding):
                out[f"d2 {key}"] = "undetermined"
            except (DifferentialNotSquareZero, DifferentialNotHomogeneous):
                out[f"d2 {key}"] = "FAIL"
    return name, out


def fuzz_diagrams(count: int, seed: int, max_crossings: int = 8) -> list[tuple[str, TangleDiagram]]:
    rng = np.random.default_rng(seed)
    return [(f"fuzz-{seed}-{k}", random_diagram(rng, max_crossings=max_crossings)) for k in range(count)]


def sigma_negative_control() -> bool:
    """True when dropping one arc-side Sigma term in the nested fixture breaks δ²."""
    cb = cube(load_atd(corpus_path("nested_sigma")))
    for edge, s in sorted(cb.edges.items()):
        if s.kind in ("R+", "L+") and s.enclosed:
            try:
                return not check_delta_squared(build_twisted(cb, "-", drop_sigma=[edge])).ok
            except UndeterminedProduct:
                return False
    return False


def verify_delta_squared(inputs: Iterable[str] = (), fuzz: int = 100, seed: int = 12345, max_crossings: int = 8,
                         jobs: int = 1) -> Report:
    names = list(inputs) or corpus_names()
    rep = Report("verify delta-squared", {"diagrams": names, "fuzz": fuzz, "seed": seed, "max_crossings": max_crossings})
    items = [(n, _load(n)) for n in names] + fuzz_diagrams(fuzz, seed, max_crossings)
    rows = _timed(rep, "squares", _pmap, _square_task, items, jobs)
    tally: dict[str, int] = {}
    for name, out in rows:
        for key, status in sorted(out.items()):
            tally[status] = tally.get(status, 0) + 1
            if status == "FAIL":
                rep.failures.append(f"{name} {key}")
        if any(v == "undetermined" for v in out.values()):
            rep.text.append(f"{name}: undetermined ({', '.join(k for k, v in sorted(out.items()) if v == 'undetermined')})")
    control = _timed(rep, "negative control", sigma_negative_control)
    if not control:
        rep.failures.append("negative control: dropping Sigma did not break δ²")
    rep.results = {"diagrams": len(items), "tally": dict(sorted(tally.items())), "negative_control_breaks": control,
                   "per_diagram": {n: o for n, o in rows[: len(names)]}}
    rep.text.append(f"{len(items)} diagrams: " + ", ".join(f"{k} {v}" for k, v in sorted(tally.items())))
    rep.text.append(f"negative control (Sigma dropped) breaks δ²: {control}")
    return rep


EXPECTED_COUNTS = {("W0", "L0"): 2, ("L0", "L0"): 4, ("L2", "L0"): 4}


def verify_geometry(tol: float = 1e-10, eps: float = 1e-2, tol_fd: float = 1e-5, csv_path: str | None = None) -> Report:
    rep = Report("verify geometry", {"tol": tol, "eps": eps, "tol_fd": tol_fd})
    summary = _timed(rep, "residuals", geometry.residual_summary, eps)
    for kind, row in sorted(summary.items()):
        rep.text.append(f"{kind:<7} {row['points']:>5} points  residual {row['residual']:.1e}  trace {row['trace']:.1e}")
        if row["residual"] > tol or row["trace"] > tol:
            rep.failures.append(f"{kind} residual {row['residual']:.3e} / trace {row['trace']:.3e} above {tol}")
    gap = geometry.l0_off_slice_gap(eps)
    if not gap > 0:
        rep.failures.append("L0 off the slice satisfies ab = 1")
    checks = _timed(rep, "finite differences", geometry.fd_checks, tol_fd, (eps, eps / 10))
    rich = geometry.richardson_consistent(checks, tol_fd)
    for ch in checks:
        rep.text.append(ch.row())
        if not ch.ok:
            rep.failures.append(ch.row())
    rep.failures += [f"{k}: eps-consistency" for k, ok in sorted(rich.items()) if not ok]
    counts = {}
    for (c1, c2), want in EXPECTED_COUNTS.items():
        key = f"{c1}/{c2}"
        try:
            got = _timed(rep, "pushoff", geometry.pushoff_and_count, c1, c2, eps=eps)
        except geometry.NonTransverse as e:
            rep.failures.append(f"{key}: {e}")
            continue
        counts[key] = got
        rep.text.append(f"|{c1}^(1) ∩ {c2}^(0)| = {got} (expected {want})")
        if got != want:
            rep.failures.append(f"{key}: {got} intersections, expected {want}")
    if csv_path:
        _dump_curves(csv_path, eps)
    rep.results = {
        "residuals": summary,
        "l0_off_slice_gap": gap,
        "finite_differences": {ch.name: {"error": ch.error, "ok": ch.ok} for ch in checks},
        "eps_consistency": rich,
        "counts": counts,
    }
    return rep


def _dump_curves(path: str, eps: float) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["curve", "state", "branch", "alpha", "beta"])
        for name in ("W0", "L0", "L2"):
            for k, c in enumerate(geometry.slice_curve(name, eps, 801)):
                pushed = geometry.converged_flow(c, 0.2, -0.2)[0]
                for state, pts in (("static", c), ("pushed", pushed)):
                    for a_, b_ in pts:
                        w.writerow([name, state, k, f"{a_:.10f}", f"{b_:.10f}"])


def verify_everything(jobs: int = 1) -> Report:
    rep = Report("verify all")
    parts = [
        verify_relations(),
        verify_category(),
        verify_appendix_b(jobs=jobs),
        verify_delta_squared(jobs=jobs),
        verify_geometry(),
    ]
    for p in parts:
        rep.results[p.command] = {"ok": p.ok, "failures": len(p.failures)}
        rep.failures += [f"[{p.command}] {f}" for f in p.failures]
        rep.timings.update({f"{p.command}: {k}": v for k, v in p.timings.items()})
        rep.text.append(f"{p.command:<24} {'ok' if p.ok else f'{len(p.failures)} failure(s)'}")
    return rep


# -- click wiring ---------------------------------------------------------------------


@click.group()
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text", envvar="KHR_FORMAT",
              show_default=True, help="Report format.")
@click.option("--timings/--no-timings", default=False, envvar="KHR_TIMINGS", help="Include wall-clock timings.")
@click.option("--jobs", type=click.IntRange(min=1), default=1, envvar="KHR_JOBS", show_default=True,
              help="Worker processes for verification grids.")
@click.pass_context
def cli(ctx: click.Context, fmt: str, timings: bool, jobs: int) -> None:
    """Annular tangle homology and its verifiers."""
    if ctx.obj is None:
        ctx.obj = {}
    ctx.obj.update(fmt=fmt, timings=timings, jobs=jobs)


def _emit(ctx: click.Context, rep: Report) -> None:
    obj = ctx.find_root().obj
    if obj["fmt"] == "json":
        click.echo(rep.to_json(obj["timings"]))
    else:
        click.echo(rep.render_text(obj["timings"]))
    ctx.find_root().obj["status"] = 0 if rep.ok else 1


@cli.command()
@click.option("--closure", type=click.Choice(["over", "under"]), required=True)
@click.argument("diagram")
@click.pass_context
def s3(ctx, closure, diagram):
    """Khr of the overpass or underpass closure in S^3."""
    _emit(ctx, s3_report(diagram, closure))


@cli.command()
@click.option("--collapse-z2", is_flag=True, help="Also print the bigradings reduced mod 2.")
@click.argument("diagram")
@click.pass_context
def s2s1(ctx, collapse_z2, diagram):
    """Generalized reduced Khovanov homology in S^2 x S^1."""
    _emit(ctx, s2s1_report(diagram, collapse_z2))


@cli.command("cube")
@click.option("--sign", type=click.Choice(["+", "-"]), default="-", show_default=True)
@click.argument("diagram")
@click.pass_context
def cube_cmd(ctx, sign, diagram):
    """Print the twisted complex built from the cube of resolutions."""
    _emit(ctx, cube_report(diagram, sign))


@cli.group()
def twist():
    """Full twists at the seam."""


@twist.command("add")
@click.option("--count", type=click.IntRange(min=1), default=1, show_default=True)
@click.option("--handedness", type=click.Choice(["1", "-1"]), default="1", show_default=True)
@click.option("-o", "--output", type=click.Path(dir_okay=False, writable=True), default=None)
@click.argument("diagram")
@click.pass_context
def twist_add(ctx, count, handedness, output, diagram):
    """Insert full twists and print (or write) the new diagram."""
    rep = twist_report(diagram, count, int(handedness))
    if output:
        Path(output).write_text(rep.results["atd"])
        rep.text = [f"wrote {output}"]
    _emit(ctx, rep)


@cli.group()
def verify():
    """Exhaustive verifiers."""


@verify.command("relations")
@click.option("--max-regions", type=click.IntRange(min=1), default=3, envvar="KHR_MAX_REGIONS", show_default=True)
@click.pass_context
def verify_relations_cmd(ctx, max_regions):
    """Bar-Natan relations, cup/cap naturality and R1/R2 homotopy identities."""
    _emit(ctx, verify_relations(max_regions))


@verify.command("category")
@click.pass_context
def verify_category_cmd(ctx):
    """Orientation, associativity, invariance, bigrading and square checks."""
    _emit(ctx, verify_category())


@verify.command("appendix-b")
@click.option("--lmax", type=click.IntRange(min=0), default=2, envvar="KHR_LMAX", show_default=True)
@click.option("--rmax", type=click.IntRange(min=0), default=2, envvar="KHR_RMAX", show_default=True)
@click.option("--cmax", type=click.IntRange(min=0), default=2, envvar="KHR_CMAX", show_default=True)
@click.option("--max-total", type=click.IntRange(min=0), default=2, envvar="KHR_MAX_TOTAL", show_default=True,
              help="Largest region total for saddle cases.")
@click.pass_context
def verify_appendix_b_cmd(ctx, lmax, rmax, cmax, max_total):
    """Deformation retractions and saddle squares of the five twist families."""
    _emit(ctx, verify_appendix_b(lmax, rmax, cmax, max_total, ctx.find_root().obj["jobs"]))


@verify.command("delta-squared")
@click.option("--fuzz", type=click.IntRange(min=0), default=100, envvar="KHR_FUZZ", show_default=True)
@click.option("--seed", type=int, default=12345, envvar="KHR_SEED", show_default=True)
@click.option("--max-crossings", type=click.IntRange(min=0), default=8, envvar="KHR_MAX_CROSSINGS", show_default=True)
@click.argument("diagrams", nargs=-1)
@click.pass_context
def verify_delta_cmd(ctx, fuzz, seed, max_crossings, diagrams):
    """δ² = 0 and ∂² = 0 on the corpus (or the given diagrams) plus fuzzed ones."""
    _emit(ctx, verify_delta_squared(diagrams, fuzz, seed, max_crossings, ctx.find_root().obj["jobs"]))


@verify.command("geometry")
@click.option("--tol", type=float, default=1e-10, envvar="KHR_TOL", show_default=True, help="Residual tolerance.")
@click.option("--eps", type=float, default=1e-2, envvar="KHR_EPS", show_default=True, help="Holonomy perturbation.")
@click.option("--tol-fd", type=float, default=1e-5, envvar="KHR_TOL_FD", show_default=True)
@click.option("--csv", "csv_path", type=click.Path(dir_okay=False, writable=True), default=None,
              help="Dump static and pushed-off slice curves here.")
@click.pass_context
def verify_geometry_cmd(ctx, tol, eps, tol_fd, csv_path):
    """Representation residuals, finite differences and pushoff counts."""
    _emit(ctx, verify_geometry(tol, eps, tol_fd, csv_path))


@verify.command("all")
@click.pass_context
def verify_all_cmd(ctx):
    """Run every verifier with default parameters."""
    _emit(ctx, verify_everything(ctx.find_root().obj["jobs"]))


@cli.group()
def corpus():
    """The bundled diagrams."""


@corpus.command("list")
@click.pass_context
def corpus_list(ctx):
    rep = Report("corpus list")
    entries = {}
    for name in corpus_names():
        text = corpus_path(name).read_text()
        first = next((ln[1:].strip() for ln in text.splitlines() if ln.startswith("#")), "")
        entries[name] = first
        rep.text.append(f"{name:<18} {first}")
    rep.results = {"diagrams": entries}
    _emit(ctx, rep)


@corpus.command("show")
@click.argument("name")
@click.pass_context
def corpus_show(ctx, name):
    rep = Report("corpus show", {"name": name})
    text = corpus_path(name).read_text()
    rep.results = {"atd": text}
    rep.text = [text.rstrip("\n")]
    _emit(ctx, rep)


def run(argv: Sequence[str] | None = None) -> int:
    """Run the CLI and return its exit status instead of exiting."""
    try:
        ctx_obj: dict = {}
        cli.main(args=list(argv) if argv is not None else None, standalone_mode=False, obj=ctx_obj)
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.ClickException as e:
        e.show()
        return 2
    except click.exceptions.Abort:
        return 2
    except (FileNotFoundError, OSError) as e:
        click.echo(f"Error: {e}", err=True)
        return 2
    return ctx_obj.get("status", 0)


def main() -> None:
    sys.exit(run())
