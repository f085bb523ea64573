"""Compare the numba and pure-numpy GF(2) rank kernels.

Two workloads: random square matrices of growing size, and the differential
blocks that actually occur when computing homology of the bundled corpus.

    python3 benchmarks/bench_rank.py [--sizes 64 256 1024] [--repeat 5]
"""
from __future__ import annotations

import argparse
import glob
import os
import time

import numpy as np

from annular_khr import _kernels
from annular_khr.gf2core import F2Matrix


def _numba_kernel():
    import numba as nb

    return nb.njit(cache=True)(_kernels._rank_loop)


def _time(fn, mats, ncols, repeat) -> tuple[float, list[int]]:
    best = float("inf")
    ranks: list[int] = []
    for _ in range(repeat):
        work = [m.copy() for m in mats]
        t0 = time.perf_counter()
        ranks = [int(fn(w, n)) for w, n in zip(work, ncols)]
        best = min(best, time.perf_counter() - t0)
    return best, ranks


def random_workload(n: int, count: int, rng: np.random.Generator):
    mats = [F2Matrix.from_dense(rng.integers(0, 2, size=(n, n))).data for _ in range(count)]
    return mats, [n] * count


def corpus_workload():
    from annular_khr.complexes import complex_s2s1, complex_s3
    from annular_khr.diagram import cube, load_atd
    from annular_khr.twisted import build_twisted

    here = os.path.dirname(__file__)
    mats, ncols = [], []
    for path in sorted(glob.glob(os.path.join(here, "..", "src", "annular_khr", "corpus", "*.atd"))):
        cb = cube(load_atd(path))
        complexes = [complex_s3(build_twisted(cb, "+"), "over")]
        try:
            complexes.append(complex_s2s1(build_twisted(cb, "-")))
        except Exception:
            pass
        for c in complexes:
            groups = c.groups()
            for g in groups:
                b = c.block(g, groups)
                if b.rows and b.cols:
                    mats.append(np.ascontiguousarray(b.data))
                    ncols.append(b.cols)
    return mats, ncols


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+", default=[64, 256, 1024])
    ap.add_argument("--count", type=int, default=4)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args(argv)

    nb_kernel = _numba_kernel()
    nb_kernel(np.zeros((1, 1), dtype=np.uint64), 1)  # compile outside the timings
    rng = np.random.default_rng(args.seed)
    workloads = [(f"random {n}x{n} x{args.count}", *random_workload(n, args.count, rng)) for n in args.sizes]
    workloads.append(("corpus blocks", *corpus_workload()))

    print(f"{'workload':<26} {'matrices':>8} {'numpy s':>10} {'numba s':>10} {'speedup':>8}")
    for name, mats, ncols in workloads:
        t_np, r_np = _time(_kernels.rank_packed_numpy, mats, ncols, args.repeat)
        t_nb, r_nb = _time(nb_kernel, mats, ncols, args.repeat)
        if r_np != r_nb:
            raise SystemExit(f"{name}: backends disagree")
        print(f"{name:<26} {len(mats):>8} {t_np:>10.5f} {t_nb:>10.5f} {t_np / max(t_nb, 1e-12):>8.1f}")


if __name__ == "__main__":
    main()
