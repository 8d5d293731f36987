"""Compiled vs numpy matrix Stieltjes kernel.

Runs both backends on the same discretized family-II weight, checks that
they agree and prints best-of-repeat timings.

    python benchmarks/bench_stieltjes.py --m 200 400 800 --N 25
"""
import argparse
import time

import numpy as np

from bochner_forge import _kernels
from bochner_forge._kernels import _stieltjes_py
from bochner_forge.classify import build_pair, scan_family


def best_of(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--m", type=int, nargs="+", default=[100, 200, 400, 800])
    ap.add_argument("--N", type=int, default=25)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    p = scan_family("II", 1, check=False).accepted[0]
    pair = build_pair(p)
    try:
        from bochner_forge._kernels import _stieltjes as compiled
    except ImportError:
        compiled = None
    print(f"active backend: {_kernels.BACKEND}")
    print(f"{'m':>6} {'python [ms]':>12} {'cython [ms]':>12} {'speedup':>8} {'max |dB|':>10}")
    for m in args.m:
        d = pair.W.discretize(m)
        run_py = lambda: _stieltjes_py.stieltjes(d.x, d.w, d.S, args.N)
        t_py = best_of(run_py, args.repeat)
        if compiled is None:
            print(f"{m:6d} {1e3 * t_py:12.3f} {'n/a':>12} {'n/a':>8} {'n/a':>10}")
            continue
        run_c = lambda: compiled.stieltjes(d.x, d.w, d.S, args.N)
        t_c = best_of(run_c, args.repeat)
        diff = np.abs(run_py()[0] - run_c()[0]).max()
        print(f"{m:6d} {1e3 * t_py:12.3f} {1e3 * t_c:12.3f} {t_py / t_c:8.1f} {diff:10.2e}")


if __name__ == "__main__":
    main()
