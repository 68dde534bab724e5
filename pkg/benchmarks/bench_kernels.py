"""Compare the compiled and pure-Python subset scanners on real ball tables.

    python benchmarks/bench_kernels.py [--repeat 3]

Both backends must return identical results; the script aborts otherwise.
"""

from __future__ import annotations

import argparse
import sys
import time
from math import comb

import numpy as np

from smalldoubling import kernels
from smalldoubling.groups import parse_tag
from smalldoubling.search import BallSpec, enumerate_ball, product_table

CASES = [
    # (group, ball, k, window)
    ("zd(1)", "0..12", 5, (0, 11)),
    ("heis", "1,1", 4, (10, 10)),
    ("fib", "1,1,1", 4, (0, 9)),
    ("bs12", "2,1,1", 5, (13, 13)),
    ("fib", "2,2,1", 3, (7, 7)),
]


def run(backend, table, n_ids, k, lo, hi):
    n = table.shape[0]
    free = np.arange(n, dtype=np.int64)
    fixed = np.zeros(0, dtype=np.int64)
    t0 = time.perf_counter()
    done, hits = backend.scan_subsets(table, n_ids, fixed, free, k, 0, comb(n, k), lo, hi)
    return time.perf_counter() - t0, done, hits


def main() -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args()
    if kernels.cython_backend is None:
        print("compiled extension not built; only the Python backend is available", file=sys.stderr)
        return 1
    print(f"{'group':6} {'ball':8} {'k':>2} {'subsets':>9} {'python s':>9} {'cython s':>9} {'speedup':>8}")
    for group, ball_text, k, (lo, hi) in CASES:
        tag = parse_tag(group)
        universe = enumerate_ball(BallSpec.parse(tag, ball_text))
        table, n_ids = product_table(universe)
        best = {}
        results = {}
        for name, backend in (("python", kernels.python_backend), ("cython", kernels.cython_backend)):
            times = []
            for _ in range(args.repeat):
                secs, done, hits = run(backend, table, n_ids, k, lo, hi)
                times.append(secs)
            best[name] = min(times)
            results[name] = (done, [(tuple(i), s) for i, s in hits])
        if results["python"] != results["cython"]:
            print(f"backend mismatch on {group} {ball_text} k={k}", file=sys.stderr)
            return 2
        n = results["python"][0]
        print(
            f"{group:6} {ball_text:8} {k:>2} {n:>9} {best['python']:>9.3f} {best['cython']:>9.4f} "
            f"{best['python'] / max(best['cython'], 1e-9):>7.1f}x"
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
