"""Timing comparison of the compiled and fallback quadrature kernels.

Run as ``python -m wignerflow.benchmark``. Sizes mirror the real workload:
one call per cached pair field, (n_x, n_y) x (n_p, n_y) with n_y around a
thousand Simpson nodes.
"""

import argparse
import time

import numpy as np

from ._kernel import HAVE_COMPILED, transform


def _time(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def run(n_x=201, n_p=201, n_y=1025, repeats=5, num_threads=4, seed=0):
    rng = np.random.default_rng(seed)
    f = rng.standard_normal((n_x, n_y))
    gt = rng.standard_normal((n_p, n_y)) + 1j * rng.standard_normal((n_p, n_y))

    rows = [("fallback (numpy matmul)",
             _time(lambda: transform(f, gt, backend="fallback"), repeats))]
    if HAVE_COMPILED:
        rows.append(("compiled, 1 thread",
                     _time(lambda: transform(f, gt, 1, "compiled"), repeats)))
        rows.append((f"compiled, {num_threads} threads",
                     _time(lambda: transform(f, gt, num_threads, "compiled"),
                           repeats)))
        same = np.array_equal(transform(f, gt, 1, "compiled"),
                              transform(f, gt, num_threads, "compiled"))
    else:
        same = None

    print(f"transform {n_x}x{n_y} (real) by {n_p}x{n_y} (complex), "
          f"best of {repeats}")
    base = rows[0][1]
    for name, t in rows:
        print(f"  {name:28s} {t * 1e3:8.2f} ms   x{base / t:5.2f}")
    if same is None:
        print("compiled kernel not built; fallback only")
    else:
        print(f"serial/parallel bitwise identical: {same}")
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nx", type=int, default=201)
    ap.add_argument("--np", dest="n_p", type=int, default=201)
    ap.add_argument("--ny", type=int, default=1025)
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--threads", type=int, default=4)
    args = ap.parse_args(argv)
    run(args.nx, args.n_p, args.ny, args.repeats, args.threads)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
