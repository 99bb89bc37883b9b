"""Time the numba and numpy kernel backends on typical GP sizes.

    python3 benchmarks/bench_accel.py [--repeat 20]

The numba path is compiled once before timing.
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from tinybo import _accel


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args(argv)
    if not _accel.HAVE_NUMBA:
        raise SystemExit("numba is not installed")

    rng = np.random.default_rng(0)
    print(f"{'kernel':28s} {'n':>5s} {'d':>3s} {'numpy ms':>10s} {'numba ms':>10s} {'speedup':>8s}")
    for n, d in [(50, 2), (200, 2), (200, 6), (1000, 2)]:
        X = rng.random((n, d))
        Q = rng.random((2000, d))
        inv_ls = np.full(d, 5.0)
        cases = [
            ("cross_kernel SE (2000 x n)", lambda: _accel.cross_kernel_numpy(Q, X, inv_ls, 1.0, 0),
             lambda: _accel.cross_kernel_numba(Q, X, inv_ls, 1.0, 0)),
            ("kernel_with_grads SE ARD", lambda: _accel.kernel_with_grads_numpy(X, inv_ls, 1.0, 0, True),
             lambda: _accel.kernel_with_grads_numba(X, inv_ls, 1.0, 0, True)),
            ("kernel_with_grads M52 ARD", lambda: _accel.kernel_with_grads_numpy(X, inv_ls, 1.0, 1, True),
             lambda: _accel.kernel_with_grads_numba(X, inv_ls, 1.0, 1, True)),
        ]
        for name, f_np, f_nb in cases:
            f_nb()  # compile
            t_np = min(timeit.repeat(f_np, number=1, repeat=args.repeat)) * 1e3
            t_nb = min(timeit.repeat(f_nb, number=1, repeat=args.repeat)) * 1e3
            print(f"{name:28s} {n:5d} {d:3d} {t_np:10.3f} {t_nb:10.3f} {t_np / t_nb:8.2f}")


if __name__ == "__main__":
    main()
