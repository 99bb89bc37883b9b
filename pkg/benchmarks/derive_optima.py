"""Derive the optimum of every registered test function independently.

Dense grid over the natural domain, then bounded L-BFGS-B refinement from
the best grid cells.  Prints value and argmin per function so the registry
constants can be checked (or regenerated) by hand.

    python benchmarks/derive_optima.py [--resolution 201]
"""

import argparse
import itertools

import numpy as np
from scipy.optimize import minimize

from tinybo.bench.functions import REGISTRY


def grid_then_refine(f, resolution, top=20):
    lo, hi = f.lower, f.upper
    # keep the grid under ~2e6 points in high dimension
    per_axis = min(resolution, int(round(2e6 ** (1.0 / f.dim))))
    axes = [np.linspace(a, b, per_axis) for a, b in zip(lo, hi)]
    best = []
    for chunk in _chunks(itertools.product(*axes), 200_000):
        Z = np.array(chunk)
        vals = np.array([f(z) for z in Z])
        idx = np.argsort(vals)[:top]
        best.extend(zip(vals[idx], Z[idx]))
    best.sort(key=lambda t: t[0])
    results = []
    for _, z0 in best[:top]:
        res = minimize(f, z0, method="L-BFGS-B", bounds=list(zip(lo, hi)),
                       options={"ftol": 1e-15, "gtol": 1e-12, "maxiter": 10_000})
        results.append((float(res.fun), res.x))
    results.sort(key=lambda t: t[0])
    return results[0], per_axis


def _chunks(it, n):
    buf = []
    for item in it:
        buf.append(item)
        if len(buf) == n:
            yield buf
            buf = []
    if buf:
        yield buf


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--resolution", type=int, default=201)
    args = ap.parse_args()
    for name, f in REGISTRY.items():
        (val, z), per_axis = grid_then_refine(f, args.resolution)
        print(f"{name:16s} grid={per_axis:4d}/axis  best={val!r}  at={np.round(z, 8).tolist()}"
              f"  registered={f.known_best_value!r}  diff={abs(val - f.known_best_value):.2e}")


if __name__ == "__main__":
    main()
