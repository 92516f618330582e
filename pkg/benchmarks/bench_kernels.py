"""Time the numba kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import time

import numpy as np

from spectra import _kernels as K
from spectra.algebraic import field_from
from spectra.spectrum import compute_V_interval
from spectra.transition import build_M0_pisot


def best_of(fn, repeat):
    fn()  # warm up (jit compile)
    t = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        t.append(time.perf_counter() - t0)
    return min(t)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--poly", default="x^5-x^4-x^3+x^2-1")
    args = ap.parse_args()
    if not K.HAS_NUMBA:
        raise SystemExit("numba is not installed")

    f = field_from(args.poly)
    M = build_M0_pisot(compute_V_interval(f), f).matrix.astype(float)
    lam, _, _ = K.power_iteration(M, tol=1e-15)  # the limit needs lambda well past 1e-13
    rng = np.random.default_rng(0)
    x = rng.random(M.shape[0])
    pos = np.sort(rng.uniform(-1, 1, 20000))
    mass = rng.random(20000)
    mass /= mass.sum()
    U = rng.random((10**4, 29)) * (rng.random((10**4, 29)) < 0.6)
    V = rng.random((10**4, 29)) * (rng.random((10**4, 29)) < 0.6)
    U[:, 0] = V[:, 0] = 1

    cases = {
        f"vecmat (n={M.shape[0]}) x100": lambda b: [K.vecmat(M, x, backend=b) for _ in range(100)],
        "power_iteration": lambda b: K.power_iteration(M, backend=b),
        "perron_iterate": lambda b: K.perron_iterate(M, lam, 1e-13, 10**5, M.shape[0], 0.0, backend=b),
        "w1_uniform (20000 atoms)": lambda b: K.w1_uniform(pos, mass, -1.0, 1.0, backend=b),
        "proj_distance_rows (1e4 x 29)": lambda b: K.proj_distance_rows(U, V, backend=b),
    }
    print(f"{'kernel':34s} {'numba [s]':>11s} {'numpy [s]':>11s} {'speedup':>8s}")
    for name, fn in cases.items():
        a = best_of(lambda: fn("numba"), args.repeat)
        b = best_of(lambda: fn("numpy"), args.repeat)
        print(f"{name:34s} {a:11.5f} {b:11.5f} {b / a:8.1f}")


if __name__ == "__main__":
    main()
