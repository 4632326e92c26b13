"""Time the numba kernels against the pure-numpy fallback.

Run from the repository root::

    python benchmarks/bench_kernels.py [--repeat 3]

Each kernel is called once on both backends before timing (this triggers
numba compilation, or loads it from the cache) and the outputs are checked
for agreement. The best of ``--repeat`` runs is reported.
"""

import argparse
import math
import time

import numpy as np

from ncdegree.kernels import LOG_FACTORIAL, numba_backend, numpy_backend


def _cases(rng):
    c1 = rng.standard_normal(21) + 1j * rng.standard_normal(21)
    c1 /= np.linalg.norm(c1)
    c2 = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    c2 /= np.linalg.norm(c2)

    axis = np.linspace(-4, 4, 401)
    gx, gy = np.meshgrid(axis, axis, indexing="ij")
    re, im = gx.ravel().copy(), gy.ravel().copy()
    coarse = np.linspace(-4, 4, 61)

    radius = math.sqrt(3) + 3.0
    lat = np.linspace(-radius, radius, 9)
    x, y = np.meshgrid(lat, lat, indexing="ij")
    keep = x * x + y * y <= radius * radius
    disk = np.column_stack([x[keep], y[keep]])
    starts = np.ascontiguousarray(np.hstack([np.repeat(disk, len(disk), axis=0),
                                             np.tile(disk, (len(disk), 1))]))
    step = radius / 8

    return {
        "q1_values (161k points, N=20)":
            lambda b: b.q1_values(c1, re, im, LOG_FACTORIAL),
        "wigner_values (161k points, N=20)":
            lambda b: b.wigner_values(c1, re, im, LOG_FACTORIAL),
        "lattice_max2 (61^4 points, 4x4)":
            lambda b: b.lattice_max2(c2, coarse, LOG_FACTORIAL)[0],
        f"multistart_nm ({len(starts)} starts, 4x4)":
            lambda b: b.multistart_nm(c2, 2, starts, radius, radius, step, np.eye(4),
                                      1e-10, 2000, LOG_FACTORIAL)[1].min(),
    }


def _best_time(fn, repeat):
    best = math.inf
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    if numba_backend is None:
        raise SystemExit("numba is not installed; nothing to compare against")

    cases = _cases(np.random.default_rng(0))
    print(f"{'kernel':<40} {'numpy [s]':>10} {'numba [s]':>10} {'speedup':>8}")
    for name, call in cases.items():
        ref = np.asarray(call(numpy_backend))
        got = np.asarray(call(numba_backend))
        if not np.allclose(ref, got, rtol=1e-9, atol=1e-12):
            raise SystemExit(f"{name}: backends disagree")
        t_np = _best_time(lambda: call(numpy_backend), args.repeat)
        t_nb = _best_time(lambda: call(numba_backend), args.repeat)
        print(f"{name:<40} {t_np:>10.4f} {t_nb:>10.4f} {t_np / t_nb:>7.1f}x")


if __name__ == "__main__":
    main()
