"""Compare the compiled Jacobi kernel with the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]

Times ``jacobi_tall`` directly from both modules on random square and tall
matrices, and checks that both return the same singular values.
"""

import argparse
import time

import numpy as np

from rankcapra import _kernels_py
from rankcapra.linalg import SVD_TOL

try:
    from rankcapra import _kernels
except ImportError:  # extension not built
    _kernels = None

SHAPES = [(3, 3), (5, 5), (10, 10), (20, 20), (40, 10), (50, 50)]


def best_time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    print(f"{'shape':>8} {'python (ms)':>12} {'cython (ms)':>12} {'speedup':>8} {'max |ds|':>10}")
    for shape in SHAPES:
        a = rng.standard_normal(shape)
        sweeps = 100 * shape[1]

        def run_py(a=a, sweeps=sweeps):
            return _kernels_py.jacobi_tall(a, True, SVD_TOL, sweeps)

        t_py = best_time(run_py, args.repeat)
        s_py = np.sort(_kernels_py.column_norms(run_py()[0]))
        if _kernels is None:
            print(f"{str(shape):>8} {t_py * 1e3:12.3f} {'n/a':>12}")
            continue

        def run_cy(a=a, sweeps=sweeps):
            return _kernels.jacobi_tall(a, True, SVD_TOL, sweeps)

        t_cy = best_time(run_cy, args.repeat)
        s_cy = np.sort(_kernels.column_norms(run_cy()[0]))
        diff = float(np.max(np.abs(s_py - s_cy)))
        print(f"{str(shape):>8} {t_py * 1e3:12.3f} {t_cy * 1e3:12.3f} {t_py / t_cy:8.1f} {diff:10.2e}")


if __name__ == "__main__":
    main()
