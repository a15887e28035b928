"""Compare the pure-numpy and numba kernel implementations.

Run:  python3 benchmarks/bench_kernels.py
Set GRIDOPT_NO_NUMBA=1 before importing to verify the package falls back
cleanly; this script imports both implementations directly and times them
side by side (the numba path is warmed up before timing to exclude JIT cost).
"""

import time

import numpy as np

from gridopt import _kernels


def _time(fn, *args, repeat=5):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_pivot():
    rng = np.random.default_rng(0)
    print("tableau_pivot: 200 pivots on an (m, 2m+n) tableau")
    print(f"{'m':>6} {'numpy ms':>10} {'numba ms':>10} {'speedup':>8}")
    for m in (50, 150, 400):
        T0 = rng.normal(size=(m, 3 * m))
        rows = rng.integers(m, size=200)
        cols = rng.integers(3 * m, size=200)

        def run(fn):
            T = T0.copy()
            for r, j in zip(rows, cols):
                if abs(T[r, j]) < 1e-6:
                    T[r, j] = 1.0
                fn(T, int(r), int(j))

        t_np = _time(run, _kernels.tableau_pivot_numpy)
        if _kernels.NUMBA_ENABLED:
            run(_kernels.tableau_pivot_numba)  # warm up JIT
            t_nb = _time(run, _kernels.tableau_pivot_numba)
            print(f"{m:>6} {t_np * 1e3:>10.2f} {t_nb * 1e3:>10.2f} {t_np / t_nb:>7.1f}x")
        else:
            print(f"{m:>6} {t_np * 1e3:>10.2f} {'n/a':>10} {'':>8}")


def bench_interp():
    rng = np.random.default_rng(1)
    print("\ninterp_many: P points against a 4-D table (8 breakpoints/axis)")
    print(f"{'P':>8} {'numpy ms':>10} {'numba ms':>10} {'speedup':>8}")
    axes = [np.linspace(0, 1, 8) for _ in range(4)]
    axes_flat = np.concatenate(axes)
    offsets = np.arange(0, 5) * 8
    strides = np.array([512, 64, 8, 1], dtype=np.int64)
    values = rng.normal(size=8**4)
    for P in (1_000, 10_000, 100_000):
        pts = rng.uniform(0, 1, size=(P, 4))
        args = (axes_flat, offsets.astype(np.int64), strides, values, pts)
        t_np = _time(_kernels.interp_many_numpy, *args)
        if _kernels.NUMBA_ENABLED:
            _kernels.interp_many_numba(*args)  # warm up JIT
            t_nb = _time(_kernels.interp_many_numba, *args)
            a = _kernels.interp_many_numpy(*args)
            b = _kernels.interp_many_numba(*args)
            assert np.allclose(a, b, atol=1e-12)
            print(f"{P:>8} {t_np * 1e3:>10.2f} {t_nb * 1e3:>10.2f} {t_np / t_nb:>7.1f}x")
        else:
            print(f"{P:>8} {t_np * 1e3:>10.2f} {'n/a':>10} {'':>8}")


if __name__ == "__main__":
    print(f"numba enabled: {_kernels.NUMBA_ENABLED}\n")
    bench_pivot()
    bench_interp()
