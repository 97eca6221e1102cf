"""Benchmark the RK4 inner loops: numba kernels vs the numpy fallback.

Workload mirrors the verification runs: a five-node cubic ring stepped
through a long transient plus sampling window. Run directly:

    python benchmarks/bench_integrator.py
"""
import time

import numpy as np

from ringhopf import _kernels
from ringhopf.ring_model import cubic_ring

REPEATS = 5
TRANSIENT_STEPS = 50_000
WINDOW_STEPS = 10_000


def _workloads():
    yield "cubic_z5-like (n=5, one range)", cubic_ring(5, {1: -2.0}), -1.1
    yield "long-range (n=7, three ranges)", cubic_ring(
        7, {1: -1.2, 2: 0.4, 3: -0.7}), -0.3


def _time_backend(label, transient_fn, record_fn, offsets, weights, quad, cubic, x0, h):
    out = np.empty((WINDOW_STEPS + 1, x0.size))
    # warm up (includes jit compilation for the numba path)
    x = x0.copy()
    transient_fn(offsets, weights, quad, cubic, x, h, 100)
    best = np.inf
    for _ in range(REPEATS):
        x = x0.copy()
        t0 = time.perf_counter()
        status, _ = transient_fn(offsets, weights, quad, cubic, x, h, TRANSIENT_STEPS)
        status2, _ = record_fn(offsets, weights, quad, cubic, x, h, WINDOW_STEPS, out)
        elapsed = time.perf_counter() - t0
        assert status == 0 and status2 == 0
        best = min(best, elapsed)
    steps = TRANSIENT_STEPS + WINDOW_STEPS
    print(f"  {label:<8s} best {best:8.4f} s   "
          f"{1e9 * best / steps:8.1f} ns/step")
    return best, out.copy()


def main():
    total_steps = TRANSIENT_STEPS + WINDOW_STEPS
    print(f"RK4 kernel benchmark: {total_steps} steps per run, "
          f"best of {REPEATS}")
    for name, vf, lam in _workloads():
        print(name)
        offsets, weights, quad, cubic = vf.kernel_arrays(lam)
        x0 = 1e-3 * np.cos(2 * np.pi * np.arange(vf.network.n) / vf.network.n)
        t_np, out_np = _time_backend(
            "numpy", _kernels.rk4_transient_np, _kernels.rk4_record_np,
            offsets, weights, quad, cubic, x0, 0.01)
        if not _kernels.NUMBA_AVAILABLE:
            print("  numba    not installed, skipping")
            continue
        t_nb, out_nb = _time_backend(
            "numba", _kernels.rk4_transient_nb, _kernels.rk4_record_nb,
            offsets, weights, quad, cubic, x0, 0.01)
        drift = float(np.max(np.abs(out_np - out_nb)))
        print(f"  speedup  {t_np / t_nb:6.1f}x   (max state drift {drift:.2e})")


if __name__ == "__main__":
    main()
