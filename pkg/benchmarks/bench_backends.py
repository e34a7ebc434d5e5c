"""Benchmark the compiled kernel extension against the NumPy fallback.

Run as: python3 benchmarks/bench_backends.py
"""

import time

import numpy as np

from hypflats import (
    Curvature,
    FlatConfig,
    Tolerance,
    available_backends,
    intersection_probability,
    set_backend,
)
from hypflats import _backend

R = np.linspace(0.01, 0.99, 257)
Z = np.linspace(0.01, 0.99, 257)


def bench_kernel(name, repeats=20):
    set_backend(name)
    theta = Z * np.pi / 2
    # warm-up
    _backend.log_kernel(30, 5, -1.0, 0.5, Z)
    t0 = time.perf_counter()
    for _ in range(repeats):
        for r in R:
            _backend.log_kernel(30, 5, -1.0, r, Z)
            _backend.log_kernel_theta(30, 5, -1.0, r, theta)
    return (time.perf_counter() - t0) / repeats


def bench_probability(name, repeats=5):
    set_backend(name)
    cfg = FlatConfig(20, 5, 2, 1.0)
    K = Curvature(-1.0)
    tol = Tolerance()
    intersection_probability(cfg, K, tol)  # warm-up
    t0 = time.perf_counter()
    for _ in range(repeats):
        intersection_probability(cfg, K, tol)
    return (time.perf_counter() - t0) / repeats


def main():
    names = available_backends()
    print(f"available backends: {names}")
    kernel = {n: bench_kernel(n) for n in names}
    prob = {n: bench_probability(n) for n in names}
    print(f"\n{'backend':<10} {'kernel eval (ms)':>18} {'probability (ms)':>18}")
    for n in names:
        print(f"{n:<10} {kernel[n] * 1e3:>18.3f} {prob[n] * 1e3:>18.3f}")
    if "cython" in kernel and "python" in kernel:
        print(f"\nkernel speedup:      {kernel['python'] / kernel['cython']:.2f}x")
        print(f"probability speedup: {prob['python'] / prob['cython']:.2f}x")
    set_backend("cython" if "cython" in names else "python")


if __name__ == "__main__":
    main()
