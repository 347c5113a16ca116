"""Benchmark the compiled sub-window kernels against the numpy fallback.

Times select_centers and accumulate_windows on a synthetic speckle frame,
plus the full r_autocorrelation path through each backend, and prints a
small table with speedups.

Usage: python benchmarks/bench_kernels.py [--windows N] [--frame-size N]
"""

import argparse
import time

import numpy as np

from rspeckle._backend import available_backends
from rspeckle.seeds import SeedSpec, rng_for


def synthetic_frame(size, seed=0):
    rng = np.random.Generator(np.random.PCG64(seed))
    noise = rng.standard_normal((size, size))
    kernel = np.exp(-0.5 * (np.fft.fftfreq(size) * size / 2.5) ** 2)
    smooth = np.fft.ifft2(np.fft.fft2(noise) * np.outer(kernel, kernel)).real
    return np.ascontiguousarray(smooth**2)


def time_call(fn, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--windows", type=int, default=100_000)
    parser.add_argument("--frame-size", type=int, default=400)
    parser.add_argument("--window-size", type=int, default=81)
    args = parser.parse_args()

    frame = synthetic_frame(args.frame_size)
    window = args.window_size
    rng = rng_for(SeedSpec(0), "window", 0)
    high = args.frame_size - window + 1
    tops = rng.integers(0, high, size=(args.windows, 2), dtype=np.int64)
    tops_r = np.ascontiguousarray(tops[:, 0])
    tops_c = np.ascontiguousarray(tops[:, 1])

    backends = available_backends()
    print(f"frame {args.frame_size}^2, window {window}, {args.windows} draws")
    print(f"{'backend':<8} {'select (s)':>12} {'accumulate (s)':>16}")

    results = {}
    for name, kernels in sorted(backends.items()):
        rows, cols, valid = kernels.select_centers(frame, tops_r, tops_c, window)
        ok = valid.astype(bool)
        t_select = time_call(
            lambda: kernels.select_centers(frame, tops_r, tops_c, window)
        )
        accum = np.zeros((window, window))
        t_accum = time_call(
            lambda: kernels.accumulate_windows(frame, rows[ok], cols[ok], window, accum)
        )
        results[name] = (t_select, t_accum)
        print(f"{name:<8} {t_select:>12.4f} {t_accum:>16.4f}")

    if {"python", "cython"} <= set(results):
        py, cy = results["python"], results["cython"]
        print(
            f"speedup  select {py[0] / cy[0]:>10.1f}x "
            f"accumulate {py[1] / cy[1]:>8.1f}x"
        )


if __name__ == "__main__":
    main()
