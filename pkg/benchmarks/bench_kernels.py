"""Compiled vs pure-Python kernels on the three hot loops.

Usage: python benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import math
import timeit

import numpy as np

from mterm_lab._kernels import available_backends


def cases(rng):
    r, d = rng.standard_normal(256), rng.standard_normal(256)
    X = rng.standard_normal((4000, 8))
    x = rng.standard_normal(16)
    y = rng.standard_normal(16)
    x /= np.sum(np.abs(x) ** 3) ** (1 / 3)
    y /= np.sum(np.abs(y) ** 3) ** (1 / 3)
    return {
        "segment_argmin (n=256, p=3)": lambda k: k.segment_argmin(r, d, 3.0, 1e-12),
        "farthest_point (4000x8, 256 centers)": lambda k: k.farthest_point_traversal(X, 2.0, 256, 0),
        "farthest_point l_inf (4000x8, 256 centers)": lambda k: k.farthest_point_traversal(X, math.inf, 256, 0),
        "modulus_ascent (n=16, 50 sweeps)": lambda k: k.modulus_ascent(x, y, 0.3, 3.0, 50, 0.1),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = available_backends()
    rng = np.random.default_rng(0)
    print(f"backends: {', '.join(sorted(backends))}")
    print(f"{'kernel':45s} " + " ".join(f"{b:>12s}" for b in sorted(backends)) + "   speedup")
    for name, fn in cases(rng).items():
        times = {}
        for b, mod in sorted(backends.items()):
            n = 1 if b == "python" else 3
            times[b] = min(timeit.repeat(lambda: fn(mod), number=n, repeat=args.repeat)) / n
        speed = times["python"] / times["cython"] if "cython" in times else float("nan")
        print(f"{name:45s} " + " ".join(f"{times[b] * 1e3:10.3f}ms" for b in sorted(times)) + f"   {speed:7.1f}x")


if __name__ == "__main__":
    main()
