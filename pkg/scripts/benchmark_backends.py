"""Benchmark the leapfrog stepping kernel: numba backend vs pure numpy.

Runs the same nonlinear blow-up problem on both backends, reports cell
updates per second, and checks that the two paths produce identical output.

Usage: python3 scripts/benchmark_backends.py [--h H] [--t-max T]
"""

import argparse
import math
import os
import time

import numpy as np

from waveblowup.freewave import bump_data
from waveblowup.simulator import SimConfig, run


def bench(backend, data, eps, cfg, repeats):
    os.environ["WAVEBLOWUP_BACKEND"] = backend
    run(data, eps, cfg, snap_every=64)  # warm-up (numba compilation, caches)
    best = math.inf
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = run(data, eps, cfg, snap_every=64)
        best = min(best, time.perf_counter() - t0)
    steps = len(result.times) - 1
    nr = int(round(cfg.r_max / cfg.h)) + 1
    return result, best, steps * nr / best


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--h", type=float, default=1.0 / 64.0)
    parser.add_argument("--t-max", type=float, default=40.0)
    parser.add_argument("--eps", type=float, default=0.5)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    data = bump_data()
    cfg = SimConfig(h=args.h, r_max=args.t_max + 2.0, t_max=args.t_max)
    old = os.environ.get("WAVEBLOWUP_BACKEND")
    try:
        res_nb, t_nb, rate_nb = bench("numba", data, args.eps, cfg, args.repeats)
        res_np, t_np, rate_np = bench("numpy", data, args.eps, cfg, args.repeats)
    finally:
        if old is None:
            os.environ.pop("WAVEBLOWUP_BACKEND", None)
        else:
            os.environ["WAVEBLOWUP_BACKEND"] = old

    print(f"problem: h={args.h:g}, t_max={args.t_max:g}, eps={args.eps:g}")
    print(f"numba : {t_nb:8.3f} s  ({rate_nb:.3g} cell updates/s)")
    print(f"numpy : {t_np:8.3f} s  ({rate_np:.3g} cell updates/s)")
    print(f"speedup numba/numpy: {t_np / t_nb:.2f}x")
    same = np.array_equal(res_nb.amps, res_np.amps) and np.array_equal(
        res_nb.grid.values, res_np.grid.values
    )
    print(f"outputs identical: {same}")
    return 0 if same else 1


if __name__ == "__main__":
    raise SystemExit(main())
