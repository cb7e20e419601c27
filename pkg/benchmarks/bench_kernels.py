"""Time the numba and pure-numpy SSIM kernels on pool-sized stacks.

Usage:
    python3 benchmarks/bench_kernels.py [--pool 100] [--probes 200] [--repeat 5]

The shape mirrors classification: many probes scored against one
precomputed comparand stack.
"""

import argparse
import time

import numpy as np

from digitsim import _accel, kernels
from digitsim.ssim import SsimParams


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--pool", type=int, default=100, help="images in the comparand stack")
    ap.add_argument("--probes", type=int, default=200, help="probe images scored per timing")
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    stack = rng.integers(0, 256, (args.pool, 28, 28)).astype(np.float64)
    probes = rng.integers(0, 256, (args.probes, 28, 28)).astype(np.float64)
    p = SsimParams()
    taps = p.taps()

    backends = {"numpy": "_np"}
    if _accel.HAVE_NUMBA:
        backends["numba"] = "_nb"
    else:
        print("numba not installed; timing numpy only")

    rows = []
    for name, sfx in backends.items():
        moments = getattr(kernels, "windowed_moments" + sfx)
        windowed = getattr(kernels, "windowed_ssim_batch" + sfx)
        glob = getattr(kernels, "global_ssim_batch" + sfx)
        mu_s, sq_s = moments(stack, taps)
        mu_p, sq_p = moments(probes, taps)

        def run_windowed():
            for i in range(args.probes):
                windowed(probes[i], mu_p[i], sq_p[i], stack, mu_s, sq_s, taps, p.c1, p.c2)

        def run_global():
            for i in range(args.probes):
                glob(probes[i], stack, p.c1, p.c2)

        # first calls compile under numba; keep them out of the timings
        run_windowed()
        run_global()
        rows.append((name, "moments", best_of(lambda: moments(stack, taps), args.repeat)))
        rows.append((name, "windowed", best_of(run_windowed, args.repeat)))
        rows.append((name, "global", best_of(run_global, args.repeat)))

    pairs = args.pool * args.probes
    print(f"{args.pool} comparands x {args.probes} probes, best of {args.repeat}")
    print(f"{'backend':<8} {'kernel':<9} {'seconds':>9} {'us/pair':>9}")
    for name, kernel, t in rows:
        per = t / (args.pool if kernel == "moments" else pairs) * 1e6
        print(f"{name:<8} {kernel:<9} {t:>9.4f} {per:>9.2f}")
    if len(backends) == 2:
        base = {k: t for n, k, t in rows if n == "numpy"}
        for n, k, t in rows:
            if n == "numba":
                print(f"speedup {k}: {base[k] / t:.1f}x")


if __name__ == "__main__":
    main()
