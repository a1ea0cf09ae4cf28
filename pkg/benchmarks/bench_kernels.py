"""Compare the numba kernels with their numpy twins.

    python benchmarks/bench_kernels.py [--repeat 3] [--chunk 8192]

Both implementations are called directly, so numba must be importable and
``THZRIS_DISABLE_NUMBA`` unset.  Each kernel is run once to warm up (JIT
compilation is not timed) and the best of ``--repeat`` runs is reported.
"""

import argparse
import math
import time

import numpy as np

from thzris import _kernels as K
from thzris._backend import USE_NUMBA
from thzris.channel import LinkConstants, kappa_direct, kappa_interference, pathloss_direct, pathloss_ris
from thzris.config import default_paper_config


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(chunk):
    cfg = default_paper_config()
    low = cfg.with_changes(h_r=1.2)
    c = LinkConstants.from_config(cfg)
    cl = LinkConstants.from_config(low)
    cdf, k_lo = K.poisson_table(cfg.mean_ap_count)
    p = K.mc_params(cfg)
    s_d = kappa_direct(cfg) / float(pathloss_direct(cfg, 2.0))
    s_r = 1.0 / float(pathloss_ris(low, 2.0))
    lt_d = (s_d, 1.0, cfg.radius, kappa_direct(cfg), cfg.beta_d, c.const_d, c.k_abs, c.h_a, 1e-9, 1_000_000)
    lt_r = (s_r, 1.0, low.radius, kappa_interference(low), low.beta_ar, cl.v0, cl.const_r, cl.k_abs, cl.dh,
            cl.h_r, 1e-8, 1_000_000)
    seed = np.uint64(1)
    return [
        (f"mc chunk ({chunk} realisations)",
         lambda: K._mc_chunk_numba(seed, 0, chunk, cdf, k_lo, p),
         lambda: K._mc_chunk_numpy(seed, 0, chunk, cdf, k_lo, p)),
        (f"interference chunk ({chunk} draws)",
         lambda: K._interference_chunk_numba(seed, 0, chunk, cdf, k_lo, p, 1.0),
         lambda: K._interference_chunk_numpy(seed, 0, chunk, cdf, k_lo, p, 1.0)),
        ("direct LT exponent (1D, tol 1e-9)", lambda: K._lt_direct_numba(*lt_d), lambda: K._lt_direct_numpy(*lt_d)),
        ("RIS LT exponent (2D, tol 1e-8)", lambda: K._lt_ris_numba(*lt_r), lambda: K._lt_ris_numpy(*lt_r)),
    ]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--chunk", type=int, default=8192)
    args = ap.parse_args()
    if not USE_NUMBA:
        raise SystemExit("numba is disabled or missing; unset THZRIS_DISABLE_NUMBA to compare backends")

    print(f"{'kernel':40s} {'numba [ms]':>11s} {'numpy [ms]':>11s} {'speedup':>8s}")
    for name, fast, slow in cases(args.chunk):
        t_fast = best_of(fast, args.repeat)
        t_slow = best_of(slow, args.repeat)
        ratio = t_slow / t_fast if t_fast > 0 else math.inf
        print(f"{name:40s} {1e3 * t_fast:11.2f} {1e3 * t_slow:11.2f} {ratio:7.1f}x")


if __name__ == "__main__":
    main()
