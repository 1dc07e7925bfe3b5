"""Time the numba kernels against the pure-numpy fallback.

    python3 benchmarks/bench_kernels.py [--n 1000000] [--repeat 5]

Both backends are imported directly, so no environment flag is needed.  The
first numba call (compilation or cache load) is excluded from the timings.
"""
import argparse
import time

import numpy as np

from nilseq._accel import BACKENDS
from nilseq.nilsys import dd


def best_of(fn, repeat):
    fn()  # warm-up
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(n):
    a, b = dd(np.sqrt(2)), dd(np.sqrt(3))
    ab = dd(np.sqrt(6))
    idx = np.arange(n, dtype=np.int64)
    s = np.random.default_rng(0).random(n)
    t = np.random.default_rng(1).uniform(-20, 20, n)
    z = np.exp(2j * np.pi * s)
    steps = min(n, 10**5)
    return {
        "omega": lambda K: K.omega(idx, *a, *b, *ab, 3),
        "kappa": lambda K: K.kappa(s, t, 3),
        "frac_mul": lambda K: K.frac_mul(idx.astype(np.float64), *a),
        "floor_mul": lambda K: K.floor_mul(idx, *a),
        "block_sums": lambda K: K.block_sums(z, 64),
        f"skew_orbit[{steps}]": lambda K: K.skew_orbit(*a, *b, steps, 1),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=10**6)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if "numba" not in BACKENDS:
        raise SystemExit("numba is not installed; nothing to compare")
    print(f"{'kernel':<20}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>10}")
    for name, fn in cases(args.n).items():
        t_np = best_of(lambda: fn(BACKENDS["numpy"]), args.repeat)
        t_nb = best_of(lambda: fn(BACKENDS["numba"]), args.repeat)
        print(f"{name:<20}{t_np * 1e3:>12.2f}{t_nb * 1e3:>12.2f}{t_np / t_nb:>9.1f}x")


if __name__ == "__main__":
    main()
