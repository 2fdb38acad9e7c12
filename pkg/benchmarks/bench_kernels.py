"""Time the numba kernels against their numpy fallbacks.

Usage::

    python3 benchmarks/bench_kernels.py [--count 200000] [--n 20] [--repeat 5]
    python3 benchmarks/bench_kernels.py --end-to-end

The first part calls each kernel directly with identical inputs under both
backends (and checks the outputs agree).  ``--end-to-end`` additionally runs
a sampling and a quadrature workload in fresh interpreters with and without
GIBBSPK_DISABLE_NUMBA=1, which is how users switch backends.
"""
import argparse
import os
import subprocess
import sys
import time

import numpy as np

from gibbspk import _kernels
from gibbspk.eppf import pd_v_weights
from gibbspk.quadrature import GAUSS_WEIGHTS, KRONROD_WEIGHTS
from gibbspk.samplers import predictive_tables


def best_time(func, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        out = func()
        times.append(time.perf_counter() - start)
    return min(times), out


def kernel_cases(count, n, rng):
    u = rng.random((count, n - 1))
    join, new, _ = predictive_tables(pd_v_weights(0.5, 1.0, n), n)
    cumw = np.cumsum(rng.standard_gamma(1.0, (count, 10)), axis=1)
    u_cat = rng.random((count, n))
    labels = _kernels.kernels("numpy").crp_labels(0.5, 1.0, u)
    logv = -rng.random((count // 10, 15)) * 50.0
    return {
        "crp_labels": lambda k: k.crp_labels(0.5, 1.0, u),
        "gibbs_labels": lambda k: k.gibbs_labels(0.5, join, new, u),
        "categorical_labels": lambda k: k.categorical_labels(cumw, u_cat),
        "label_shapes": lambda k: k.label_shapes(labels),
        "panel_reduce": lambda k: k.panel_reduce(logv, KRONROD_WEIGHTS, GAUSS_WEIGHTS),
    }


def same(a, b):
    if isinstance(a, tuple):
        return all(same(x, y) for x, y in zip(a, b))
    return np.allclose(a, b, rtol=1e-13, atol=0) if a.dtype.kind == "f" else np.array_equal(a, b)


def run_kernels(count, n, repeat):
    rng = np.random.default_rng(0)
    fast = _kernels.kernels("numba")
    slow = _kernels.kernels("numpy")
    print(f"kernels: count={count} n={n} best of {repeat}")
    print(f"{'kernel':<20} {'numba [s]':>10} {'numpy [s]':>10} {'speedup':>8}  agree")
    for name, call in kernel_cases(count, n, rng).items():
        call(fast)  # compile outside the timing
        t_fast, out_fast = best_time(lambda: call(fast), repeat)
        t_slow, out_slow = best_time(lambda: call(slow), repeat)
        print(f"{name:<20} {t_fast:>10.4f} {t_slow:>10.4f} {t_slow / t_fast:>8.1f}  {same(out_fast, out_slow)}")


WORKLOAD = """
import time
from gibbspk import BACKEND
from gibbspk.eppf import gg_v_weights
from gibbspk.samplers import crp_sample_labels
crp_sample_labels(0.5, 1.0, 5, 10)
start = time.perf_counter()
crp_sample_labels(0.5, 1.0, 20, 500_000, 1)
mid = time.perf_counter()
gg_v_weights(0.5, 1.0, 1.0, 10)
end = time.perf_counter()
print(BACKEND, mid - start, end - mid)
"""


def run_end_to_end():
    print("end to end (fresh interpreter each):")
    print(f"{'backend':<8} {'crp 5e5 x 20 [s]':>17} {'gg weights N=10 [s]':>20}")
    for disable in ("0", "1"):
        env = dict(os.environ, GIBBSPK_DISABLE_NUMBA=disable)
        out = subprocess.run([sys.executable, "-c", WORKLOAD], env=env, capture_output=True, text=True,
                             check=True).stdout.split()
        print(f"{out[0]:<8} {float(out[1]):>17.3f} {float(out[2]):>20.3f}")


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--count", type=int, default=200_000)
    parser.add_argument("--n", type=int, default=20)
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--end-to-end", action="store_true")
    args = parser.parse_args(argv)
    if not _kernels.HAVE_NUMBA:
        sys.exit("numba is not importable; nothing to compare")
    run_kernels(args.count, args.n, args.repeat)
    if args.end_to_end:
        run_end_to_end()


if __name__ == "__main__":
    main()
