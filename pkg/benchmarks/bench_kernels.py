"""Time the compiled modem kernels against the pure-Python fallback.

Both backends implement the same per-sample recurrences (adaptive slicer,
closed-loop detector with spike feedback), so the comparison is purely
about loop overhead.  Outputs are checked sample-exact before timing.

Usage: python benchmarks/bench_kernels.py [--samples N] [--repeats R]
"""

import argparse
import math
import time

import numpy as np

from fdmlink import _kernels_py
from fdmlink.kernels import HAVE_COMPILED

try:
    from fdmlink import _ckernels
except ImportError:
    _ckernels = None


def make_workload(n_samples: int, seed: int = 11):
    # keyed envelope of a random bit pattern, 64 samples per bit, with the
    # detector applied up front so slicer_loop gets a realistic trace
    rng = np.random.default_rng(seed)
    spb = 64
    bits = rng.integers(0, 2, n_samples // spb + 1)
    env = np.where(np.repeat(bits, spb)[:n_samples], 0.020, 0.002)
    env = env + rng.normal(0.0, 2e-4, n_samples)
    env = np.clip(env, 1e-5, None)
    det = 1.0 + 20.0 * 0.044 * np.log10(env / 0.010)
    return env, det


def best_of(fn, repeats: int) -> float:
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--samples", type=int, default=1_000_000)
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    env, det = make_workload(args.samples)
    alpha = 1.0 / 2000.0
    slicer_args = (det, alpha, 0.010, float(det[0]), 1)
    demod_args = (
        env, 0.010, 1.0, 0.044, 1e-5, alpha, 0.010, float(det[0]), 1,
        0.3, math.exp(-1.0 / (2e-6 * 6.4e6)), 0.3, True,
    )

    if _ckernels is None:
        print("compiled backend not built (HAVE_COMPILED = %s)" % HAVE_COMPILED)
        print("timing the pure-Python kernels only")
    backends = [("python", _kernels_py)] + ([("compiled", _ckernels)] if _ckernels else [])

    # behavioral identity first, then timing
    if _ckernels is not None:
        for name, args_ in (("slicer_loop", slicer_args), ("demod_loop", demod_args)):
            got_py = getattr(_kernels_py, name)(*args_)
            got_c = getattr(_ckernels, name)(*args_)
            for a, b in zip(got_py, got_c):
                assert np.array_equal(np.asarray(a), np.asarray(b)), name
        print("backends agree sample-exactly on %d samples" % args.samples)

    print(f"{'kernel':<12} {'backend':<9} {'best of ' + str(args.repeats):>12}  throughput")
    times = {}
    for kernel, kargs in (("slicer_loop", slicer_args), ("demod_loop", demod_args)):
        for bname, mod in backends:
            fn = getattr(mod, kernel)
            dt = best_of(lambda: fn(*kargs), args.repeats)
            times[(kernel, bname)] = dt
            rate = args.samples / dt / 1e6
            print(f"{kernel:<12} {bname:<9} {dt * 1e3:>9.1f} ms  {rate:7.1f} Msamples/s")
        if ("python" in dict(backends)) and ((kernel, "compiled") in times):
            speedup = times[(kernel, "python")] / times[(kernel, "compiled")]
            print(f"{kernel:<12} {'speedup':<9} {speedup:>9.1f} x")


if __name__ == "__main__":
    main()
