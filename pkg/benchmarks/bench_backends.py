"""Benchmark the compiled kernel backend against the pure-numpy fallback.

Both backends compute byte-identical results; this script measures the
speed gap on realistic frame sizes so the fallback's cost is known.

    python3 benchmarks/bench_backends.py [--reps 20] [--size 480x640]
"""

import argparse
import time

import numpy as np

from safegate._backend import HAVE_NUMBA
from safegate.kernels import get_backend


def _time_callable(fn, args, reps, warmup=3):
    for _ in range(warmup):
        fn(*args)
    times = []
    for _ in range(reps):
        start = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - start)
    return min(times)


def _workloads(h, w, rng):
    gray = rng.integers(0, 256, size=(h, w), dtype=np.uint8)
    binary = np.where(rng.random((h, w)) < 0.4, 255, 0).astype(np.uint8)
    face = rng.integers(20, 181, size=(96, 96), dtype=np.uint8)
    taps = np.array([0.25, 0.5, 0.25])
    luts = rng.integers(0, 256, size=(8, 8, 256)).astype(np.float64)
    return [
        ("lbp_codes (96x96)", "lbp_codes", (face,)),
        (f"dilate3 ({h}x{w})", "dilate3", (binary,)),
        (f"erode3 ({h}x{w})", "erode3", (binary,)),
        (f"label_components ({h}x{w})", "label_components", (binary,)),
        (f"gaussian_blur_sep ({h}x{w})", "gaussian_blur_sep", (gray.astype(np.float64), taps)),
        (f"clahe_apply ({h}x{w}, 8x8 tiles)", "clahe_apply", (gray, luts, (h + 7) // 8, (w + 7) // 8)),
    ]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--reps", type=int, default=20)
    parser.add_argument("--size", default="480x640", help="HxW of the test frame")
    args = parser.parse_args()
    h, w = (int(v) for v in args.size.split("x"))

    numpy_backend = get_backend("numpy")
    if not HAVE_NUMBA:
        print("numba is not importable; only the numpy fallback can run")
        return
    numba_backend = get_backend("numba")

    rng = np.random.default_rng(7)
    rows = []
    for label, name, call_args in _workloads(h, w, rng):
        fast = _time_callable(getattr(numba_backend, name), call_args, args.reps)
        slow = _time_callable(getattr(numpy_backend, name), call_args, args.reps)
        a = getattr(numba_backend, name)(*call_args)
        b = getattr(numpy_backend, name)(*call_args)
        identical = np.array_equal(np.asarray(a), np.asarray(b))
        rows.append((label, fast, slow, slow / fast, identical))

    width = max(len(r[0]) for r in rows)
    print(f"{'kernel':<{width}}  {'numba':>10}  {'numpy':>10}  {'speedup':>8}  equal")
    for label, fast, slow, speedup, identical in rows:
        print(
            f"{label:<{width}}  {fast * 1e3:>8.3f}ms  {slow * 1e3:>8.3f}ms"
            f"  {speedup:>7.2f}x  {identical}"
        )


if __name__ == "__main__":
    main()
