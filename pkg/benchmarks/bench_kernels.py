"""Timing comparison: compiled kernel core vs the pure numpy fallback.

Each kernel row runs identical inputs through both backends in-process.
The final row hashes random in-memory images end to end (resize, DCT,
packing) in two subprocesses, selecting the backend with
DEDUPKIT_PURE_PYTHON, which is how the choice happens in real use.

    python3 benchmarks/bench_kernels.py --hashes 20000 --images 2000
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from dedupkit._kernels import _core, fallback  # type: ignore[attr-defined]

_PHASH_CHILD = """
import os, sys, time
import numpy as np
from dedupkit import HashAlgo, backend, compute_hash

n = int(sys.argv[1])
rng = np.random.default_rng(7)
imgs = rng.integers(0, 256, (n, 32, 32, 3), dtype=np.uint8)
t0 = time.perf_counter()
for i in range(n):
    compute_hash(imgs[i], HashAlgo.PHASH)
print(f"{backend()} {time.perf_counter() - t0:.6f}")
"""


def best_of(fn, repeats: int = 3) -> float:
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def row(name: str, workload: str, t_fallback: float, t_compiled: float) -> None:
    ratio = t_fallback / t_compiled if t_compiled > 0 else float("inf")
    print(
        f"{name:<20} {workload:<16} {t_fallback * 1e3:>10.2f} "
        f"{t_compiled * 1e3:>10.2f} {ratio:>7.2f}x"
    )


def phash_row(n_images: int) -> None:
    times = {}
    for pure in ("1", None):
        env = dict(os.environ)
        env.pop("DEDUPKIT_PURE_PYTHON", None)
        if pure:
            env["DEDUPKIT_PURE_PYTHON"] = pure
        out = subprocess.run(
            [sys.executable, "-c", _PHASH_CHILD, str(n_images)],
            env=env,
            capture_output=True,
            text=True,
            check=True,
        ).stdout.split()
        times[out[0]] = float(out[1])
    if "compiled" not in times:
        print(f"{'phash end-to-end':<20} compiled backend unavailable, skipped")
        return
    row(
        "phash end-to-end",
        f"{n_images} imgs",
        times["fallback"],
        times["compiled"],
    )


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--hashes", type=int, default=20_000,
                    help="corpus size for the pairwise kernels")
    ap.add_argument("--images", type=int, default=2_000,
                    help="image count for the end-to-end phash row")
    ap.add_argument("--th", type=int, default=8, help="hamming threshold")
    args = ap.parse_args()

    rng = np.random.default_rng(11)
    grid = rng.uniform(0.0, 255.0, (512, 512))
    bits = rng.integers(0, 1 << 64, args.hashes, dtype=np.uint64)
    # plant clusters so dedup_scan discards a realistic fraction
    bits[1::10] = bits[::10][: bits[1::10].size]

    print(f"{'kernel':<20} {'workload':<16} {'fallback':>10} "
          f"{'compiled':>10} {'ratio':>8}")
    print(f"{'':<20} {'':<16} {'(ms)':>10} {'(ms)':>10}")

    row(
        "box_resize",
        "512^2 -> 32^2",
        best_of(lambda: fallback.box_resize(grid, 32, 32)),
        best_of(lambda: _core.box_resize(grid, 32, 32)),
    )
    row(
        "neighbor_counts",
        f"{args.hashes} x th{args.th}",
        best_of(lambda: fallback.neighbor_counts(bits, args.th)),
        best_of(lambda: _core.neighbor_counts(bits, args.th)),
    )
    row(
        "distance_histograms",
        f"{args.hashes}",
        best_of(lambda: fallback.distance_histograms(bits)),
        best_of(lambda: _core.distance_histograms(bits)),
    )
    row(
        "dedup_scan",
        f"{args.hashes} x th{args.th}",
        best_of(lambda: fallback.dedup_scan(bits, args.th)),
        best_of(lambda: _core.dedup_scan(bits, args.th)),
    )
    phash_row(args.images)


if __name__ == "__main__":
    main()
