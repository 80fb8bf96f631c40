"""Pick the smallest prime size at which the byte tables pay off.

For each threshold the residue phase of B_k is timed; tables are used for a
prime only when (p - 1)/2 is at least the threshold.
"""
import argparse
import time

import numpy as np

from multibern.bernmod import bern_mod_primes
from multibern.bounds import collection_primes, compute_bounds


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--k", type=int, default=10_000)
    ap.add_argument("--thresholds", type=int, nargs="+", default=[0, 256, 1024, 4096, 16384, 1 << 62])
    ap.add_argument("--reps", type=int, default=3)
    args = ap.parse_args()

    bounds, plist = compute_bounds(args.k)
    primes = np.asarray(collection_primes(args.k, bounds.X, plist), dtype=np.int64)
    bern_mod_primes(args.k, primes[:4])  # compile

    ref = None
    for th in args.thresholds:
        best = float("inf")
        for _ in range(args.reps):
            t = time.perf_counter()
            res, _ = bern_mod_primes(args.k, primes, table_min_half=th)
            best = min(best, time.perf_counter() - t)
        if ref is None:
            ref = res
        assert np.array_equal(res, ref)
        label = "never" if th >= 1 << 62 else str(th)
        print(f"threshold {label:>6}: {best:.3f} s for {len(primes)} primes")


if __name__ == "__main__":
    main()
