"""Wall time of B_k for a range of k, single-threaded unless --threads is given.

    python scripts/scaling.py --ks 1000 3162 10000 31622 100000
"""
import argparse
import time

from multibern import multimodular


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--ks", type=int, nargs="+", default=[1000, 3162, 10000, 31622, 100000])
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--reps", type=int, default=1)
    args = ap.parse_args()

    multimodular(100)  # load compiled kernels
    print(f"{'k':>9} {'primes':>8} {'X':>9} {'total s':>9} {'residues':>9} {'crt':>7} {'ratio':>7}")
    prev = None
    for k in args.ks:
        best = None
        for _ in range(args.reps):
            t = time.perf_counter()
            tr = multimodular(k, args.threads)
            dt = time.perf_counter() - t
            if best is None or dt < best[0]:
                best = (dt, tr)
        dt, tr = best
        ratio = f"{dt / prev:7.1f}" if prev else f"{'-':>7}"
        print(
            f"{k:>9} {len(tr.primes):>8} {tr.X:>9} {dt:>9.3f} "
            f"{tr.timings['residues']:>9.3f} {tr.timings['crt']:>7.3f} {ratio}"
        )
        prev = dt


if __name__ == "__main__":
    main()
