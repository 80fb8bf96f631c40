"""Single-prime timing: c = 1/2 route (with and without tables) vs the basic loop."""
import argparse
import time

from multibern.bernmod import bern_mod_p_basic, bern_mod_p_fast


def best_of(fn, reps):
    best, out = float("inf"), None
    for _ in range(reps):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return out, best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--p", type=int, default=999999937)
    ap.add_argument("--k", type=int, default=None, help="default: the even k nearest p/2 usable by the fast route")
    ap.add_argument("--reps", type=int, default=3)
    args = ap.parse_args()

    p = args.p
    k = args.k or ((p - 1) // 2) & ~1
    while args.k is None and (pow(2, k, p) == 1 or k % (p - 1) == 0):
        k -= 2
    bern_mod_p_fast(6, 13)
    bern_mod_p_basic(6, 13)

    tab, t_tab = best_of(lambda: bern_mod_p_fast(k, p, use_tables=True), args.reps)
    direct, t_dir = best_of(lambda: bern_mod_p_fast(k, p, use_tables=False), 1)
    basic, t_basic = best_of(lambda: bern_mod_p_basic(k, p), 1)
    assert tab == direct == basic
    print(f"p = {p}, k = {k}, B_k mod p = {tab}")
    print(f"basic loop        {t_basic:8.3f} s")
    print(f"doubling, c = 1/2 {t_dir:8.3f} s  ({t_basic / t_dir:5.1f}x)")
    print(f"byte tables       {t_tab:8.3f} s  ({t_basic / t_tab:5.1f}x)")


if __name__ == "__main__":
    main()
