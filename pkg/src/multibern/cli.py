"""``bern`` command-line front end."""
from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass

from . import _kernels as K
from .bernmod import bern_mod_p
from .modarith import is_prime
from .reconstruct import BernoulliRational, _int_str, bernoulli, multimodular
from .verify import verify

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAILURE = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit with status 2
        raise UsageError(message)


@dataclass
class WorkPlan:
    k: int
    threads: int
    mode: str  # "full" | "single-prime"
    verify: bool = False
    output: str | None = None
    base: int = 10
    raw: bool = False
    progress: float | None = None
    modulus: int | None = None

    def __post_init__(self) -> None:
        if self.threads < 1:
            raise UsageError("--threads must be >= 1")
        if self.k < 0:
            raise UsageError("k must be nonnegative")
        if self.base not in (10, 16):
            raise UsageError("--base must be 10 or 16")
        if self.progress is not None and self.progress <= 0:
            raise UsageError("--progress interval must be positive")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="bern", description="Exact Bernoulli numbers by the multimodular method.")
    ap.add_argument("k", type=int, help="index of the Bernoulli number")
    ap.add_argument("--threads", type=int, default=None, help="worker threads (default: BERN_THREADS or CPU count)")
    ap.add_argument("--mod", type=int, default=None, metavar="P", help="print B_k mod the prime P instead")
    ap.add_argument("--verify", action="store_true", help="run the magnitude and spot-prime checks")
    ap.add_argument("--output", default=None, metavar="PATH", help="write the result here instead of stdout")
    ap.add_argument("--base", type=int, default=10, choices=(10, 16))
    ap.add_argument("--raw", action="store_true", help="numerator and denominator on separate lines")
    ap.add_argument("--progress", type=float, default=None, metavar="SECONDS", help="report progress on stderr")
    return ap


def _default_threads() -> int:
    env = os.environ.get("BERN_THREADS")
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"BERN_THREADS must be an integer, got {env!r}") from None
    return len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else (os.cpu_count() or 1)


def make_plan(argv: list[str] | None) -> WorkPlan:
    args = build_parser().parse_args(argv)
    threads = args.threads if args.threads is not None else _default_threads()
    if args.mod is not None and args.verify:
        raise UsageError("--mod and --verify cannot be combined")
    mode = "single-prime" if args.mod is not None else "full"
    return WorkPlan(
        k=args.k,
        threads=threads,
        mode=mode,
        verify=args.verify,
        output=args.output,
        base=args.base,
        raw=args.raw,
        progress=args.progress,
        modulus=args.mod,
    )


def _residue_mod(k: int, p: int) -> int:
    if not is_prime(p):
        raise UsageError(f"--mod {p}: not a prime")
    if p >= K.KERNEL_PRIME_LIMIT:
        raise UsageError(f"--mod {p}: primes must be below 2^32")
    if k <= 2 or k % 2:
        q = bernoulli(k).to_fraction()
        if q.denominator % p == 0:
            raise UsageError(f"--mod {p}: p divides the denominator of B_{k}")
        return q.numerator * pow(q.denominator, -1, p) % p
    if p < 5 or k % (p - 1) == 0:
        raise UsageError(
            f"--mod {p}: p - 1 divides k, so p divides the denominator of B_{k} (von Staudt-Clausen)"
        )
    return bern_mod_p(k, p).rp


def _emit(text: str, plan: WorkPlan) -> None:
    if plan.output:
        with open(plan.output, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def _format(res: BernoulliRational, plan: WorkPlan) -> str:
    if plan.raw:
        return f"{_int_str(res.numerator, plan.base)}\n{_int_str(res.denominator, plan.base)}"
    return res.format(plan.base)


def run(argv: list[str] | None = None) -> int:
    try:
        plan = make_plan(argv)
        if plan.mode == "single-prime":
            _emit(_int_str(_residue_mod(plan.k, plan.modulus), plan.base), plan)
            return EXIT_OK
    except UsageError as exc:
        print(f"bern: {exc}", file=sys.stderr)
        return EXIT_USAGE

    def report(done: int, total: int) -> None:
        print(f"bern: {done}/{total} primes", file=sys.stderr, flush=True)

    progress = report if plan.progress else None
    try:
        X = None
        if plan.k >= 4 and plan.k % 2 == 0:
            trace = multimodular(plan.k, plan.threads, progress, plan.progress or 1.0)
            res, X = trace.result, trace.X
        else:
            res = bernoulli(plan.k)
        _emit(_format(res, plan), plan)
        if plan.verify:
            if X is None:
                print("bern: verification applies to even k >= 4 only; skipped", file=sys.stderr)
            else:
                rep = verify(res, plan.k, 3, X)
                print(
                    f"bern: magnitude ratio {rep.ratio:.6f} ok={rep.magnitude_ok}; "
                    f"spot primes {rep.spot_primes} ok={rep.spot_ok}"
                    + ("" if rep.oracle_ok is None else f"; oracle ok={rep.oracle_ok}"),
                    file=sys.stderr,
                )
                if not rep.ok:
                    return EXIT_FAILURE
    except (MemoryError, RuntimeError, OSError) as exc:
        print(f"bern: computation failed: {exc!r}", file=sys.stderr)
        return EXIT_FAILURE
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
