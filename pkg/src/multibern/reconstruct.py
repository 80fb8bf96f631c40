"""Exact B_k from residues: product tree, Chinese remaindering and the
top-level multimodular driver."""
from __future__ import annotations

import resource
import threading
import time
from concurrent.futures import ThreadPoolExecutor, wait
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from ._bigint import invert, mpz
from .bernmod import ResiduePair, bern_mod_primes
from .bounds import BoundSet, collection_primes, compute_bounds

__all__ = [
    "BernoulliRational",
    "CrtTree",
    "Trace",
    "product_tree",
    "crt_combine",
    "recover_numerator",
    "collect_residues",
    "multimodular",
    "bernoulli",
]

# below this many node operations per level a pool is not worth it
_PARALLEL_MIN = 64


@dataclass(frozen=True)
class BernoulliRational:
    numerator: int
    denominator: int

    def __str__(self) -> str:
        return self.format(10)

    def format(self, base: int = 10) -> str:
        return f"{_int_str(self.numerator, base)}/{_int_str(self.denominator, base)}"

    def to_fraction(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    @classmethod
    def from_fraction(cls, q: Fraction) -> "BernoulliRational":
        return cls(q.numerator, q.denominator)


def _int_str(n: int, base: int) -> str:
    if base == 10:
        return mpz(n).digits(10)
    if base == 16:
        return mpz(n).digits(16)
    raise ValueError(f"unsupported base {base}")


@dataclass
class CrtTree:
    """Balanced product tree; ``levels[0]`` are the leaves, ``levels[-1] == [root]``."""

    levels: list[list[mpz]]

    @property
    def leaves(self) -> list[int]:
        return [int(v) for v in self.levels[0]]

    @property
    def root(self) -> mpz:
        return self.levels[-1][0]


def _pmap(fn: Callable, items: Sequence, threads: int) -> list:
    """Map over items, in chunks on a pool when there is enough work."""
    workers = min(threads, len(items) // _PARALLEL_MIN)
    if workers <= 1:
        return [fn(x) for x in items]
    size = -(-len(items) // workers)
    chunks = [items[i : i + size] for i in range(0, len(items), size)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(lambda ch: [fn(x) for x in ch], chunks))
    return [y for part in parts for y in part]


def _pairs(layer: Sequence) -> list[tuple]:
    return [tuple(layer[i : i + 2]) for i in range(0, len(layer), 2)]


def product_tree(moduli: Sequence[int], threads: int = 1) -> CrtTree:
    if not len(moduli):
        raise ValueError("need at least one modulus")
    leaves = [mpz(int(m)) for m in moduli]
    if len(set(leaves)) != len(leaves):
        raise ValueError("moduli must be distinct")
    if min(leaves) < 5:
        raise ValueError("moduli must be primes >= 5")
    levels = [leaves]
    while len(levels[-1]) > 1:
        levels.append(_pmap(lambda pr: pr[0] * pr[1] if len(pr) == 2 else pr[0], _pairs(levels[-1]), threads))
    return CrtTree(levels)


def _merge(node):
    (rl, ml), (rr, mr) = node
    # x = rl (mod ml), x = rr (mod mr)
    t = ((rr - rl) * invert(ml % mr, mr)) % mr
    return rl + ml * t


def crt_combine(pairs: Sequence[ResiduePair], tree: CrtTree, threads: int = 1) -> mpz:
    """Unique R in [0, M) with R = r_p (mod p) for every leaf p of ``tree``.

    Works up the tree one level at a time; each level's merges are spread
    over at most ``threads`` workers, so the thread count falls toward the
    root.
    """
    leaves = tree.levels[0]
    if len(pairs) != len(leaves):
        raise ValueError(f"expected {len(leaves)} residues, got {len(pairs)}")
    by_p = {int(pr.p): int(pr.rp) for pr in pairs}
    if len(by_p) != len(pairs):
        raise ValueError("duplicate residues for one modulus")
    try:
        R = [mpz(by_p[int(p)] % int(p)) for p in leaves]
    except KeyError as exc:
        raise ValueError(f"no residue for modulus {exc.args[0]}") from None
    for depth in range(len(tree.levels) - 1):
        M = tree.levels[depth]
        nodes = [
            ((R[i], M[i]), (R[i + 1], M[i + 1])) if i + 1 < len(R) else ((R[i], M[i]),)
            for i in range(0, len(R), 2)
        ]
        R = _pmap(lambda nd: _merge(nd) if len(nd) == 2 else nd[0][0], nodes, threads)
    return R[0]


def recover_numerator(R: int, M: int, Dk: int, k: int) -> int:
    """Signed numerator from R = B_k (mod M); positive iff k = 2 (mod 4)."""
    n = (mpz(Dk) * R) % M
    return int(n) if k % 4 == 2 else int(n - M)


ProgressFn = Callable[[int, int], None]


def collect_residues(
    k: int,
    primes: Sequence[int],
    threads: int = 1,
    progress: ProgressFn | None = None,
    progress_interval: float = 1.0,
    batch: int | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """B_k mod p for every collection prime, slotted by position.

    Workers pull batches from a shared queue ordered largest prime first;
    the outcome does not depend on scheduling.
    """
    parr = np.asarray(primes, dtype=np.int64)
    n = len(parr)
    out = np.empty(n, dtype=np.int64)
    paths = np.empty(n, dtype=np.int64)
    if n == 0:
        return out, paths
    if threads <= 1 and progress is None:
        return bern_mod_primes(k, parr)

    order = np.argsort(-parr, kind="stable")
    if batch is None:
        batch = max(1, min(64, n // (16 * max(threads, 1))))
    batches = [order[i : i + batch] for i in range(0, n, batch)]
    lock = threading.Lock()
    state = {"next": 0, "done": 0}

    def worker() -> None:
        while True:
            with lock:
                b = state["next"]
                state["next"] += 1
            if b >= len(batches):
                return
            idx = batches[b]
            res, pth = bern_mod_primes(k, parr[idx])
            out[idx] = res
            paths[idx] = pth
            with lock:
                state["done"] += len(idx)

    with ThreadPoolExecutor(max_workers=max(threads, 1)) as pool:
        pending = {pool.submit(worker) for _ in range(max(threads, 1))}
        while pending:
            finished, pending = wait(pending, timeout=progress_interval if progress else None)
            for f in finished:
                f.result()
            if progress is not None:
                progress(state["done"], n)
    return out, paths


@dataclass
class Trace:
    """Everything the driver computed along the way, for inspection and checks."""

    k: int
    bounds: BoundSet
    primes: list[int]
    residues: list[int]
    M: int
    R: int
    Nprime: int
    result: BernoulliRational
    fallback_count: int = 0
    timings: dict = field(default_factory=dict)
    peak_rss_kb: int = 0

    @property
    def X(self) -> int:
        return self.bounds.X


_SMALL = {0: (1, 1), 1: (-1, 2), 2: (1, 6)}


def multimodular(
    k: int,
    threads: int = 1,
    progress: ProgressFn | None = None,
    progress_interval: float = 1.0,
) -> Trace:
    """Run the full pipeline for even k >= 4 and keep the intermediate values."""
    t0 = time.perf_counter()
    bounds, plist = compute_bounds(k)
    primes = collection_primes(k, bounds.X, plist)
    t1 = time.perf_counter()
    residues, paths = collect_residues(k, primes, threads, progress, progress_interval)
    t2 = time.perf_counter()
    tree = product_tree(primes, threads)
    M = tree.root
    if M.bit_length() <= bounds.beta:
        raise RuntimeError(f"modulus product below 2^beta for k={k}; bound computation is broken")
    pairs = [ResiduePair(p, r) for p, r in zip(primes, residues.tolist())]
    R = crt_combine(pairs, tree, threads)
    N = recover_numerator(R, M, bounds.Dk, k)
    t3 = time.perf_counter()
    return Trace(
        k=k,
        bounds=bounds,
        primes=primes,
        residues=residues.tolist(),
        M=int(M),
        R=int(R),
        Nprime=int((mpz(bounds.Dk) * R) % M),
        result=BernoulliRational(N, bounds.Dk),
        fallback_count=int(paths.sum()),
        timings={"bounds": t1 - t0, "residues": t2 - t1, "crt": t3 - t2},
        peak_rss_kb=resource.getrusage(resource.RUSAGE_SELF).ru_maxrss,
    )


def bernoulli(
    k: int,
    threads: int = 1,
    progress: ProgressFn | None = None,
    progress_interval: float = 1.0,
) -> BernoulliRational:
    """Exact B_k (with B_1 = -1/2)."""
    if k < 0:
        raise ValueError(f"k must be nonnegative, got {k}")
    if k in _SMALL:
        return BernoulliRational(*_SMALL[k])
    if k % 2:
        return BernoulliRational(0, 1)
    return multimodular(k, threads, progress, progress_interval).result
