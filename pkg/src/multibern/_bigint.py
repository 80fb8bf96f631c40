"""Thin layer over gmpy2 for the few big-integer primitives we need."""
from __future__ import annotations

from typing import Iterable, Sequence

import gmpy2
from gmpy2 import mpz

__all__ = ["mpz", "tree_product", "invert"]

invert = gmpy2.invert


def tree_product(values: Iterable[int]) -> mpz:
    """Product of ``values`` by balanced pairwise multiplication."""
    layer: Sequence = [mpz(v) for v in values]
    if not layer:
        return mpz(1)
    while len(layer) > 1:
        nxt = [layer[i] * layer[i + 1] for i in range(0, len(layer) - 1, 2)]
        if len(layer) % 2:
            nxt.append(layer[-1])
        layer = nxt
    return layer[0]
