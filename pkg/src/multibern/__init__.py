"""Exact Bernoulli numbers via residues modulo many word-sized primes."""
from .bernmod import ResiduePair, bern_mod_p
from .bounds import BoundSet, compute_bounds
from .reconstruct import BernoulliRational, bernoulli, multimodular
from .verify import oracle_bernoulli, verify

__all__ = [
    "BernoulliRational",
    "BoundSet",
    "ResiduePair",
    "bern_mod_p",
    "bernoulli",
    "compute_bounds",
    "multimodular",
    "oracle_bernoulli",
    "verify",
]
