"""Deterministic seed derivation for parallel replicates.

Every replicate gets its own 64-bit seed derived from (base_seed,
policy_index, replicate_id) through a splitmix64-style avalanche, so
streams are uncorrelated and independent of execution order or thread
count.
"""

import numpy as np

_MASK = (1 << 64) - 1


def splitmix64(z: int) -> int:
    """One splitmix64 finalizer round (full 64-bit avalanche)."""
    z = (z + 0x9E3779B97F4A7C15) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return (z ^ (z >> 31)) & _MASK


def derive_seed(base_seed: int, *indices: int) -> int:
    """Mix ``base_seed`` with integer indices into a fresh 64-bit seed."""
    state = splitmix64(base_seed & _MASK)
    for ix in indices:
        state = splitmix64(state ^ splitmix64(ix & _MASK))
    return state


def make_rng(seed: int) -> np.random.Generator:
    """Seeded PCG64 generator; the sole entropy source for one replicate."""
    return np.random.Generator(np.random.PCG64(seed))
