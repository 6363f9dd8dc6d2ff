"""Deterministic keyed pseudo-random values for lazy edge sampling.

A 64-bit SplitMix-style finalizer acts as a stateless PRF: the value at a
tree edge is a pure function of (seed, edge fingerprint), so an orientation
never has to materialize more edges than are actually queried.  The scalar
and the numpy paths share the same arithmetic and are bit-identical.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_MIX_A = 0xBF58476D1CE4E5B9
_MIX_B = 0x94D049BB133111EB
_FP_SALT = 0x517CC1B727220A95


def mix64(x: int) -> int:
    """SplitMix64 finalizer on a 64-bit integer."""
    x &= MASK64
    x ^= x >> 30
    x = (x * _MIX_A) & MASK64
    x ^= x >> 27
    x = (x * _MIX_B) & MASK64
    x ^= x >> 31
    return x


def mix64_array(x: np.ndarray) -> np.ndarray:
    """Vectorized :func:`mix64` on a uint64 array."""
    x = x.astype(np.uint64, copy=True)
    x ^= x >> np.uint64(30)
    x *= np.uint64(_MIX_A)
    x ^= x >> np.uint64(27)
    x *= np.uint64(_MIX_B)
    x ^= x >> np.uint64(31)
    return x


def fingerprint_letters(letters) -> int:
    """64-bit fingerprint of a letter sequence (order-sensitive)."""
    h = _FP_SALT
    for s in letters:
        h = mix64(h ^ (s & MASK64))
    return h


def prf_uniform(seed: int, fingerprint: int) -> float:
    """Uniform [0, 1) value keyed by (seed, fingerprint)."""
    x = mix64(((seed & MASK64) * GOLDEN & MASK64) ^ fingerprint)
    return (x >> 11) * 2.0**-53


def prf_uniform_array(seeds: np.ndarray, fingerprints: np.ndarray) -> np.ndarray:
    """Vectorized :func:`prf_uniform`; inputs broadcast as uint64 arrays."""
    x = (np.asarray(seeds, dtype=np.uint64) * np.uint64(GOLDEN)) ^ np.asarray(
        fingerprints, dtype=np.uint64
    )
    return (mix64_array(x) >> np.uint64(11)) * 2.0**-53


def sample_seed(base: int, index: int) -> int:
    """Seed of the ``index``-th draw in the stream rooted at ``base``."""
    return mix64((base + (index + 1) * GOLDEN) & MASK64)


def sample_seeds_array(base: int, lo: int, hi: int) -> np.ndarray:
    """Seeds of draws ``lo..hi-1``; matches :func:`sample_seed` bitwise."""
    idx = np.arange(lo + 1, hi + 1, dtype=np.uint64)
    return mix64_array(np.uint64(base & MASK64) + idx * np.uint64(GOLDEN))
