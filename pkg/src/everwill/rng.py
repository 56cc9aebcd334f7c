"""Seeded RNG streams with a stable, documented key-derivation scheme.

A run owns a single integer seed.  Every random consumer (the engine
lottery, each strategy, the society generator) gets its own stream whose
sub-seed is ``sha256(f"{seed}:{role}")`` truncated to 64 bits.  Streams
are therefore mutually independent and adding, removing, or reseeding one
consumer never perturbs the draws of another.
"""

from __future__ import annotations

import hashlib

import numpy as np


def derive_seed(seed: int, role: str) -> int:
    """Stable 64-bit sub-seed for a named role under a run seed."""
    digest = hashlib.sha256(f"{seed}:{role}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def derive_stream(seed: int, role: str) -> np.random.Generator:
    """Independent generator for ``role``, reproducible from (seed, role)."""
    return np.random.Generator(np.random.PCG64(derive_seed(seed, role)))


def weighted_index(distribution: np.ndarray, u: float) -> int:
    """Inverse-CDF pick: smallest index i with cumsum(distribution)[i] > u.

    Entries with zero probability are never selected.  The final index is
    returned when rounding leaves the total cumulative mass below ``u``.
    """
    cdf = np.cumsum(distribution)
    i = int(np.searchsorted(cdf, u, side="right"))
    return min(i, len(distribution) - 1)
