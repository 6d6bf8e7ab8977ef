"""Hierarchical seed derivation.

Every random draw in the package flows from a single integer seed through
``numpy.random.SeedSequence`` spawn keys, so each consumer (permutations,
noise, data, attacks) reads its own independent stream and adding draws to
one stream never shifts another.
"""

from __future__ import annotations

import numpy as np

# Stream identifiers used as the first spawn-key component.
PERMUTATIONS = 0
NOISE = 1
DATA = 2
ATTACK = 3
TEST = 4

_MASK64 = (1 << 64) - 1


def derive_seed(seed: int, *keys: int) -> int:
    """Derive a 64-bit child seed from ``seed`` and a path of integer keys."""
    ss = np.random.SeedSequence(int(seed) & _MASK64, spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1, np.uint64)[0])


def stream(seed: int, *keys: int) -> np.random.Generator:
    """Independent generator for the sub-stream ``keys`` of ``seed``."""
    ss = np.random.SeedSequence(int(seed) & _MASK64, spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.PCG64(ss))
