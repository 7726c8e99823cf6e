"""Deterministic, splittable random streams.

Every randomized step derives its generator from a base seed plus a structured
key (purpose tag, run index, ...) via numpy's SeedSequence, so components can
draw independently without sharing mutable generator state and results never
depend on call order or process scheduling.
"""

from __future__ import annotations

import numpy as np


def spawn(base_seed: int, *key: int) -> np.random.Generator:
    """Generator for the stream identified by (base_seed, *key)."""
    return np.random.Generator(np.random.PCG64(
        np.random.SeedSequence((base_seed, *key))))


def derive(base_seed: int, *key: int) -> int:
    """A plain integer seed derived from (base_seed, *key), for APIs that
    take a seed rather than a generator."""
    return int(np.random.SeedSequence((base_seed, *key)).generate_state(1)[0])
