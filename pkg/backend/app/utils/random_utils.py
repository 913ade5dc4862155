"""Deterministic seed streams."""
from typing import List

import numpy as np


def derive_seed(master: int, *keys: int) -> int:
    """Child seed for (master, keys...), stable across runs and platforms."""
    sequence = np.random.SeedSequence(int(master), spawn_key=tuple(int(k) for k in keys))
    return int(sequence.generate_state(1, dtype=np.uint32)[0])


def make_rng(seed: int, *keys: int) -> np.random.Generator:
    """Generator for the stream (seed, keys...)."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in keys)))


def block_generators(seed: int, n_blocks: int) -> List[np.random.Generator]:
    """One independent generator per fixed-size sample block."""
    children = np.random.SeedSequence(int(seed)).spawn(n_blocks)
    return [np.random.default_rng(child) for child in children]
