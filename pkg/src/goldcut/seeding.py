"""Deterministic RNG streams.

All randomness in the package derives from a single root seed. Independent
streams are drawn from the counter-based 64-bit Philox generator, keyed by
the root seed plus an integer path that identifies the consumer, e.g.
``stream(root, trial, side, variant)``. Equal (root, path) pairs always
yield the same stream; distinct paths yield statistically independent
streams. Path derivation uses numpy's SeedSequence spawn keys, so the
scheme is stable across processes and platforms.
"""
from __future__ import annotations

import numpy as np


def stream(root_seed: int, *path: int) -> np.random.Generator:
    """Return the Philox generator for the given (root seed, path) pair."""
    ss = np.random.SeedSequence(int(root_seed), spawn_key=tuple(int(p) for p in path))
    return np.random.Generator(np.random.Philox(ss))
