"""Deterministic randomness: one 64-bit seed, derived substreams.

Every stochastic entry point takes either an explicit generator or a
seed.  Units of work (trials, chunks, experiment stages) draw from
``substream(seed, index, ...)`` so that results are independent of
execution order and safe to parallelize.
"""

from __future__ import annotations

import numpy as np


def generator(seed: int) -> np.random.Generator:
    """Root generator for a whole run."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def substream(seed: int, *path: int) -> np.random.Generator:
    """Generator for one unit of work, e.g. ``substream(seed, trial)``.

    Distinct paths give statistically independent streams, and the
    mapping (seed, path) -> stream is stable across runs and platforms.
    """
    seq = np.random.SeedSequence(entropy=seed, spawn_key=tuple(int(p) for p in path))
    return np.random.Generator(np.random.PCG64(seq))
