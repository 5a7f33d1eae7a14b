"""Deterministic random streams.

Every stochastic routine in the package derives its generator from an
explicit integer seed plus a stream key, so results never depend on
execution order, parallelism, or global state.
"""
from __future__ import annotations

import numpy as np


def derive_rng(seed: int, *key: int) -> np.random.Generator:
    """PCG64 generator for stream ``key`` of root ``seed``."""
    entropy = (int(seed),) + tuple(int(k) for k in key)
    return np.random.default_rng(np.random.SeedSequence(entropy=entropy))


def child_seed(seed: int, *key: int) -> int:
    """Stable integer sub-seed for routines that take a plain seed."""
    entropy = (int(seed),) + tuple(int(k) for k in key)
    return int(np.random.SeedSequence(entropy=entropy).generate_state(1, np.uint64)[0])
