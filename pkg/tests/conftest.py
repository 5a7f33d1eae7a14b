"""Shared random-object builders for the test suite."""
from __future__ import annotations

import numpy as np

from slitsim.qcore import DensityMatrix, PureBipartiteState


def random_density(rng: np.random.Generator, d: int) -> DensityMatrix:
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    h = a @ a.conj().T
    return DensityMatrix(h / np.trace(h).real)


def random_pure(rng: np.random.Generator, dim_s: int, dim_i: int) -> PureBipartiteState:
    c = rng.normal(size=(dim_s, dim_i)) + 1j * rng.normal(size=(dim_s, dim_i))
    return PureBipartiteState(c / np.linalg.norm(c))


def random_unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(a)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_schmidt_qutrit(rng: np.random.Generator) -> PureBipartiteState:
    """Anti-diagonal qutrit pair state with non-negative amplitudes."""
    amps = rng.uniform(0.05, 1.0, size=3)
    amps = amps / np.linalg.norm(amps)
    c = np.zeros((3, 3), dtype=complex)
    for level, a in enumerate(amps):
        c[level, 2 - level] = a
    return PureBipartiteState(c)
