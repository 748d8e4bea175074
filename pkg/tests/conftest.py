import numpy as np
import pytest
from numpy.random import Generator, Philox


@pytest.fixture
def rng():
    return Generator(Philox(key=20240817))


def random_coherent_factor(rng, p_max=0.4, margin=0.9):
    """A random valid single-qubit readout POVM with an off-diagonal part."""
    while True:
        p, q = rng.uniform(0.0, p_max, size=2)
        if abs(1.0 - p - q) >= 0.2:
            break
    z_cap = np.sqrt(min((1.0 - p) * q, p * (1.0 - q)))
    z = margin * z_cap * rng.uniform() * np.exp(2j * np.pi * rng.uniform())
    first = np.array([[1.0 - p, z], [np.conj(z), q]], dtype=np.complex128)
    return np.stack([first, np.eye(2) - first])


def random_classical_factor(rng, p_max=0.5):
    """A random diagonal single-qubit readout POVM."""
    p, q = rng.uniform(0.0, p_max, size=2)
    return classical_factor(p, q), p, q


def classical_factor(p, q):
    first = np.diag([1.0 - p, q]).astype(np.complex128)
    return np.stack([first, np.eye(2) - first])
