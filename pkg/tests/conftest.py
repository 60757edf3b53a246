import numpy as np
import pytest

from isowidth import MCConfig, canonical_measure


@pytest.fixture
def cfg_small():
    return MCConfig(samples=50_000, seed=11)


@pytest.fixture
def cross2():
    return canonical_measure("cross", 2)


@pytest.fixture
def cross3():
    return canonical_measure("cross", 3)


@pytest.fixture
def simplex2():
    return canonical_measure("simplex", 2)


def random_rotation(n: int, seed: int) -> np.ndarray:
    """Haar-ish orthogonal matrix from a seeded QR factorization."""
    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(rng.normal(size=(n, n)))
    return q * np.sign(np.diag(r))
