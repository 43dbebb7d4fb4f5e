"""
Shared helpers for the zesim test suite.
"""
import numpy as np
import pytest

from zesim.graphspace import Channel, NCBGraph
from zesim.models import ZesimConfig


def random_isometry(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    g = rng.normal(size=(rows, cols)) + 1j * rng.normal(size=(rows, cols))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_channel(rng: np.random.Generator, dim_a: int, dim_b: int, num_kraus: int) -> Channel:
    """Channel from a random Stinespring isometry A -> B (x) E."""
    v = random_isometry(rng, dim_b * num_kraus, dim_a)
    return Channel.from_kraus([v[k * dim_b:(k + 1) * dim_b, :] for k in range(num_kraus)])


def random_hermitian(rng: np.random.Generator, d: int) -> np.ndarray:
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (g + g.conj().T) / 2


def random_stochastic(rng: np.random.Generator, dim_b: int, dim_a: int) -> np.ndarray:
    n = rng.random((dim_b, dim_a))
    n[rng.random((dim_b, dim_a)) < 0.4] = 0.0
    for a in range(dim_a):
        if not n[:, a].any():
            n[rng.integers(dim_b), a] = 1.0
    return n / n.sum(axis=0)


def trivial_graph() -> NCBGraph:
    """span{|0><0|, |1><0|, |1><1|} on a qubit."""
    return NCBGraph.from_kraus([
        np.array([[1, 0], [0, 0]]),
        np.array([[0, 0], [1, 0]]),
        np.array([[0, 0], [0, 1]]),
    ])


@pytest.fixture
def config():
    return ZesimConfig(threads=1)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_collection_modifyitems(config, items):
    """Tag every test with the marker of its directory (unit, property, integration)."""
    for item in items:
        category = item.path.parent.name
        if category in ('unit', 'property', 'integration'):
            item.add_marker(getattr(pytest.mark, category))
