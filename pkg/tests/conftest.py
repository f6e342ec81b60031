import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from tropikam import CostKernel, normalize, peierls_barrier

G3_MATRIX = np.array([[0.0, 1.0, 4.0], [2.0, 1.0, 3.0], [1.0, 2.0, 2.0]])
G3_BARRIER = np.array([[0.0, 1.0, 4.0], [2.0, 3.0, 6.0], [1.0, 2.0, 5.0]])


@pytest.fixture
def g3():
    return CostKernel.from_matrix(G3_MATRIX)


@pytest.fixture
def g3_barrier(g3):
    norm, critical = normalize(g3)
    return peierls_barrier(norm, critical_value=critical)


def make_metric_kernel(n: int, seed: int) -> CostKernel:
    """Euclidean distance matrix of random planar points (a metric cost)."""
    rng = np.random.default_rng(seed)
    pts = rng.uniform(0.0, 1.0, size=(n, 2))
    diff = pts[:, None, :] - pts[None, :, :]
    return CostKernel.from_matrix(np.sqrt(np.sum(diff**2, axis=2)))


def make_random_kernel(n: int, seed: int, low=-1.0, high=1.0) -> CostKernel:
    rng = np.random.default_rng(seed)
    return CostKernel.from_matrix(rng.uniform(low, high, size=(n, n)))


def make_integer_kernel(n: int, seed: int, low=0, high=9) -> CostKernel:
    rng = np.random.default_rng(seed)
    return CostKernel.from_matrix(rng.integers(low, high + 1, size=(n, n)).astype(float))


@pytest.fixture
def metric5():
    return make_metric_kernel(5, seed=42)


@pytest.fixture
def two_cycle():
    """Two points whose only zero-cost motion is the swap."""
    return CostKernel.from_matrix([[1.0, 0.0], [0.0, 1.0]])
