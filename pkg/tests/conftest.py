"""Shared states and fixtures for the test suite."""

import numpy as np
import pytest

from bellkit.linalg import DensityMatrix
from bellkit.sampling import RngStream

# |Phi+> = (|00> + |11>)/sqrt(2)
PHI_PLUS_VEC = np.array([1.0, 0.0, 0.0, 1.0]) / np.sqrt(2.0)
PHI_PLUS = np.outer(PHI_PLUS_VEC, PHI_PLUS_VEC.conj())

KET00 = np.zeros((4, 4))
KET00[0, 0] = 1.0

MAXMIX = np.eye(4) / 4.0


def pure(vec) -> np.ndarray:
    v = np.asarray(vec, dtype=complex)
    v = v / np.linalg.norm(v)
    return np.outer(v, v.conj())


def werner(p: float) -> DensityMatrix:
    return DensityMatrix.from_matrix(p * PHI_PLUS + (1.0 - p) * MAXMIX)


@pytest.fixture
def gen():
    """Fresh deterministic generator; independent of every sampler stream."""
    return RngStream(987654321, 0).generator()
