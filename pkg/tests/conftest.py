"""Shared helpers: random states, unitaries, and named reference states."""

import numpy as np
import pytest

from qdiscord.quantum_core import DensityMatrix, validate_density_matrix


def random_density_matrix(rng: np.random.Generator, dim: int = 4) -> DensityMatrix:
    """Full-rank random state G G^dag / tr(G G^dag) with Ginibre G."""
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    m = g @ g.conj().T
    return validate_density_matrix(m / m.trace().real)


def random_unitary(rng: np.random.Generator, dim: int = 4) -> np.ndarray:
    """Haar-ish random unitary from the QR decomposition of a Ginibre matrix."""
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def bell_phi_plus() -> DensityMatrix:
    m = np.zeros((4, 4), dtype=complex)
    m[0, 0] = m[0, 3] = m[3, 0] = m[3, 3] = 0.5
    return validate_density_matrix(m)


def maximally_mixed() -> DensityMatrix:
    return validate_density_matrix(np.eye(4, dtype=complex) / 4.0)


def product_state(p_a: np.ndarray, p_b: np.ndarray) -> DensityMatrix:
    return validate_density_matrix(np.kron(p_a, p_b))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)
