import numpy as np
import pytest

from rabichaos.model import DEFAULT_PARAMS, NAMED_POINTS, coherent_labels
from rabichaos.quantum import (
    FockConfig,
    build_hamiltonian,
    coherent_product_state,
    diagonalize,
)

R1 = NAMED_POINTS["R1"]
C1 = NAMED_POINTS["C1"]


@pytest.fixture(scope="session")
def fock150():
    return FockConfig(n_max=150)


@pytest.fixture(scope="session")
def ham150(fock150):
    return build_hamiltonian(DEFAULT_PARAMS, fock150)


@pytest.fixture(scope="session")
def sd150(ham150):
    return diagonalize(ham150)


@pytest.fixture(scope="session")
def psi_c1(fock150):
    return coherent_product_state(coherent_labels(C1), fock150)


@pytest.fixture(scope="session")
def psi_r1(fock150):
    return coherent_product_state(coherent_labels(R1), fock150)


def random_disk_points(rng, n, r2_max=1.9):
    """Uniform atomic-disk samples with radius-squared below r2_max."""
    out = []
    while len(out) < n:
        q1, p1 = rng.uniform(-1.5, 1.5, size=2)
        if q1 * q1 + p1 * p1 < r2_max:
            out.append((q1, p1))
    return np.array(out)


def random_states(rng, dim, n):
    """Normalized complex state vectors."""
    psi = rng.normal(size=(n, dim)) + 1j * rng.normal(size=(n, dim))
    return psi / np.linalg.norm(psi, axis=1, keepdims=True)
