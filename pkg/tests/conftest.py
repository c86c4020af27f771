"""Shared fixtures and independent dense-matrix oracles.

The oracle helpers build matrices directly from numpy kron products so the
checks stay independent of the package's own Pauli machinery.
"""

import numpy as np
import pytest

from adaptshot.hamiltonian import bundled_path, load_hamiltonian

PAULI_1Q = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def dense_term(term: str) -> np.ndarray:
    mat = np.array([[1.0 + 0j]])
    for axis in term:
        mat = np.kron(mat, PAULI_1Q[axis])
    return mat


def dense_sum(pauli_sum) -> np.ndarray:
    dim = 2**pauli_sum.n_qubits
    out = np.zeros((dim, dim), dtype=complex)
    for term, coeff in pauli_sum.terms():
        out += coeff * dense_term(term)
    return out


@pytest.fixture(scope="session")
def h2():
    return load_hamiltonian(bundled_path("h2"))


@pytest.fixture(scope="session")
def h3():
    return load_hamiltonian(bundled_path("h3"))


@pytest.fixture(scope="session")
def h4():
    return load_hamiltonian(bundled_path("h4"))


@pytest.fixture(scope="session")
def lih():
    return load_hamiltonian(bundled_path("lih_reduced"))
