"""Spin-orbital Hamiltonian assembly, Jordan-Wigner mapping, HF and FCI checks.

The qubit operator representation is a plain dict mapping Pauli strings
(letters over IXYZ, qubit 0 leftmost) to complex coefficients.  Spin orbitals
interleave alpha/beta per spatial orbital (2i is alpha, 2i+1 is beta); the
Hartree-Fock bitstring lists occupations most-significant-first.
"""

from __future__ import annotations

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.linalg import eigsh

PRUNE = 1e-10

_PROD = {
    ("I", "I"): (1, "I"), ("I", "X"): (1, "X"), ("I", "Y"): (1, "Y"), ("I", "Z"): (1, "Z"),
    ("X", "I"): (1, "X"), ("Y", "I"): (1, "Y"), ("Z", "I"): (1, "Z"),
    ("X", "X"): (1, "I"), ("Y", "Y"): (1, "I"), ("Z", "Z"): (1, "I"),
    ("X", "Y"): (1j, "Z"), ("Y", "X"): (-1j, "Z"),
    ("Y", "Z"): (1j, "X"), ("Z", "Y"): (-1j, "X"),
    ("Z", "X"): (1j, "Y"), ("X", "Z"): (-1j, "Y"),
}


def _mul(term_a: str, term_b: str) -> tuple[complex, str]:
    phase: complex = 1
    out = []
    for ca, cb in zip(term_a, term_b):
        p, c = _PROD[(ca, cb)]
        phase *= p
        out.append(c)
    return phase, "".join(out)


def _op_product(a: dict, b: dict, n: int) -> dict:
    out: dict[str, complex] = {}
    for ta, ca in a.items():
        for tb, cb in b.items():
            phase, prod = _mul(ta, tb)
            out[prod] = out.get(prod, 0j) + phase * ca * cb
    return {t: c for t, c in out.items() if abs(c) > 1e-14}


def _ladder(mode: int, dagger: bool, n: int) -> dict:
    chain = "Z" * mode
    tail = "I" * (n - mode - 1)
    return {
        chain + "X" + tail: 0.5,
        chain + "Y" + tail: -0.5j if dagger else 0.5j,
    }


def _accumulate(target: dict, op: dict, scale: complex) -> None:
    for t, c in op.items():
        target[t] = target.get(t, 0j) + scale * c


def jordan_wigner_hamiltonian(h1: np.ndarray, h2: np.ndarray, core: float) -> dict:
    """Map H = core + sum h1[p,q] a_p+ a_q (spatial, chemists' (pq|rs) h2) to qubits.

    h1 and h2 are spatial-orbital integrals; spin summation happens here.
    Returns {pauli_string: real coefficient} pruned at 1e-10.
    """
    m = h1.shape[0]
    n = 2 * m
    total: dict[str, complex] = {"I" * n: complex(core)}
    ladders = {
        (p, dag): _ladder(p, dag, n) for p in range(n) for dag in (True, False)
    }
    for p in range(m):
        for q in range(m):
            if abs(h1[p, q]) < 1e-13:
                continue
            for spin in (0, 1):
                op = _op_product(ladders[(2 * p + spin, True)], ladders[(2 * q + spin, False)], n)
                _accumulate(total, op, h1[p, q])
    # 1/2 sum_{pqrs,st} (pq|rs) a_ps+ a_rt+ a_st a_qs  (chemists' notation)
    for p in range(m):
        for q in range(m):
            for r in range(m):
                for s in range(m):
                    v = h2[p, q, r, s]
                    if abs(v) < 1e-13:
                        continue
                    for sp in (0, 1):
                        for tau in (0, 1):
                            i, j, k, l = 2 * p + sp, 2 * r + tau, 2 * s + tau, 2 * q + sp
                            if i == j or k == l:
                                continue
                            op = _op_product(
                                _op_product(ladders[(i, True)], ladders[(j, True)], n),
                                _op_product(ladders[(k, False)], ladders[(l, False)], n),
                                n,
                            )
                            _accumulate(total, op, 0.5 * v)
    out = {}
    for t, c in total.items():
        if abs(c) > PRUNE:
            if abs(c.imag) > 1e-9:
                raise ValueError(f"non-real JW coefficient {c} on {t}")
            out[t] = c
    return out


def _term_masks(term: str) -> tuple[int, int, int]:
    n = len(term)
    flip = y = z = 0
    for q, axis in enumerate(term):
        bit = 1 << (n - 1 - q)
        if axis in "XY":
            flip |= bit
        if axis == "Y":
            y |= bit
        if axis == "Z":
            z |= bit
    return flip, y, z


def _popcount(values: np.ndarray) -> np.ndarray:
    out = np.zeros_like(values)
    v = values.copy()
    while np.any(v):
        out += v & 1
        v >>= 1
    return out


def hf_expectation(terms: dict, bitstring: str) -> float:
    """<x|H|x> for a computational basis state: diagonal (flip-free) terms only."""
    x = int(bitstring, 2) if bitstring else 0
    total = 0.0
    for term, coeff in terms.items():
        flip, _, z = _term_masks(term)
        if flip:
            continue
        sign = -1.0 if bin(x & z).count("1") % 2 else 1.0
        total += coeff.real * sign
    return total


def apply_terms(vec: np.ndarray, terms: dict, n_qubits: int) -> np.ndarray:
    """H |psi> for a dict-form qubit operator on a full statevector."""
    out = np.zeros_like(vec, dtype=complex)
    idx = np.arange(2**n_qubits, dtype=np.int64)
    for term, coeff in terms.items():
        flip, ymask, zmask = _term_masks(term)
        src = idx ^ flip
        n_y = bin(ymask).count("1")
        signs = 1.0 - 2.0 * (_popcount(src & (ymask | zmask)) % 2)
        out += (1j**n_y) * coeff * signs * vec[src]
    return out


def fci_ground_state(terms: dict, n_qubits: int, n_electrons: int):
    """(energy, full statevector) of the particle-sector ground state."""
    states = np.array(
        [x for x in range(2**n_qubits) if bin(x).count("1") == n_electrons],
        dtype=np.int64,
    )
    dim = len(states)
    index = {int(x): i for i, x in enumerate(states)}
    mat = np.zeros((dim, dim), dtype=complex)
    for term, coeff in terms.items():
        flip, ymask, zmask = _term_masks(term)
        targets = states ^ flip
        n_y = bin(ymask).count("1")
        signs = 1.0 - 2.0 * (_popcount(states & (ymask | zmask)) % 2)
        phases = (1j**n_y) * coeff * signs
        for i, (tgt, ph) in enumerate(zip(targets, phases)):
            j = index.get(int(tgt))
            if j is not None:
                mat[j, i] += ph
    vals, vecs = np.linalg.eigh(mat)
    full = np.zeros(2**n_qubits, dtype=complex)
    full[states] = vecs[:, 0]
    return float(vals[0]), full


def spatial_one_rdm(vector: np.ndarray, orbitals: list[int], n_qubits: int) -> np.ndarray:
    """Spin-summed one-particle density matrix over the given spatial orbitals."""
    m = len(orbitals)
    gamma = np.zeros((m, m))
    for a, p in enumerate(orbitals):
        for b, q in enumerate(orbitals):
            total = 0.0
            for spin in (0, 1):
                op = _op_product(
                    _ladder(2 * p + spin, True, n_qubits),
                    _ladder(2 * q + spin, False, n_qubits),
                    n_qubits,
                )
                total += float(np.vdot(vector, apply_terms(vector, op, n_qubits)).real)
            gamma[a, b] = total
    return gamma


def fci_ground_energy(terms: dict, n_qubits: int, n_electrons: int) -> float:
    """Lowest eigenvalue of the qubit Hamiltonian in the fixed-particle sector."""
    states = np.array(
        [x for x in range(2**n_qubits) if bin(x).count("1") == n_electrons],
        dtype=np.int64,
    )
    index = {int(x): i for i, x in enumerate(states)}
    dim = len(states)
    rows, cols, vals = [], [], []
    for term, coeff in terms.items():
        flip, ymask, zmask = _term_masks(term)
        targets = states ^ flip
        n_y = bin(ymask).count("1")
        signs = 1.0 - 2.0 * (_popcount(states & (ymask | zmask)) % 2)
        phases = (1j**n_y) * coeff * signs
        for i, (tgt, ph) in enumerate(zip(targets, phases)):
            j = index.get(int(tgt))
            if j is not None:
                rows.append(j)
                cols.append(i)
                vals.append(ph)
    mat = coo_matrix((vals, (rows, cols)), shape=(dim, dim)).tocsr()
    herm_err = abs(mat - mat.getH()).max()
    if herm_err > 1e-9:
        raise ValueError(f"sector Hamiltonian not Hermitian (residual {herm_err:.2e})")
    if dim <= 64:
        return float(np.linalg.eigvalsh(mat.toarray())[0])
    return float(eigsh(mat, k=1, which="SA", return_eigenvectors=False)[0])


def mo_integrals(hcore_ao, eri_ao, c):
    h1 = c.T @ hcore_ao @ c
    h2 = np.einsum("pqrs,pi,qj,rk,sl->ijkl", eri_ao, c, c, c, c, optimize=True)
    return h1, h2


def active_space(h1, h2, core_energy, frozen: list[int], active: list[int]):
    """Fold frozen doubly-occupied orbitals into an effective active Hamiltonian."""
    e_core = core_energy
    for i in frozen:
        e_core += 2.0 * h1[i, i]
        for j in frozen:
            e_core += 2.0 * h2[i, i, j, j] - h2[i, j, j, i]
    idx = np.asarray(active, dtype=int)
    h1_eff = h1[np.ix_(idx, idx)].copy()
    for a, p in enumerate(active):
        for b, q in enumerate(active):
            for i in frozen:
                h1_eff[a, b] += 2.0 * h2[p, q, i, i] - h2[p, i, i, q]
    h2_eff = h2[np.ix_(idx, idx, idx, idx)].copy()
    return h1_eff, h2_eff, e_core
