"""Restricted (closed-shell) and restricted open-shell Hartree-Fock."""

from __future__ import annotations

import numpy as np


class SCFError(RuntimeError):
    pass


def _orthogonalizer(s: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(s)
    if np.min(vals) < 1e-8:
        raise SCFError("overlap matrix is near-singular")
    return vecs @ np.diag(vals**-0.5) @ vecs.T


def rhf(hcore, s, eri, n_electrons, max_iter=200, conv=1e-12):
    """Closed-shell RHF with DIIS.  Returns (energy_electronic, C, eps)."""
    if n_electrons % 2 != 0:
        raise SCFError("RHF requires an even electron count")
    n_occ = n_electrons // 2
    x = _orthogonalizer(s)
    # core guess
    f = hcore.copy()
    errors, focks = [], []
    energy = 0.0
    dm = None
    for iteration in range(max_iter):
        fp = x.T @ f @ x
        eps, cp = np.linalg.eigh(fp)
        c = x @ cp
        dm = c[:, :n_occ] @ c[:, :n_occ].T
        j = np.einsum("ijkl,kl->ij", eri, dm, optimize=True)
        k = np.einsum("ikjl,kl->ij", eri, dm, optimize=True)
        f_new = hcore + 2.0 * j - k
        new_energy = float(np.sum(dm * (hcore + f_new)))
        err = f_new @ dm @ s - s @ dm @ f_new
        errors.append(x.T @ err @ x)
        focks.append(f_new)
        if len(focks) > 8:
            errors.pop(0)
            focks.pop(0)
        if iteration > 0 and abs(new_energy - energy) < conv and np.max(np.abs(err)) < 1e-8:
            return new_energy, c, eps
        energy = new_energy
        f = _diis_extrapolate(focks, errors)
    raise SCFError(f"RHF did not converge in {max_iter} iterations")


def _diis_extrapolate(focks, errors):
    m = len(focks)
    if m == 1:
        return focks[0]
    b = -np.ones((m + 1, m + 1))
    b[m, m] = 0.0
    for i in range(m):
        for j in range(m):
            b[i, j] = np.sum(errors[i] * errors[j])
    rhs = np.zeros(m + 1)
    rhs[m] = -1.0
    try:
        coeffs = np.linalg.solve(b, rhs)[:m]
    except np.linalg.LinAlgError:
        return focks[-1]
    return sum(c * f for c, f in zip(coeffs, focks))


def rohf(hcore, s, eri, n_alpha, n_beta, max_iter=500, conv=1e-12, damping=0.35):
    """Roothaan single-matrix ROHF.  Returns (energy_electronic, C, eps).

    Uses Guest-Saunders coupling for the closed/open/virtual blocks of the
    effective Fock matrix and plain damping, which is robust enough for the
    small open-shell chains generated here.
    """
    if n_alpha < n_beta:
        n_alpha, n_beta = n_beta, n_alpha
    x = _orthogonalizer(s)
    n = hcore.shape[0]
    f_eff = hcore.copy()
    c = None
    energy = 0.0
    prev_f = None
    for iteration in range(max_iter):
        fp = x.T @ f_eff @ x
        _, cp = np.linalg.eigh(fp)
        c = x @ cp
        dm_a = c[:, :n_alpha] @ c[:, :n_alpha].T
        dm_b = c[:, :n_beta] @ c[:, :n_beta].T
        j_a = np.einsum("ijkl,kl->ij", eri, dm_a, optimize=True)
        j_b = np.einsum("ijkl,kl->ij", eri, dm_b, optimize=True)
        k_a = np.einsum("ikjl,kl->ij", eri, dm_a, optimize=True)
        k_b = np.einsum("ikjl,kl->ij", eri, dm_b, optimize=True)
        f_a = hcore + j_a + j_b - k_a
        f_b = hcore + j_a + j_b - k_b
        new_energy = 0.5 * float(
            np.sum(dm_a * (hcore + f_a)) + np.sum(dm_b * (hcore + f_b))
        )
        # effective Fock in the current MO basis
        f_a_mo = c.T @ f_a @ c
        f_b_mo = c.T @ f_b @ c
        f_avg = 0.5 * (f_a_mo + f_b_mo)
        r = f_avg.copy()
        closed = slice(0, n_beta)
        open_ = slice(n_beta, n_alpha)
        virt = slice(n_alpha, n)
        r[closed, open_] = f_b_mo[closed, open_]
        r[open_, closed] = f_b_mo[open_, closed]
        r[open_, virt] = f_a_mo[open_, virt]
        r[virt, open_] = f_a_mo[virt, open_]
        # back to AO-like basis through C (C is S-orthonormal)
        f_new = np.linalg.solve(c.T, r) @ np.linalg.inv(c)
        f_new = 0.5 * (f_new + f_new.T)
        if iteration > 0 and abs(new_energy - energy) < conv:
            eps = np.diag(c.T @ (0.5 * (f_a + f_b)) @ c).copy()
            return new_energy, c, eps
        energy = new_energy
        if prev_f is not None:
            f_new = (1.0 - damping) * f_new + damping * prev_f
        prev_f = f_new
        f_eff = f_new
    raise SCFError(f"ROHF did not converge in {max_iter} iterations")
