"""Minimal STO-3G basis set for the elements used by the presets.

Each shell is stored as (angular momentum, exponents, contraction
coefficients); sp shells are split into an s and a p entry sharing
exponents.  Coefficients refer to normalized primitives; contracted
functions are renormalized when expanded.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_1S_COEFS = (0.1543289673, 0.5353281423, 0.4446345422)
_2S_COEFS = (-0.09996722919, 0.3995128261, 0.7001154689)
_2P_COEFS = (0.1559162750, 0.6076837186, 0.3919573931)

# element -> list of (l, exponents, coefficients)
STO3G = {
    "H": [
        (0, (3.425250914, 0.6239137298, 0.1688554040), _1S_COEFS),
    ],
    "Li": [
        (0, (16.11957475, 2.936200663, 0.7946504870), _1S_COEFS),
        (0, (0.6362897469, 0.1478600533, 0.0480886784), _2S_COEFS),
        (1, (0.6362897469, 0.1478600533, 0.0480886784), _2P_COEFS),
    ],
    "Be": [
        (0, (30.16787069, 5.495115306, 1.487192653), _1S_COEFS),
        (0, (1.314833110, 0.3055389383, 0.0993707456), _2S_COEFS),
        (1, (1.314833110, 0.3055389383, 0.0993707456), _2P_COEFS),
    ],
    "N": [
        (0, (99.10616896, 18.05231239, 4.885660238), _1S_COEFS),
        (0, (3.780455879, 0.8784966449, 0.2857143744), _2S_COEFS),
        (1, (3.780455879, 0.8784966449, 0.2857143744), _2P_COEFS),
    ],
}

ATOMIC_NUMBER = {"H": 1, "Li": 3, "Be": 4, "N": 7}

ANGSTROM_TO_BOHR = 1.8897259886


@dataclass
class BasisFunction:
    """Contracted Cartesian Gaussian: sum_k c_k N_k exp(-a_k r^2) x^l y^m z^n."""

    center: np.ndarray
    powers: tuple[int, int, int]
    exponents: np.ndarray
    coefficients: np.ndarray  # includes primitive norms and contraction norm


def _double_factorial(n: int) -> int:
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def _primitive_norm(alpha: float, powers) -> float:
    l, m, n = powers
    num = (2 * alpha / np.pi) ** 0.75 * (4 * alpha) ** ((l + m + n) / 2)
    den = np.sqrt(
        _double_factorial(2 * l - 1)
        * _double_factorial(2 * m - 1)
        * _double_factorial(2 * n - 1)
    )
    return num / den


_CARTESIAN_POWERS = {0: [(0, 0, 0)], 1: [(1, 0, 0), (0, 1, 0), (0, 0, 1)]}


def build_basis(atoms: list[tuple[str, tuple[float, float, float]]]) -> list[BasisFunction]:
    """Expand an atom list (symbol, xyz in Angstrom) into basis functions."""
    functions = []
    for symbol, xyz in atoms:
        if symbol not in STO3G:
            raise ValueError(f"no STO-3G data for element {symbol!r}")
        center = np.asarray(xyz, dtype=float) * ANGSTROM_TO_BOHR
        for l, exps, coefs in STO3G[symbol]:
            for powers in _CARTESIAN_POWERS[l]:
                alphas = np.asarray(exps, dtype=float)
                prims = np.array(
                    [c * _primitive_norm(a, powers) for a, c in zip(alphas, coefs)]
                )
                fn = BasisFunction(center, powers, alphas, prims)
                # renormalize the contraction
                from .integrals import overlap  # local import to avoid a cycle

                norm = overlap(fn, fn)
                fn.coefficients = prims / np.sqrt(norm)
                functions.append(fn)
    return functions


def nuclear_repulsion(atoms) -> float:
    energy = 0.0
    for i in range(len(atoms)):
        zi = ATOMIC_NUMBER[atoms[i][0]]
        ri = np.asarray(atoms[i][1], dtype=float) * ANGSTROM_TO_BOHR
        for j in range(i + 1, len(atoms)):
            zj = ATOMIC_NUMBER[atoms[j][0]]
            rj = np.asarray(atoms[j][1], dtype=float) * ANGSTROM_TO_BOHR
            energy += zi * zj / np.linalg.norm(ri - rj)
    return energy


def nuclear_charges_and_centers(atoms):
    charges = [ATOMIC_NUMBER[sym] for sym, _ in atoms]
    centers = [np.asarray(xyz, dtype=float) * ANGSTROM_TO_BOHR for _, xyz in atoms]
    return charges, centers
