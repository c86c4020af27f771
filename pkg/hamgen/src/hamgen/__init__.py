"""Offline molecular qubit-Hamiltonian generator (STO-3G, Jordan-Wigner)."""

from .generate import PRESETS, GeneratedHamiltonian, MoleculeSpec, generate, verify

__all__ = ["PRESETS", "GeneratedHamiltonian", "MoleculeSpec", "generate", "verify"]
