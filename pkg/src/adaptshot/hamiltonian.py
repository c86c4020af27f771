"""Fermionic operators, the Jordan-Wigner mapping, and Hamiltonian file I/O.

Spin orbitals are indexed with alpha/beta interleaved per spatial orbital
(spin orbital ``2i`` is alpha, ``2i+1`` is beta of spatial orbital ``i``), and
``hf_bitstring`` lists occupations most-significant-first (orbital 0 is the
leftmost character).  The canonical file schema is JSON::

    {"n_qubits": int, "n_electrons": int, "molecule": str, "basis": str,
     "mapping": "jordan_wigner", "hf_bitstring": str, "hf_energy": float,
     "fci_energy": float, "terms": [{"pauli": str, "re": float, "im": float}]}
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .pauli import PauliSum, validate_term
from .statevector import Statevector

HERMITICITY_TOL = 1e-10


class HamiltonianFileError(ValueError):
    """A Hamiltonian file violated the schema or a physical invariant."""


@dataclass
class FermionOperator:
    """Sum of products of fermionic ladder operators.

    ``products`` maps an ordered tuple of ``(mode, dagger)`` pairs to a complex
    coefficient; the empty tuple is the identity.  Only construction, scaling,
    addition, and the Jordan-Wigner image are supported; normal ordering is
    left to the algebra of PauliSum after mapping.
    """

    n_modes: int
    products: dict[tuple[tuple[int, bool], ...], complex] = field(default_factory=dict)

    def __post_init__(self):
        for ops in self.products:
            for mode, _ in ops:
                if not 0 <= mode < self.n_modes:
                    raise ValueError(
                        f"mode index {mode} out of range for {self.n_modes} modes"
                    )

    @classmethod
    def ladder(cls, ops: tuple[tuple[int, bool], ...], n_modes: int, coeff: complex = 1.0):
        return cls(n_modes, {tuple(ops): complex(coeff)})

    def __add__(self, other: "FermionOperator") -> "FermionOperator":
        if self.n_modes != other.n_modes:
            raise ValueError("mode-count mismatch")
        out = dict(self.products)
        for ops, c in other.products.items():
            out[ops] = out.get(ops, 0j) + c
        return FermionOperator(self.n_modes, out)

    def __sub__(self, other: "FermionOperator") -> "FermionOperator":
        return self + (-1.0) * other

    def __mul__(self, scalar: complex) -> "FermionOperator":
        return FermionOperator(
            self.n_modes, {ops: c * scalar for ops, c in self.products.items()}
        )

    __rmul__ = __mul__

    def hermitian_conjugate(self) -> "FermionOperator":
        out: dict[tuple[tuple[int, bool], ...], complex] = {}
        for ops, c in self.products.items():
            conj = tuple((mode, not dag) for mode, dag in reversed(ops))
            out[conj] = out.get(conj, 0j) + c.conjugate()
        return FermionOperator(self.n_modes, out)


def _ladder_jw(mode: int, dagger: bool, n_qubits: int) -> PauliSum:
    """a_p (dagger=False) or a_p^dag (dagger=True) under Jordan-Wigner."""
    chain = "Z" * mode
    tail = "I" * (n_qubits - mode - 1)
    x_term = chain + "X" + tail
    y_term = chain + "Y" + tail
    y_coeff = -0.5j if dagger else 0.5j
    return PauliSum(n_qubits, [(x_term, 0.5), (y_term, y_coeff)])


def jordan_wigner(op: FermionOperator, n_qubits: int | None = None) -> PauliSum:
    """Standard Jordan-Wigner image: a_p^dag -> (X_p - iY_p)/2 · prod_{q<p} Z_q."""
    n = op.n_modes if n_qubits is None else n_qubits
    if n < op.n_modes:
        raise ValueError(f"n_qubits={n} smaller than operator's {op.n_modes} modes")
    total = PauliSum.zero(n)
    for ops, coeff in op.products.items():
        piece = PauliSum(n, [("I" * n, coeff)])
        for mode, dag in ops:
            piece = piece @ _ladder_jw(mode, dag, n)
        total = total + piece
    return total


def excitation_generator(
    creation: tuple[int, ...], annihilation: tuple[int, ...], n_modes: int
) -> FermionOperator:
    """T = a^dag_{c1} a^dag_{c2}... a_{a1} a_{a2}... minus its Hermitian conjugate."""
    ops = tuple((m, True) for m in creation) + tuple((m, False) for m in annihilation)
    t = FermionOperator.ladder(ops, n_modes)
    return t - t.hermitian_conjugate()


@dataclass
class HamiltonianFile:
    n_qubits: int
    n_electrons: int
    molecule: str
    basis: str
    mapping: str
    hf_bitstring: str
    hf_energy: float
    fci_energy: float
    observable: PauliSum
    metadata: dict = field(default_factory=dict)

    @property
    def n_terms(self) -> int:
        return len(self.observable)

    def validate(self) -> None:
        if self.n_qubits <= 0:
            raise HamiltonianFileError("n_qubits must be positive")
        if self.mapping != "jordan_wigner":
            raise HamiltonianFileError(f"unsupported mapping {self.mapping!r}")
        if len(self.hf_bitstring) != self.n_qubits or set(self.hf_bitstring) - {"0", "1"}:
            raise HamiltonianFileError(
                f"hf_bitstring {self.hf_bitstring!r} is not a {self.n_qubits}-bit string"
            )
        if self.hf_bitstring.count("1") != self.n_electrons:
            raise HamiltonianFileError(
                f"hf_bitstring has {self.hf_bitstring.count('1')} ones, "
                f"expected n_electrons={self.n_electrons}"
            )
        for term, coeff in self.observable.terms():
            if abs(coeff.imag) > HERMITICITY_TOL:
                raise HamiltonianFileError(
                    f"non-Hermitian coefficient on {term}: imaginary part {coeff.imag:.3e}"
                )

    def to_dict(self) -> dict:
        doc = {
            "n_qubits": self.n_qubits,
            "n_electrons": self.n_electrons,
            "molecule": self.molecule,
            "basis": self.basis,
            "mapping": self.mapping,
            "hf_bitstring": self.hf_bitstring,
            "hf_energy": self.hf_energy,
            "fci_energy": self.fci_energy,
            "terms": [
                {"pauli": term, "re": coeff.real, "im": coeff.imag}
                for term, coeff in self.observable.terms()
            ],
        }
        if self.metadata:
            doc["metadata"] = self.metadata
        return doc


_REQUIRED_FIELDS = {
    "n_qubits": int,
    "n_electrons": int,
    "molecule": str,
    "basis": str,
    "mapping": str,
    "hf_bitstring": str,
    "hf_energy": float,
    "fci_energy": float,
    "terms": list,
}


def load_hamiltonian(path: str | Path) -> HamiltonianFile:
    """Load and fully validate a Hamiltonian JSON file."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise HamiltonianFileError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise HamiltonianFileError(f"{path}: top level must be a JSON object")
    for name, kind in _REQUIRED_FIELDS.items():
        if name not in doc:
            raise HamiltonianFileError(f"{path}: missing field {name!r}")
        value = doc[name]
        if kind is float and isinstance(value, int):
            value = float(value)
        if not isinstance(value, kind):
            raise HamiltonianFileError(
                f"{path}: field {name!r} has type {type(doc[name]).__name__}, "
                f"expected {kind.__name__}"
            )
    n_qubits = doc["n_qubits"]
    terms = []
    for i, entry in enumerate(doc["terms"]):
        if not isinstance(entry, dict) or not {"pauli", "re", "im"} <= set(entry):
            raise HamiltonianFileError(f"{path}: terms[{i}] must have pauli/re/im")
        try:
            validate_term(entry["pauli"], n_qubits)
        except ValueError as exc:
            raise HamiltonianFileError(f"{path}: terms[{i}]: {exc}") from exc
        terms.append((entry["pauli"], complex(entry["re"], entry["im"])))
    ham = HamiltonianFile(
        n_qubits=n_qubits,
        n_electrons=doc["n_electrons"],
        molecule=doc["molecule"],
        basis=doc["basis"],
        mapping=doc["mapping"],
        hf_bitstring=doc["hf_bitstring"],
        hf_energy=float(doc["hf_energy"]),
        fci_energy=float(doc["fci_energy"]),
        observable=PauliSum(n_qubits, terms),
        metadata=doc.get("metadata", {}),
    )
    ham.validate()
    return ham


def save_hamiltonian(ham: HamiltonianFile, path: str | Path) -> None:
    Path(path).write_text(json.dumps(ham.to_dict(), indent=1))


def hartree_fock_state(ham: HamiltonianFile) -> Statevector:
    """Computational-basis state given by the file's occupation bitstring."""
    return Statevector.from_bitstring(ham.hf_bitstring)


def bundled_path(name: str) -> Path:
    """Path to a Hamiltonian bundled with the package (h2, h3, h4, lih_reduced)."""
    p = Path(__file__).parent / "data" / f"{name}.json"
    if not p.exists():
        available = sorted(q.stem for q in p.parent.glob("*.json"))
        raise FileNotFoundError(f"no bundled Hamiltonian {name!r}; have {available}")
    return p
