"""Molecule presets and the qubit-Hamiltonian file generator."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .basis import build_basis, nuclear_charges_and_centers, nuclear_repulsion
from .integrals import integral_tables
from .qubit import (
    active_space,
    fci_ground_energy,
    hf_expectation,
    jordan_wigner_hamiltonian,
    mo_integrals,
)
from .scf import rhf, rohf


@dataclass
class MoleculeSpec:
    name: str
    atoms: list  # (symbol, (x, y, z)) in Angstrom
    charge: int = 0
    multiplicity: int = 1
    # optional (n_active_electrons, active spatial orbital indices)
    active: tuple[int, list[int]] | None = None
    # optional frontier-natural-orbital reduction: a pilot CASCI over
    # ``pilot_orbitals`` is solved, its natural orbitals replace them, the
    # top-``keep`` NOs form the active space, and the retained pair is gauge
    # rotated by ``gauge_deg`` (the measurement-clique-consolidating gauge)
    frontier_cas: dict | None = None
    notes: str = ""

    @property
    def n_electrons(self) -> int:
        from .basis import ATOMIC_NUMBER

        return sum(ATOMIC_NUMBER[sym] for sym, _ in self.atoms) - self.charge


def _chain(symbol: str, count: int, spacing: float):
    return [(symbol, (0.0, 0.0, spacing * i)) for i in range(count)]


PRESETS: dict[str, MoleculeSpec] = {
    "h2": MoleculeSpec("H2", _chain("H", 2, 0.74), notes="equilibrium 0.74 A"),
    "h3": MoleculeSpec("H3", _chain("H", 3, 1.0), multiplicity=2, notes="linear chain, 1.0 A"),
    "h4": MoleculeSpec("H4", _chain("H", 4, 1.0), notes="linear chain, 1.0 A"),
    "h5": MoleculeSpec("H5", _chain("H", 5, 1.0), multiplicity=2, notes="linear chain, 1.0 A"),
    "lih": MoleculeSpec("LiH", [("Li", (0.0, 0.0, 0.0)), ("H", (0.0, 0.0, 1.546))]),
    "lih_reduced": MoleculeSpec(
        "LiH-reduced",
        [("Li", (0.0, 0.0, 0.0)), ("H", (0.0, 0.0, 1.546))],
        frontier_cas={
            "n_electrons": 2,
            "pilot_orbitals": [1, 2, 5],
            "keep": 2,
            "gauge_deg": 8.0,
        },
        notes=(
            "core frozen, pi orbitals dropped; CAS(2e,2o) over the leading "
            "natural orbitals of a pilot CASCI(2e,3o), active pair gauge-rotated "
            "by 8 deg to consolidate the hopping terms into the reference "
            "nine-clique measurement layout"
        ),
    ),
    "beh2": MoleculeSpec(
        "BeH2",
        [("Be", (0.0, 0.0, 0.0)), ("H", (0.0, 0.0, 1.326)), ("H", (0.0, 0.0, -1.326))],
    ),
    "n2h4": MoleculeSpec(
        "N2H4",
        [
            ("N", (0.0, 0.716, 0.0)),
            ("N", (0.0, -0.716, 0.0)),
            ("H", (0.95, 1.05, 0.28)),
            ("H", (-0.88, 1.05, 0.42)),
            ("H", (-0.95, -1.05, 0.28)),
            ("H", (0.88, -1.05, 0.42)),
        ],
        active=(8, None),  # 8 electrons in 8 orbitals around the Fermi level
        notes="gauche-like geometry; (8e,8o) active space",
    ),
}


def _frontier_natural_orbitals(spec, hcore, eri, e_nuc, c):
    """Rotate pilot orbitals into the natural-orbital basis of a pilot CASCI,
    then apply the gauge rotation to the retained pair."""
    from .qubit import fci_ground_state, spatial_one_rdm

    cfg = spec.frontier_cas
    pilot = cfg["pilot_orbitals"]
    n_act_e = cfg["n_electrons"]
    n_frozen = (spec.n_electrons - n_act_e) // 2
    frozen = [i for i in range(n_frozen) if i not in pilot]

    h1, h2 = mo_integrals(hcore, eri, c)
    h1p, h2p, ecore = active_space(h1, h2, e_nuc, frozen, pilot)
    terms = jordan_wigner_hamiltonian(h1p, h2p, ecore)
    nq = 2 * len(pilot)
    _, vector = fci_ground_state(terms, nq, n_act_e)
    gamma = spatial_one_rdm(vector, list(range(len(pilot))), nq)
    occ, rot = np.linalg.eigh(gamma)
    order = np.argsort(occ)[::-1]
    rot = rot[:, order]
    for k in range(rot.shape[1]):
        if rot[np.argmax(np.abs(rot[:, k])), k] < 0:
            rot[:, k] *= -1.0

    c_new = c.copy()
    c_new[:, pilot] = c[:, pilot] @ rot
    theta = np.deg2rad(cfg.get("gauge_deg", 0.0))
    if theta:
        a, b = pilot[0], pilot[1]
        ca = np.cos(theta) * c_new[:, a] + np.sin(theta) * c_new[:, b]
        cb = -np.sin(theta) * c_new[:, a] + np.cos(theta) * c_new[:, b]
        c_new[:, a], c_new[:, b] = ca, cb
    return c_new


@dataclass
class GeneratedHamiltonian:
    document: dict
    terms: dict
    n_qubits: int

    def save(self, path: str | Path) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.document, indent=1))
        return path


def generate(spec: MoleculeSpec) -> GeneratedHamiltonian:
    """Run SCF, map to qubits, attach HF/FCI references, and emit the file dict."""
    functions = build_basis(spec.atoms)
    charges, centers = nuclear_charges_and_centers(spec.atoms)
    s, t, v, eri = integral_tables(functions, charges, centers)
    hcore = t + v
    e_nuc = nuclear_repulsion(spec.atoms)
    n_elec = spec.n_electrons

    n_unpaired = spec.multiplicity - 1
    n_alpha = (n_elec + n_unpaired) // 2
    n_beta = n_elec - n_alpha
    if n_alpha == n_beta:
        e_scf, c, _ = rhf(hcore, s, eri, n_elec)
    else:
        e_scf, c, _ = rohf(hcore, s, eri, n_alpha, n_beta)

    frontier_meta = spec.frontier_cas
    if spec.frontier_cas is not None:
        c = _frontier_natural_orbitals(spec, hcore, eri, e_nuc, c)
        n_active = spec.frontier_cas["keep"]
        pilot = spec.frontier_cas["pilot_orbitals"]
        spec = MoleculeSpec(
            spec.name, spec.atoms, spec.charge, spec.multiplicity,
            active=(spec.frontier_cas["n_electrons"], pilot[:n_active]),
            notes=spec.notes,
        )

    h1, h2 = mo_integrals(hcore, eri, c)
    core_energy = e_nuc

    if spec.active is not None:
        n_active_elec, active_orbitals = spec.active
        n_frozen = (n_elec - n_active_elec) // 2
        if active_orbitals is None:
            active_orbitals = list(range(n_frozen, n_frozen + n_active_elec))
        frozen = [i for i in range(n_frozen) if i not in active_orbitals]
        h1, h2, core_energy = active_space(h1, h2, e_nuc, frozen, active_orbitals)
        n_elec_q = n_active_elec
        n_alpha_q = n_alpha - len(frozen)
        n_beta_q = n_beta - len(frozen)
    else:
        n_elec_q = n_elec
        n_alpha_q, n_beta_q = n_alpha, n_beta

    terms = jordan_wigner_hamiltonian(h1, h2, core_energy)
    m = h1.shape[0]
    n_qubits = 2 * m

    occupation = ["0"] * n_qubits
    for i in range(n_alpha_q):
        occupation[2 * i] = "1"
    for i in range(n_beta_q):
        occupation[2 * i + 1] = "1"
    hf_bits = "".join(occupation)

    hf_energy = hf_expectation(terms, hf_bits)
    scf_total = e_scf + e_nuc
    if spec.active is None and abs(hf_energy - scf_total) > 1e-8:
        raise RuntimeError(
            f"{spec.name}: SCF energy {scf_total:.10f} and <HF|H|HF> {hf_energy:.10f} disagree"
        )
    fci_energy = fci_ground_energy(terms, n_qubits, n_elec_q)

    document = {
        "n_qubits": n_qubits,
        "n_electrons": n_elec_q,
        "molecule": spec.name,
        "basis": "sto-3g",
        "mapping": "jordan_wigner",
        "hf_bitstring": hf_bits,
        "hf_energy": hf_energy,
        "fci_energy": fci_energy,
        "terms": [
            {"pauli": term, "re": float(coeff.real), "im": float(coeff.imag)}
            for term, coeff in sorted(terms.items())
        ],
        "metadata": {
            "generator": "hamgen",
            "geometry_angstrom": [[sym, list(xyz)] for sym, xyz in spec.atoms],
            "charge": spec.charge,
            "multiplicity": spec.multiplicity,
            "active_space": (
                None
                if spec.active is None
                else {"n_electrons": spec.active[0], "spatial_orbitals": spec.active[1]}
            ),
            "frontier_cas": frontier_meta,
            "scf_total_energy": scf_total,
            "notes": spec.notes,
        },
    }
    return GeneratedHamiltonian(document, terms, n_qubits)


@dataclass
class VerifyReport:
    ok: bool
    checks: list = field(default_factory=list)

    def add(self, name: str, passed: bool, detail: str = ""):
        self.checks.append((name, passed, detail))
        self.ok = self.ok and passed

    def __str__(self) -> str:
        lines = [
            f"[{'PASS' if passed else 'FAIL'}] {name}" + (f" ({detail})" if detail else "")
            for name, passed, detail in self.checks
        ]
        lines.append("OK" if self.ok else "FAILED")
        return "\n".join(lines)


def verify(document: dict) -> VerifyReport:
    """Recompute reference quantities from the emitted terms and compare."""
    report = VerifyReport(ok=True)
    terms = {
        entry["pauli"]: complex(entry["re"], entry["im"]) for entry in document["terms"]
    }
    report.add("nonempty terms", bool(terms), f"{len(terms)} terms")
    if not terms:
        return report

    n_qubits = document["n_qubits"]
    bad_len = [t for t in terms if len(t) != n_qubits]
    report.add("string lengths", not bad_len, f"{len(bad_len)} bad")

    worst_imag = max(abs(c.imag) for c in terms.values())
    report.add("hermitian coefficients", worst_imag <= 1e-10, f"max |im| = {worst_imag:.2e}")

    hf = hf_expectation(terms, document["hf_bitstring"])
    dev = abs(hf - document["hf_energy"])
    report.add("hf energy consistency", dev <= 1e-8, f"|dev| = {dev:.2e}")

    fci = fci_ground_energy(terms, n_qubits, document["n_electrons"])
    fci_dev = abs(fci - document["fci_energy"])
    report.add("fci energy consistency", fci_dev <= 1e-8, f"|dev| = {fci_dev:.2e}")

    if (dev > 1e-8 or fci_dev > 1e-8) and document.get("metadata", {}).get("geometry_angstrom"):
        suspect = _locate_suspect_term(document, terms)
        if suspect:
            report.add("suspect term", False, suspect)

    report.add(
        "variational ordering", document["fci_energy"] <= document["hf_energy"] + 1e-12
    )
    return report


def _locate_suspect_term(document: dict, terms: dict) -> str | None:
    """Regenerate from the recorded geometry and name the worst term mismatch."""
    meta = document["metadata"]
    try:
        active = meta.get("active_space")
        frontier = meta.get("frontier_cas")
        spec = MoleculeSpec(
            document["molecule"],
            [(sym, tuple(xyz)) for sym, xyz in meta["geometry_angstrom"]],
            charge=meta.get("charge", 0),
            multiplicity=meta.get("multiplicity", 1),
            active=(None if frontier or not active
                    else (active["n_electrons"], active["spatial_orbitals"])),
            frontier_cas=frontier,
        )
        reference = generate(spec).terms
    except Exception:
        return None
    worst, worst_dev = None, 1e-9
    for term in set(terms) | set(reference):
        dev = abs(terms.get(term, 0j) - reference.get(term, 0j))
        if dev > worst_dev:
            worst, worst_dev = term, dev
    return f"{worst} (|delta| = {worst_dev:.2e})" if worst else None
