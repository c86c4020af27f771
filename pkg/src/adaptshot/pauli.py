"""Exact symbolic algebra on N-qubit Pauli strings and Pauli sums.

A Pauli string (term) is a plain ``str`` over the alphabet ``IXYZ`` whose
letters are ordered by ascending qubit index; qubit 0 is the leftmost
character.  Coefficients live in :class:`PauliSum`, which maps canonical
strings to complex numbers and prunes entries below ``PRUNE_TOL`` whenever
like terms are combined.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Mapping

# Coefficients with magnitude below this are dropped after combining terms.
PRUNE_TOL = 1e-12

AXES = "IXYZ"

# Single-qubit products a*b -> (phase, axis).
_SINGLE_PRODUCT = {
    ("I", "I"): (1, "I"),
    ("I", "X"): (1, "X"),
    ("I", "Y"): (1, "Y"),
    ("I", "Z"): (1, "Z"),
    ("X", "I"): (1, "X"),
    ("Y", "I"): (1, "Y"),
    ("Z", "I"): (1, "Z"),
    ("X", "X"): (1, "I"),
    ("Y", "Y"): (1, "I"),
    ("Z", "Z"): (1, "I"),
    ("X", "Y"): (1j, "Z"),
    ("Y", "X"): (-1j, "Z"),
    ("Y", "Z"): (1j, "X"),
    ("Z", "Y"): (-1j, "X"),
    ("Z", "X"): (1j, "Y"),
    ("X", "Z"): (-1j, "Y"),
}


def identity_term(n_qubits: int) -> str:
    return "I" * n_qubits


def validate_term(term: str, n_qubits: int | None = None) -> None:
    """Raise ValueError unless ``term`` is a valid Pauli string."""
    if n_qubits is not None and len(term) != n_qubits:
        raise ValueError(
            f"Pauli string {term!r} has length {len(term)}, expected {n_qubits}"
        )
    bad = set(term) - set(AXES)
    if bad:
        raise ValueError(f"Pauli string {term!r} contains invalid letters {sorted(bad)}")


def multiply(a: str, b: str) -> tuple[complex, str]:
    """Product of two Pauli strings as ``(phase, string)`` with phase in {1,-1,i,-i}."""
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")
    phase: complex = 1
    out = []
    for ca, cb in zip(a, b):
        p, c = _SINGLE_PRODUCT[(ca, cb)]
        phase *= p
        out.append(c)
    return phase, "".join(out)


def commutes(a: str, b: str) -> bool:
    """True iff the strings commute (even number of anticommuting positions)."""
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")
    anti = sum(1 for ca, cb in zip(a, b) if ca != "I" and cb != "I" and ca != cb)
    return anti % 2 == 0


def qubit_wise_commutes(a: str, b: str) -> bool:
    """True iff at every position the letters are equal or at least one is I."""
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")
    return all(ca == cb or ca == "I" or cb == "I" for ca, cb in zip(a, b))


class PauliSum:
    """A linear combination of Pauli strings with complex coefficients.

    Instances behave as immutable values: the arithmetic operators return new
    sums, and the term map is combined and pruned on construction, so a stored
    coefficient never has magnitude below ``PRUNE_TOL``.
    """

    __slots__ = ("n_qubits", "_terms")

    def __init__(self, n_qubits: int, terms: Mapping[str, complex] | Iterable[tuple[str, complex]] = ()):
        if n_qubits <= 0:
            raise ValueError("n_qubits must be positive")
        self.n_qubits = int(n_qubits)
        combined: dict[str, complex] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for term, coeff in items:
            validate_term(term, self.n_qubits)
            c = combined.get(term, 0j) + complex(coeff)
            if abs(c) <= PRUNE_TOL:
                combined.pop(term, None)
            else:
                combined[term] = c
        self._terms = combined

    @classmethod
    def from_term(cls, term: str, coeff: complex = 1.0) -> "PauliSum":
        return cls(len(term), [(term, coeff)])

    @classmethod
    def zero(cls, n_qubits: int) -> "PauliSum":
        return cls(n_qubits)

    # -- inspection ---------------------------------------------------------

    def terms(self) -> Iterator[tuple[str, complex]]:
        """Iterate ``(string, coefficient)`` in canonical (lexicographic) order."""
        for term in sorted(self._terms):
            yield term, self._terms[term]

    def coefficient(self, term: str) -> complex:
        return self._terms.get(term, 0j)

    def __len__(self) -> int:
        return len(self._terms)

    def __contains__(self, term: str) -> bool:
        return term in self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    @property
    def identity_coefficient(self) -> complex:
        return self._terms.get(identity_term(self.n_qubits), 0j)

    def is_hermitian(self, tol: float = 1e-10) -> bool:
        return all(abs(c.imag) <= tol for c in self._terms.values())

    def is_skew_hermitian(self, tol: float = 1e-10) -> bool:
        return all(abs(c.real) <= tol for c in self._terms.values())

    # -- algebra ------------------------------------------------------------

    def __add__(self, other: "PauliSum") -> "PauliSum":
        self._check_compatible(other)
        merged = dict(self._terms)
        new = PauliSum(self.n_qubits)
        for t, c in other._terms.items():
            merged[t] = merged.get(t, 0j) + c
        new._terms = {t: c for t, c in merged.items() if abs(c) > PRUNE_TOL}
        return new

    def __sub__(self, other: "PauliSum") -> "PauliSum":
        return self + (-1.0) * other

    def __neg__(self) -> "PauliSum":
        return (-1.0) * self

    def __mul__(self, scalar: complex) -> "PauliSum":
        new = PauliSum(self.n_qubits)
        if abs(scalar) > 0:
            new._terms = {
                t: c * scalar for t, c in self._terms.items() if abs(c * scalar) > PRUNE_TOL
            }
        return new

    __rmul__ = __mul__

    def __matmul__(self, other: "PauliSum") -> "PauliSum":
        """Operator product, fully expanded and combined."""
        self._check_compatible(other)
        acc: dict[str, complex] = {}
        for ta, ca in self._terms.items():
            for tb, cb in other._terms.items():
                phase, prod = multiply(ta, tb)
                acc[prod] = acc.get(prod, 0j) + ca * cb * phase
        new = PauliSum(self.n_qubits)
        new._terms = {t: c for t, c in acc.items() if abs(c) > PRUNE_TOL}
        return new

    def adjoint(self) -> "PauliSum":
        new = PauliSum(self.n_qubits)
        new._terms = {t: c.conjugate() for t, c in self._terms.items()}
        return new

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PauliSum):
            return NotImplemented
        return self.n_qubits == other.n_qubits and self._terms == other._terms

    def equals_up_to_sign(self, other: "PauliSum", tol: float = 1e-10) -> bool:
        """True if self == other or self == -other within ``tol`` per coefficient."""
        if self.n_qubits != other.n_qubits or set(self._terms) != set(other._terms):
            return False
        for sign in (1.0, -1.0):
            if all(
                abs(self._terms[t] - sign * other._terms[t]) <= tol for t in self._terms
            ):
                return True
        return False

    def _check_compatible(self, other: "PauliSum") -> None:
        if self.n_qubits != other.n_qubits:
            raise ValueError(
                f"qubit-count mismatch: {self.n_qubits} vs {other.n_qubits}"
            )

    # -- rendering ----------------------------------------------------------

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for term, coeff in self.terms():
            if abs(coeff.imag) <= PRUNE_TOL:
                c = f"{coeff.real:+.10g}"
            elif abs(coeff.real) <= PRUNE_TOL:
                c = f"{coeff.imag:+.10g}i"
            else:
                c = f"({coeff.real:+.10g}{coeff.imag:+.10g}i)"
            parts.append(f"{c} · {term}")
        return "\n".join(parts)

    def __repr__(self) -> str:
        return f"PauliSum(n_qubits={self.n_qubits}, n_terms={len(self)})"


def commutator(h: PauliSum, a: PauliSum) -> PauliSum:
    """[h, a] = h·a - a·h, expanded with like terms combined and pruned.

    Only pairs of strings that anticommute contribute; each contributes
    ``2 * c_h * c_a * phase(P_h P_a)`` on the product string.
    """
    if h.n_qubits != a.n_qubits:
        raise ValueError(f"qubit-count mismatch: {h.n_qubits} vs {a.n_qubits}")
    acc: dict[str, complex] = {}
    for th, ch in h._terms.items():
        for ta, ca in a._terms.items():
            if commutes(th, ta):
                continue
            phase, prod = multiply(th, ta)
            acc[prod] = acc.get(prod, 0j) + 2.0 * ch * ca * phase
    out = PauliSum(h.n_qubits)
    out._terms = {t: c for t, c in acc.items() if abs(c) > PRUNE_TOL}
    return out
