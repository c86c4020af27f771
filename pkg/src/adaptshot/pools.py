"""Construction of the four ADAPT operator pools.

All pools enumerate generalized excitations (not restricted to
occupied-to-virtual) filtered to conserve S_z under the interleaved spin
convention (even spin orbitals are alpha, odd are beta).  Operators equal up
to a global sign are merged.

Pool kinds
----------
fermionic         spin-adapted generalized single/double excitations under
                  Jordan-Wigner, anticommutation Z strings kept
qubit             individual S_z-compatible Pauli strings with Z strings
                  removed (one string per operator, coefficient i)
qubit_excitation  qubit excitations: hermitian-conjugate excitation pairs
                  with the Z strings removed
ceo               one-parameter sums/differences of the qubit excitations
                  sharing an orbital quadruple, the multi-parameter tuple
                  itself, and the qubit-excitation singles
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .hamiltonian import FermionOperator, excitation_generator, jordan_wigner
from .pauli import PauliSum, commutes

POOL_KINDS = ("fermionic", "qubit", "qubit_excitation", "ceo")


@dataclass
class PoolOperator:
    """A candidate ansatz generator with one parameter slot per generator.

    ``factorizable[j]`` records whether generator j's terms mutually commute,
    in which case its exponential splits exactly into per-term rotations; the
    spin-adapted fermionic combinations do not, and are evolved through a
    dense exponential instead.
    """

    kind: str
    indices: tuple[int, ...]
    generators: list[PauliSum]
    label: str = ""

    def __post_init__(self):
        if not self.generators:
            raise ValueError("pool operator needs at least one generator")
        self.factorizable: list[bool] = []
        for gen in self.generators:
            if not gen.is_skew_hermitian():
                raise ValueError(f"{self.label or self.kind}: generator is not skew-Hermitian")
            terms = [t for t, _ in gen.terms()]
            self.factorizable.append(
                all(commutes(a, b) for a, b in itertools.combinations(terms, 2))
            )
        if not self.label:
            self.label = f"{self.kind}{list(self.indices)}"

    @property
    def n_parameters(self) -> int:
        return len(self.generators)

    @property
    def n_qubits(self) -> int:
        return self.generators[0].n_qubits


def _check_sizes(n_electrons: int, n_qubits: int) -> None:
    if n_qubits < 2 or n_qubits % 2 != 0:
        raise ValueError(f"n_qubits must be even and >= 2, got {n_qubits}")
    if not 0 < n_electrons < n_qubits:
        raise ValueError(
            f"n_electrons must satisfy 0 < n_e < n_qubits, got {n_electrons}"
        )


def _strip_z(op: PauliSum) -> PauliSum:
    """Remove every Z letter, recombining terms (Jordan-Wigner string removal)."""
    return PauliSum(
        op.n_qubits,
        [(term.replace("Z", "I"), coeff) for term, coeff in op.terms()],
    )


def _spin(index: int) -> int:
    return index % 2


def _same_spin_pairs(n_qubits: int):
    for p, q in itertools.combinations(range(n_qubits), 2):
        if _spin(p) == _spin(q):
            yield p, q


def _quadruple_pairings(p: int, q: int, r: int, s: int):
    """S_z-conserving creation/annihilation pairings of a sorted quadruple.

    Yields ``(creation, annihilation)`` tuples.  Exactly one pairing case
    applies for two-alpha-two-beta quadruples; all three apply when all four
    indices carry the same spin.
    """
    if (_spin(p) + _spin(q) + _spin(r) + _spin(s)) % 2 != 0:
        return
    if _spin(p) == _spin(r):
        yield ((p, q), (r, s)), ((q, r), (p, s))
    if _spin(p) == _spin(q):
        yield ((p, r), (q, s)), ((q, r), (p, s))
    if _spin(p) == _spin(s):
        yield ((p, q), (r, s)), ((p, r), (q, s))


def _dedup_add(pool: list[PoolOperator], op: PoolOperator) -> bool:
    """Append unless an equivalent operator (up to sign, per generator) exists."""
    for existing in pool:
        if existing.n_parameters != op.n_parameters:
            continue
        if all(
            g1.equals_up_to_sign(g2)
            for g1, g2 in zip(existing.generators, op.generators)
        ):
            return False
    pool.append(op)
    return True


def _excitation_sum(pairings, n_qubits: int) -> FermionOperator:
    total = None
    for creation, annihilation in pairings:
        t = excitation_generator(creation, annihilation, n_qubits)
        total = t if total is None else total + t
    return total


def build_fermionic_pool(n_electrons: int, n_qubits: int) -> list[PoolOperator]:
    """Spin-adapted generalized single and double excitations under JW.

    Singles are spin-complemented over spatial orbital pairs; doubles combine
    the spin cases of each spatial quadruple into singlet- and triplet-like
    linear combinations (weights 2/sqrt(12), 1/sqrt(12) and +-1/2), the form
    of the original adaptive-ansatz fermionic pool.  Index overlaps produce
    number-weighted excitations, which are kept.
    """
    _check_sizes(n_electrons, n_qubits)
    n_so = n_qubits // 2
    w2, w1 = 2.0 / math.sqrt(12.0), 1.0 / math.sqrt(12.0)
    pool: list[PoolOperator] = []

    def ladder(ops, coeff=1.0):
        return FermionOperator.ladder(tuple(ops), n_qubits, coeff)

    def arrange(f: FermionOperator) -> PauliSum:
        return jordan_wigner(f - f.hermitian_conjugate())

    for p in range(n_so):
        for q in range(p, n_so):
            f = ladder([(2 * p, True), (2 * q, False)]) + ladder(
                [(2 * p + 1, True), (2 * q + 1, False)]
            )
            gen = arrange(f)
            if gen:
                _dedup_add(pool, PoolOperator("fermionic", (p, q), [gen], f"F[{p}<->{q}]"))

    pq = -1
    for p in range(n_so):
        for q in range(p, n_so):
            pq += 1
            rs = -1
            for r in range(n_so):
                for s in range(r, n_so):
                    rs += 1
                    if pq > rs:
                        continue
                    pa, pb, qa, qb = 2 * p, 2 * p + 1, 2 * q, 2 * q + 1
                    ra, rb, sa, sb = 2 * r, 2 * r + 1, 2 * s, 2 * s + 1
                    singlet = (
                        ladder([(ra, True), (pa, False), (sa, True), (qa, False)], w2)
                        + ladder([(rb, True), (pb, False), (sb, True), (qb, False)], w2)
                        + ladder([(ra, True), (pa, False), (sb, True), (qb, False)], w1)
                        + ladder([(rb, True), (pb, False), (sa, True), (qa, False)], w1)
                        + ladder([(ra, True), (pb, False), (sb, True), (qa, False)], w1)
                        + ladder([(rb, True), (pa, False), (sa, True), (qb, False)], w1)
                    )
                    triplet = (
                        ladder([(ra, True), (pa, False), (sb, True), (qb, False)], 0.5)
                        + ladder([(rb, True), (pb, False), (sa, True), (qa, False)], 0.5)
                        + ladder([(ra, True), (pb, False), (sb, True), (qa, False)], -0.5)
                        + ladder([(rb, True), (pa, False), (sa, True), (qb, False)], -0.5)
                    )
                    for name, f in (("s", singlet), ("t", triplet)):
                        gen = arrange(f)
                        if gen:
                            label = f"F{name}[{p}{q}|{r}{s}]"
                            support = tuple(sorted({p, q, r, s}))
                            _dedup_add(pool, PoolOperator("fermionic", support, [gen], label))
    return pool


def build_qubit_pool(n_electrons: int, n_qubits: int) -> list[PoolOperator]:
    """Individual S_z-compatible Pauli strings with Z chains removed."""
    _check_sizes(n_electrons, n_qubits)
    pool: list[PoolOperator] = []

    def add(positions: tuple[int, ...], axes: str):
        letters = ["I"] * n_qubits
        for pos, ax in zip(positions, axes):
            letters[pos] = ax
        term = "".join(letters)
        gen = PauliSum(n_qubits, [(term, 1j)])
        _dedup_add(pool, PoolOperator("qubit", positions, [gen], f"Q[{term}]"))

    for p, q in _same_spin_pairs(n_qubits):
        add((p, q), "YX")
        add((p, q), "XY")
    for quad in itertools.combinations(range(n_qubits), 4):
        if sum(_spin(i) for i in quad) % 2 != 0:
            continue
        for axes in ("YXXX", "XYXX", "XXYX", "XXXY", "XYYY", "YXYY", "YYXY", "YYYX"):
            add(quad, axes)
    return pool


def _qe_generator(creation, annihilation, n_qubits: int) -> PauliSum:
    return _strip_z(jordan_wigner(excitation_generator(creation, annihilation, n_qubits)))


def build_qe_pool(n_electrons: int, n_qubits: int) -> list[PoolOperator]:
    """Generalized single and double qubit excitations (Z strings removed)."""
    _check_sizes(n_electrons, n_qubits)
    pool: list[PoolOperator] = []
    for p, q in _same_spin_pairs(n_qubits):
        gen = _qe_generator((p,), (q,), n_qubits)
        if gen:
            _dedup_add(
                pool, PoolOperator("qubit_excitation", (p, q), [gen], f"QE[{p}->{q}]")
            )
    for quad in itertools.combinations(range(n_qubits), 4):
        for (pair_a, pair_b) in _quadruple_pairings(*quad):
            for creation, annihilation in (pair_a, pair_b):
                gen = _qe_generator(creation, annihilation, n_qubits)
                if gen:
                    label = f"QE[{list(annihilation)}->{list(creation)}]"
                    _dedup_add(pool, PoolOperator("qubit_excitation", quad, [gen], label))
    return pool


def build_ceo_pool(n_electrons: int, n_qubits: int) -> list[PoolOperator]:
    """Coupled exchange operators plus their qubit-excitation parents.

    Per orbital quadruple and pairing case this emits the one-parameter sum
    (``ceo_ovp_plus``) and difference (``ceo_ovp_minus``) of the two double
    qubit excitations, and the two-parameter pair itself (``ceo_mvp``).
    Single qubit excitations join unchanged, as they have no partner to
    combine with.
    """
    _check_sizes(n_electrons, n_qubits)
    pool: list[PoolOperator] = []
    for p, q in _same_spin_pairs(n_qubits):
        gen = _qe_generator((p,), (q,), n_qubits)
        if gen:
            _dedup_add(
                pool, PoolOperator("qubit_excitation", (p, q), [gen], f"QE[{p}->{q}]")
            )
    for quad in itertools.combinations(range(n_qubits), 4):
        parents: list[PauliSum] = []
        tag = f"{list(quad)}"
        for (pair_a, pair_b) in _quadruple_pairings(*quad):
            gen_a = _qe_generator(*pair_a, n_qubits)
            gen_b = _qe_generator(*pair_b, n_qubits)
            if not gen_a or not gen_b:
                continue
            for gen in (gen_a, gen_b):
                if not any(gen.equals_up_to_sign(p) for p in parents):
                    parents.append(gen)
            _dedup_add(
                pool,
                PoolOperator("ceo_ovp_plus", quad, [gen_a + gen_b], f"OVP+{tag}"),
            )
            _dedup_add(
                pool,
                PoolOperator("ceo_ovp_minus", quad, [gen_a - gen_b], f"OVP-{tag}"),
            )
        if parents:
            # one multi-parameter operator per quadruple; its generators are
            # the distinct parent qubit excitations (two of them, except for
            # same-spin quadruples which carry three)
            _dedup_add(pool, PoolOperator("ceo_mvp", quad, parents, f"MVP{tag}"))
    return pool


_BUILDERS = {
    "fermionic": build_fermionic_pool,
    "qubit": build_qubit_pool,
    "qubit_excitation": build_qe_pool,
    "ceo": build_ceo_pool,
}


def build_pool(kind: str, n_electrons: int, n_qubits: int) -> list[PoolOperator]:
    if kind not in _BUILDERS:
        raise ValueError(f"unknown pool kind {kind!r}; choose from {POOL_KINDS}")
    return _BUILDERS[kind](n_electrons, n_qubits)
