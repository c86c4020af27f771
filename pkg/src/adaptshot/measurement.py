"""Measurement cliques, shot allocation, reuse mapping, and counting reports.

Observables are measured by partitioning their Pauli terms into
qubit-wise-commuting (QWC) cliques that share a per-qubit eigenbasis, probing
each clique to estimate its standard deviation, and splitting the shot budget
by one of three strategies:

* ``uniform``  - equal split of the budget over cliques
* ``vmsa``     - probe-proportional split that spends the whole budget
* ``vpsr``     - probe-proportional split scaled by eta <= 1, spending less

A reuse cache carries bitstring histograms from the most recent energy
measurement; any clique whose support axes are compatible with a cached
record's basis is evaluated from the cache at zero shot cost.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .pauli import PauliSum, identity_term, qubit_wise_commutes
from .statevector import NO_NOISE, NoiseSpec, Statevector, sample_in_basis

DEFAULT_PROBE_SHOTS = 32


@dataclass
class MeasurementClique:
    """A QWC group: members share the per-qubit eigenbasis ``basis``.

    ``basis`` resolves free qubits (identity in every member) to Z so it can
    be used directly as a measurement setting; ``support`` keeps those slots
    as I for coverage tests.
    """

    clique_id: int
    members: list[tuple[str, complex]]
    basis: str
    support: str

    @property
    def weight(self) -> float:
        return sum(abs(c) for _, c in self.members)

    def __len__(self) -> int:
        return len(self.members)


@dataclass
class MeasurementRecord:
    clique_id: int
    basis: str
    histogram: dict[str, int]
    shots: int
    state_tag: int

    def __post_init__(self):
        if sum(self.histogram.values()) != self.shots:
            raise ValueError("histogram counts do not sum to shots")

    def merged_with(self, other: "MeasurementRecord") -> "MeasurementRecord":
        if other.basis != self.basis or other.state_tag != self.state_tag:
            raise ValueError("cannot merge records from different bases or states")
        hist = dict(self.histogram)
        for k, v in other.histogram.items():
            hist[k] = hist.get(k, 0) + v
        return MeasurementRecord(
            self.clique_id, self.basis, hist, self.shots + other.shots, self.state_tag
        )


@dataclass
class AllocationPlan:
    method: str
    total_budget: int
    probe_shots: int
    shots_per_clique: list[int]
    sigmas: list[float] | None = None
    eta: float | None = None
    delta: float | None = None

    @property
    def total_assigned(self) -> int:
        return int(sum(self.shots_per_clique))


def _merge_support(support: str, term: str) -> str:
    return "".join(t if s == "I" else s for s, t in zip(support, term))


def group_qwc(obs: PauliSum) -> list[MeasurementClique]:
    """Greedy QWC partition of a Pauli sum, identity term excluded.

    Terms are visited by descending coefficient magnitude (ties broken by
    canonical string order); each joins the first clique with which it is
    qubit-wise commuting, otherwise it opens a new clique.
    """
    ident = identity_term(obs.n_qubits)
    ordered = sorted(
        ((t, c) for t, c in obs.terms() if t != ident),
        key=lambda tc: (-abs(tc[1]), tc[0]),
    )
    supports: list[str] = []
    groups: list[list[tuple[str, complex]]] = []
    for term, coeff in ordered:
        for i, support in enumerate(supports):
            if qubit_wise_commutes(term, support):
                groups[i].append((term, coeff))
                supports[i] = _merge_support(support, term)
                break
        else:
            groups.append([(term, coeff)])
            supports.append(term)
    return [
        MeasurementClique(i, members, supports[i].replace("I", "Z"), supports[i])
        for i, (members) in enumerate(groups)
    ]


def term_eigenvalues(term: str, bitstrings: list[str]) -> np.ndarray:
    """Eigenvalue of a Pauli term on each bitstring measured in its own basis."""
    positions = [q for q, ax in enumerate(term) if ax != "I"]
    out = np.empty(len(bitstrings))
    for i, bits in enumerate(bitstrings):
        parity = sum(1 for q in positions if bits[q] == "1") % 2
        out[i] = -1.0 if parity else 1.0
    return out


def estimate_clique(record: MeasurementRecord, clique: MeasurementClique):
    """Sample mean, unbiased sample variance, and per-term means for a clique.

    Each shot contributes ``e_s = sum_members coeff * eigenvalue(term, s)``;
    the variance is the unbiased variance of the e_s (zero for a single shot).
    """
    if record.basis != clique.basis:
        raise ValueError(f"basis mismatch: record {record.basis}, clique {clique.basis}")
    if record.shots < 1:
        raise ValueError("record holds zero shots")
    bitstrings = list(record.histogram)
    counts = np.array([record.histogram[b] for b in bitstrings], dtype=float)
    shots = counts.sum()
    values = np.zeros(len(bitstrings))
    term_means: dict[str, float] = {}
    for term, coeff in clique.members:
        eigs = term_eigenvalues(term, bitstrings)
        term_means[term] = float((counts @ eigs) / shots)
        values += coeff.real * eigs
    mean = float((counts @ values) / shots)
    if shots > 1:
        variance = float((counts @ (values - mean) ** 2) / (shots - 1.0))
    else:
        variance = 0.0
    return mean, variance, term_means


def evaluate_term_from_record(term: str, record: MeasurementRecord) -> float:
    """Sample mean of one Pauli term from a histogram whose basis covers it."""
    if not covers(record.basis, term):
        raise ValueError(f"record basis {record.basis} does not cover term {term}")
    bitstrings = list(record.histogram)
    counts = np.array([record.histogram[b] for b in bitstrings], dtype=float)
    eigs = term_eigenvalues(term, bitstrings)
    return float((counts @ eigs) / counts.sum())


def covers(basis: str, term_or_support: str) -> bool:
    """True if measuring ``basis`` determines the eigenvalue of the term.

    Every non-identity axis of the term must equal the measured axis at that
    position.
    """
    return all(t == "I" or t == b for b, t in zip(basis, term_or_support))


def allocate(
    method: str,
    total_budget: int,
    probe_shots: int,
    sigmas,
    sizes=None,
    eta_form: str = "corrected",
    delta: float | None = None,
) -> AllocationPlan:
    """Split a shot budget over cliques.

    ``uniform`` ignores the probe data; ``vmsa`` assigns
    ``N_i = N0 + (sigma_i / sum sigma)(N - N0 m)`` and distributes rounding
    remainders so the total equals the budget exactly; ``vpsr`` multiplies the
    proportional part by eta and never exceeds the budget.  ``eta_form``
    selects the corrected expression ``(sum sigma)^2 / (m sum sigma^2)``
    (default) or the literal printed one ``sum sigma^2 / (m sum sigma^2)``,
    which collapses to 1/m.  ``delta``, the target variance, is carried in the
    plan for reporting; the closed-form allocation does not consume it.
    """
    sigmas = [float(s) for s in sigmas]
    m = len(sigmas)
    if m == 0:
        raise ValueError("no cliques to allocate over")
    if total_budget < 0:
        raise ValueError("negative shot budget")
    if method == "uniform":
        base = total_budget // m
        shots = [base] * m
        order = _remainder_order(sizes if sizes is not None else [1] * m)
        for i in range(total_budget - base * m):
            shots[order[i % m]] += 1
        return AllocationPlan("uniform", total_budget, 0, shots)

    if method not in ("vmsa", "vpsr"):
        raise ValueError(f"unknown allocation method {method!r}")
    if probe_shots * m + m > total_budget:
        raise ValueError(
            f"budget {total_budget} cannot cover the probe cost {probe_shots}*{m} "
            f"plus one estimating shot per clique"
        )
    remaining = total_budget - probe_shots * m
    total_sigma = sum(sigmas)
    if total_sigma <= 0.0:
        # all cliques probed as deterministic: uniform fallback
        plan = allocate("uniform", total_budget, 0, sigmas, sizes)
        return AllocationPlan(method, total_budget, probe_shots, plan.shots_per_clique,
                              sigmas, 1.0 if method == "vpsr" else None, delta)

    if method == "vmsa":
        raw = [probe_shots + s / total_sigma * remaining for s in sigmas]
        shots = [int(math.floor(x)) for x in raw]
        order = _remainder_order(sigmas)
        i = 0
        while sum(shots) < total_budget:
            shots[order[i % m]] += 1
            i += 1
        shots = _ensure_fresh_shot(shots, probe_shots, rebalance_to=total_budget)
        return AllocationPlan("vmsa", total_budget, probe_shots, shots, sigmas, None, delta)

    sq = sum(s * s for s in sigmas)
    if eta_form == "corrected":
        eta = total_sigma**2 / (m * sq)
    elif eta_form == "printed":
        eta = sq / (m * sq)
    else:
        raise ValueError(f"unknown eta_form {eta_form!r}")
    shots = [int(math.floor(probe_shots + eta * s / total_sigma * remaining)) for s in sigmas]
    shots = _ensure_fresh_shot(shots, probe_shots, rebalance_to=None, cap=total_budget)
    return AllocationPlan("vpsr", total_budget, probe_shots, shots, sigmas, eta, delta)


def _ensure_fresh_shot(shots, probe_shots, rebalance_to=None, cap=None):
    """Guarantee at least one post-probe shot per clique.

    Estimates are formed from post-probe shots only (the probe would bias
    them through the allocation it chose), so zero-sigma cliques are bumped
    from N0 to N0+1.  ``rebalance_to`` keeps the total pinned to the budget by
    trimming the largest entries; ``cap`` only trims if the total exceeds it.
    """
    floor = probe_shots + 1
    shots = [max(s, floor) for s in shots]
    target = rebalance_to if rebalance_to is not None else None
    if target is not None:
        while sum(shots) > target:
            i = max(range(len(shots)), key=lambda k: shots[k])
            if shots[i] <= floor:
                break
            shots[i] -= 1
    elif cap is not None:
        while sum(shots) > cap:
            i = max(range(len(shots)), key=lambda k: shots[k])
            if shots[i] <= floor:
                break
            shots[i] -= 1
    return shots


def _remainder_order(keys) -> list[int]:
    return sorted(range(len(keys)), key=lambda i: (-keys[i], i))


class ReuseCache:
    """Histograms from the latest energy measurement, keyed by basis."""

    def __init__(self, state_tag: int = -1):
        self.state_tag = state_tag
        self.records: dict[str, MeasurementRecord] = {}

    def store(self, state_tag: int, records) -> None:
        if state_tag != self.state_tag:
            self.state_tag = state_tag
            self.records = {}
        for rec in records:
            old = self.records.get(rec.basis)
            if old is not None and old.state_tag == state_tag:
                rec = old.merged_with(rec)
            self.records[rec.basis] = rec

    def lookup(self, support: str, state_tag: int) -> MeasurementRecord | None:
        if state_tag != self.state_tag:
            return None
        for basis, rec in self.records.items():
            if covers(basis, support):
                return rec
        return None


@dataclass
class MeasureResult:
    value: float
    plan: AllocationPlan | None
    records: list[MeasurementRecord]
    shots_spent: int
    shots_saved: int
    term_means: dict[str, float] = field(default_factory=dict)


def measure_observable(
    state,
    cliques: list[MeasurementClique],
    method: str,
    total_budget: int,
    probe_shots: int = DEFAULT_PROBE_SHOTS,
    noise: NoiseSpec = NO_NOISE,
    rng=None,
    reuse_cache: ReuseCache | None = None,
    constant: float = 0.0,
    state_tag: int = 0,
    eta_form: str = "corrected",
) -> MeasureResult:
    """Measure a grouped observable under a shot budget.

    ``state`` is either a Statevector or a zero-argument callable returning
    one; a callable is invoked per sampling batch, so each batch sees a fresh
    stochastic noise trajectory.  The budget is interpreted as ``per-clique
    share x number of cliques``.  Cliques covered by the reuse cache for this
    state tag cost nothing and their budget share is reported as
    ``shots_saved``.  The remaining cliques are probed with ``probe_shots``
    each (vmsa/vpsr), the rest of their budget is allocated by ``method``, and
    per-term sample means are assembled from probe and main histograms
    together.
    """
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    make_state = state if callable(state) else (lambda: state)
    m_total = len(cliques)
    if m_total == 0:
        return MeasureResult(constant, None, [], 0, 0)

    cached: list[tuple[MeasurementClique, MeasurementRecord]] = []
    fresh: list[MeasurementClique] = []
    for clique in cliques:
        rec = reuse_cache.lookup(clique.support, state_tag) if reuse_cache else None
        if rec is not None:
            cached.append((clique, rec))
        else:
            fresh.append(clique)

    share = total_budget / m_total
    budget_fresh = int(round(share * len(fresh)))
    shots_saved = total_budget - budget_fresh

    value = constant
    term_means: dict[str, float] = {}
    records: list[MeasurementRecord] = []
    plan = None
    shots_spent = 0

    for clique, rec in cached:
        mean, _, means = estimate_clique(
            MeasurementRecord(clique.clique_id, clique.basis, rec.histogram, rec.shots, rec.state_tag),
            clique,
        )
        value += mean
        term_means.update(means)

    if fresh:
        if method == "uniform":
            plan = allocate("uniform", budget_fresh, 0, [0.0] * len(fresh),
                            sizes=[len(c) for c in fresh])
            probe_cost = [0] * len(fresh)
        else:
            sigmas = []
            for clique in fresh:
                hist = sample_in_basis(make_state(), clique.basis, probe_shots, noise, rng)
                rec = MeasurementRecord(clique.clique_id, clique.basis, hist, probe_shots, state_tag)
                _, var, _ = estimate_clique(rec, clique)
                # a quiet probe cannot certify a deviation below the clique
                # weight over the probe size; flooring prevents starving a
                # heavy clique on the strength of N0 lucky shots
                sigmas.append(max(math.sqrt(var), clique.weight / probe_shots))
            plan = allocate(method, budget_fresh, probe_shots, sigmas,
                            sizes=[len(c) for c in fresh], eta_form=eta_form)
            probe_cost = [probe_shots] * len(fresh)

        # estimates use only post-probe shots: the probe picked the
        # allocation, and folding it back in would bias the sample means
        for clique, n_i, spent_probe in zip(fresh, plan.shots_per_clique, probe_cost):
            fresh_shots = n_i - spent_probe
            shots_spent += spent_probe
            if fresh_shots <= 0:
                continue
            hist = sample_in_basis(make_state(), clique.basis, fresh_shots, noise, rng)
            rec = MeasurementRecord(clique.clique_id, clique.basis, hist, fresh_shots, state_tag)
            mean, _, means = estimate_clique(rec, clique)
            value += mean
            term_means.update(means)
            records.append(rec)
            shots_spent += fresh_shots

    return MeasureResult(value, plan, records, shots_spent, shots_saved, term_means)


# -- static counting reports -------------------------------------------------


def gradient_terms_per_operator(hamiltonian: PauliSum, pool) -> list[list[PauliSum]]:
    """[H, A] per pool operator, one entry per generator (parameter slot)."""
    from .pauli import commutator

    return [
        [commutator(hamiltonian, gen) for gen in op.generators] for op in pool
    ]


def build_reuse_map(
    h_cliques: list[MeasurementClique], gradient_terms
) -> dict[str, int | None]:
    """Map each gradient Pauli string to a covering Hamiltonian clique, if any."""
    mapping: dict[str, int | None] = {}
    for term in gradient_terms:
        mapping[term] = None
        for clique in h_cliques:
            if covers(clique.basis, term):
                mapping[term] = clique.clique_id
                break
    return mapping


@dataclass
class CountReport:
    molecule: str
    n_qubits: int
    h_terms: int
    pool_kind: str
    full: int
    grouped: int
    reused: int

    @property
    def grouped_fraction(self) -> float:
        return self.grouped / self.full if self.full else 0.0

    @property
    def reused_fraction(self) -> float:
        return self.reused / self.full if self.full else 0.0


def count_report(ham_file, pool, pool_kind: str) -> CountReport:
    """Pauli-counting comparison of naive, grouped, and reused gradient measurement.

    ``full`` counts one measurement setting per commutator term, summed per
    operator with no cross-operator deduplication (the naive protocol).
    ``grouped`` is the QWC clique count over the union of gradient terms (the
    single-pass grouped protocol the runtime uses).  ``reused`` counts the
    settings still required per operator once Hamiltonian measurements are
    recycled: terms covered by a Hamiltonian clique basis cost nothing, and
    the remaining terms of each operator are QWC-grouped into fresh settings.
    """
    observable = ham_file.observable
    h_cliques = group_qwc(observable)
    per_op = gradient_terms_per_operator(observable, pool)

    full = 0
    union: dict[str, float] = {}
    for op_terms in per_op:
        for grad in op_terms:
            full += len(grad)
            for term, coeff in grad.terms():
                union[term] = union.get(term, 0.0) + abs(coeff)

    union_sum = PauliSum(observable.n_qubits, union)
    grouped = len(group_qwc(union_sum))

    reuse = build_reuse_map(h_cliques, list(union))
    reused = 0
    for op_terms in per_op:
        for grad in op_terms:
            leftover = PauliSum(
                observable.n_qubits,
                {t: c for t, c in grad.terms() if reuse[t] is None},
            )
            reused += len(group_qwc(leftover))

    return CountReport(
        molecule=ham_file.molecule,
        n_qubits=observable.n_qubits,
        h_terms=ham_file.n_terms,
        pool_kind=pool_kind,
        full=full,
        grouped=grouped,
        reused=reused,
    )
