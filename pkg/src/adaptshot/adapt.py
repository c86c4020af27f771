"""The adaptive ansatz-growth loop with shot-frugal gradient screening.

Each iteration screens the energy gradient of every pool operator at zero
parameter, g_k = <psi|[H, A_k]|psi>, appends the operator with the largest
magnitude (subject to the decision-via-gradient rule for the CEO pool),
re-optimizes all parameters with BFGS, and stores the final energy-measurement
histograms so the next screening can evaluate covered gradient terms at zero
shot cost.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import minimize

from .hamiltonian import HamiltonianFile
from .measurement import (
    DEFAULT_PROBE_SHOTS,
    MeasurementClique,
    MeasureResult,
    ReuseCache,
    covers,
    group_qwc,
    measure_observable,
)
from .pauli import PauliSum, commutator
from .pools import PoolOperator, build_pool
from .statevector import (
    NO_NOISE,
    NoiseSpec,
    Statevector,
    apply_operator_noise,
    apply_state_prep_noise,
    evolve,
    expectation_exact,
)


@dataclass
class AdaptConfig:
    epsilon: float = 1e-3
    max_iterations: int = 15
    mode: str = "exact"  # "exact" | "shots"
    allocation: str = "uniform"  # "uniform" | "vmsa" | "vpsr"
    shot_budget: int | None = None  # total budget for the energy observable
    shots_per_clique: int = 1024  # per-clique budget when shot_budget is None
    probe_shots: int = DEFAULT_PROBE_SHOTS
    noise: NoiseSpec = NO_NOISE
    seed: int = 0
    reuse: bool = True
    eta_form: str = "corrected"
    # minimum |g| (in units of epsilon) on both one-parameter variants before
    # the multi-parameter CEO is instantiated instead
    dvg_mvp_factor: float = 10.0
    fd_step_exact: float = 1e-4
    fd_step_shots: float = math.pi / 8.0
    vqe_gtol: float = 1e-8
    vqe_max_iterations: int = 100

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if self.mode not in ("exact", "shots"):
            raise ValueError(f"unknown mode {self.mode!r}")


@dataclass
class AnsatzState:
    """Ordered selected operators with their parameter slots."""

    n_qubits: int
    reference_bits: str
    operators: list[PoolOperator] = field(default_factory=list)
    theta: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def n_parameters(self) -> int:
        return int(sum(op.n_parameters for op in self.operators))

    def slots(self) -> list[tuple[int, int]]:
        out, start = [], 0
        for op in self.operators:
            out.append((start, start + op.n_parameters))
            start += op.n_parameters
        return out

    def extended(self, op: PoolOperator) -> "AnsatzState":
        return AnsatzState(
            self.n_qubits,
            self.reference_bits,
            self.operators + [op],
            np.concatenate([self.theta, np.zeros(op.n_parameters)]),
        )

    def prepare(
        self,
        theta: np.ndarray | None = None,
        noise: NoiseSpec = NO_NOISE,
        rng=None,
    ) -> Statevector:
        values = self.theta if theta is None else np.asarray(theta, dtype=float)
        if values.shape[0] != self.n_parameters:
            raise ValueError("theta length does not match ansatz parameters")
        state = Statevector.from_bitstring(self.reference_bits)
        state = apply_state_prep_noise(state, noise, rng)
        for op, (a, b) in zip(self.operators, self.slots()):
            state = evolve(state, op, values[a:b])
            state = apply_operator_noise(state, noise, rng)
        return state


@dataclass
class GradientReport:
    gradients: list[list[float]]  # per operator, one entry per parameter
    scores: list[float]  # max |g| per operator
    norm: float  # Frobenius norm over all parameter gradients
    selected: int | None
    shots_spent: int = 0
    shots_saved: int = 0

    def best(self) -> tuple[int, float]:
        return self.selected, self.scores[self.selected]


@dataclass
class IterationRecord:
    iteration: int
    energy: float
    error: float
    gradient_norm: float
    selected_label: str
    vqe_shots: int
    gradient_shots: int
    shots_saved: int
    cumulative_shots: int
    warning: str = ""


@dataclass
class RunTrace:
    molecule: str
    pool_kind: str
    config: AdaptConfig
    records: list[IterationRecord] = field(default_factory=list)
    final_energy: float = math.nan
    fci_energy: float = math.nan
    terminated_at: int | None = None
    ansatz_labels: list[str] = field(default_factory=list)

    @property
    def total_shots(self) -> int:
        return self.records[-1].cumulative_shots if self.records else 0


class GradientScreen:
    """Precomputed commutator observables and their measurement layout."""

    def __init__(self, hamiltonian: PauliSum, pool: list[PoolOperator]):
        self.pool = pool
        self.observables: list[list[PauliSum]] = [
            [commutator(hamiltonian, gen) for gen in op.generators] for op in pool
        ]
        self.h_cliques = group_qwc(hamiltonian)

        union: dict[str, float] = {}
        for per_gen in self.observables:
            for grad in per_gen:
                for term, coeff in grad.terms():
                    union[term] = union.get(term, 0.0) + abs(coeff)

        # covered terms ride along with the Hamiltonian cliques; the rest are
        # grouped once into fresh cliques, fixed for the whole run
        covered: dict[int, list[tuple[str, complex]]] = {}
        uncovered: dict[str, float] = {}
        for term, weight in union.items():
            for cl in self.h_cliques:
                if covers(cl.basis, term):
                    covered.setdefault(cl.clique_id, []).append((term, weight))
                    break
            else:
                uncovered[term] = weight

        fresh = group_qwc(PauliSum(hamiltonian.n_qubits, uncovered))
        virtual = [
            MeasurementClique(len(fresh) + i, members, self.h_cliques[cid].basis,
                              self.h_cliques[cid].support)
            for i, (cid, members) in enumerate(sorted(covered.items()))
        ]
        self.cliques = fresh + virtual
        self.n_virtual = len(virtual)

    def exact(self, state: Statevector) -> list[list[float]]:
        return [
            [expectation_exact(state, grad) for grad in per_gen]
            for per_gen in self.observables
        ]

    def from_term_means(self, means: dict[str, float]) -> list[list[float]]:
        out = []
        for per_gen in self.observables:
            gs = []
            for grad in per_gen:
                g = 0.0
                for term, coeff in grad.terms():
                    g += coeff.real * means[term]
                gs.append(g)
            out.append(gs)
        return out


def _report_from_gradients(
    gradients: list[list[float]],
    pool: list[PoolOperator],
    config: AdaptConfig,
    shots_spent: int = 0,
    shots_saved: int = 0,
) -> GradientReport:
    scores = [max(abs(g) for g in gs) for gs in gradients]
    norm = math.sqrt(sum(g * g for gs in gradients for g in gs))
    selected = None
    if norm > config.epsilon:
        selected = _select_index(scores, pool, config)
    return GradientReport(gradients, scores, norm, selected, shots_spent, shots_saved)


def _select_index(scores, pool, config: AdaptConfig) -> int:
    """Largest-magnitude selection; the CEO pool goes through the DVG rule."""
    is_ceo = any(op.kind.startswith("ceo") for op in pool)
    if not is_ceo:
        return int(max(range(len(scores)), key=lambda i: (scores[i], -i)))

    candidates = [i for i, op in enumerate(pool) if op.kind != "ceo_mvp"]
    winner = max(candidates, key=lambda i: (scores[i], -i))
    if not pool[winner].kind.startswith("ceo_ovp"):
        return winner
    quad = pool[winner].indices
    ovp_scores = [
        scores[i]
        for i, op in enumerate(pool)
        if op.indices == quad and op.kind.startswith("ceo_ovp")
    ]
    threshold = config.dvg_mvp_factor * config.epsilon
    if len(ovp_scores) >= 2 and all(s > threshold for s in ovp_scores):
        for i, op in enumerate(pool):
            if op.kind == "ceo_mvp" and op.indices == quad:
                return i
    return winner


def compute_gradients(
    state_or_factory,
    screen: GradientScreen,
    config: AdaptConfig,
    rng=None,
    reuse_cache: ReuseCache | None = None,
    state_tag: int = 0,
) -> GradientReport:
    """Screen all pool gradients, in one exact pass or one measurement pass.

    The gradient budget scales with the gradient clique count at the same
    per-clique share as the energy observable.
    """
    if config.mode == "exact":
        state = state_or_factory() if callable(state_or_factory) else state_or_factory
        return _report_from_gradients(screen.exact(state), screen.pool, config)

    if config.shot_budget is not None and screen.h_cliques:
        share = config.shot_budget / len(screen.h_cliques)
    else:
        share = config.shots_per_clique
    budget = int(round(share * len(screen.cliques)))
    result = measure_observable(
        state_or_factory,
        screen.cliques,
        config.allocation,
        budget,
        probe_shots=config.probe_shots,
        noise=config.noise,
        rng=rng,
        reuse_cache=reuse_cache if config.reuse else None,
        state_tag=state_tag,
        eta_form=config.eta_form,
    )
    gradients = screen.from_term_means(result.term_means)
    return _report_from_gradients(
        gradients, screen.pool, config, result.shots_spent, result.shots_saved
    )


@dataclass
class VQEResult:
    energy: float
    theta: np.ndarray
    shots_spent: int
    energy_trace: list[float]
    records: list
    warning: str = ""


def vqe_optimize(
    ansatz: AnsatzState,
    hamiltonian: HamiltonianFile,
    config: AdaptConfig,
    rng=None,
    h_cliques: list[MeasurementClique] | None = None,
    state_tag: int = 0,
) -> VQEResult:
    """BFGS over the ansatz parameters with central-difference gradients.

    In shots mode every energy evaluation is a fresh allocated measurement;
    the optimizer is capped and the best-seen point is returned if BFGS fails
    to converge.  A final measurement at the optimum supplies the reported
    energy and the histograms for the reuse cache.
    """
    exact = config.mode == "exact"
    constant = hamiltonian.observable.identity_coefficient.real
    if h_cliques is None:
        h_cliques = group_qwc(hamiltonian.observable)
    budget = (
        config.shot_budget
        if config.shot_budget is not None
        else config.shots_per_clique * len(h_cliques)
    )
    shots_used = 0
    trace: list[float] = []
    noiseless_cache: dict = {}

    def prepare(theta):
        if exact or not config.noise.enabled:
            key = tuple(np.round(theta, 15))
            if key not in noiseless_cache:
                if len(noiseless_cache) > 4096:
                    noiseless_cache.clear()
                noiseless_cache[key] = ansatz.prepare(theta)
            return noiseless_cache[key]
        return ansatz.prepare(theta, config.noise, rng)

    def energy(theta) -> float:
        nonlocal shots_used
        if exact:
            value = expectation_exact(prepare(theta), hamiltonian.observable)
        else:
            result = measure_observable(
                lambda: prepare(theta),
                h_cliques,
                config.allocation,
                budget,
                probe_shots=config.probe_shots,
                noise=config.noise,
                rng=rng,
                constant=constant,
                state_tag=state_tag,
                eta_form=config.eta_form,
            )
            shots_used += result.shots_spent
            value = result.value
        trace.append(value)
        return value

    best = {"f": math.inf, "x": ansatz.theta.copy()}

    def tracked(theta):
        value = energy(theta)
        if value < best["f"]:
            best["f"] = value
            best["x"] = np.array(theta, dtype=float)
        return value

    step = config.fd_step_exact if exact else config.fd_step_shots

    def jac(theta):
        grad = np.zeros_like(theta)
        for i in range(len(theta)):
            up = np.array(theta, dtype=float)
            dn = np.array(theta, dtype=float)
            up[i] += step
            dn[i] -= step
            grad[i] = (energy(up) - energy(dn)) / (2.0 * step)
        return grad

    warning = ""
    if ansatz.n_parameters == 0:
        final_energy = energy(ansatz.theta)
        theta_opt = ansatz.theta
    else:
        options = {"gtol": config.vqe_gtol if exact else 1e-5}
        options["maxiter"] = 1000 if exact else config.vqe_max_iterations
        result = minimize(
            tracked, ansatz.theta, jac=jac, method="BFGS", options=options
        )
        theta_opt = result.x
        if not result.success:
            if best["f"] < result.fun:
                theta_opt = best["x"]
            warning = f"optimizer stopped early: {result.message}"
        final_energy = energy(theta_opt)

    records = []
    if not exact:
        # measure once more at the optimum; these histograms seed the cache
        result = measure_observable(
            lambda: prepare(theta_opt),
            h_cliques,
            config.allocation,
            budget,
            probe_shots=config.probe_shots,
            noise=config.noise,
            rng=rng,
            constant=constant,
            state_tag=state_tag,
            eta_form=config.eta_form,
        )
        shots_used += result.shots_spent
        final_energy = result.value
        records = result.records

    return VQEResult(final_energy, np.asarray(theta_opt, dtype=float), shots_used, trace, records, warning)


def run_adapt(
    hamiltonian: HamiltonianFile,
    pool_kind: str,
    config: AdaptConfig,
    pool: list[PoolOperator] | None = None,
) -> RunTrace:
    """Full adaptive loop (gradient screen, select, grow, optimize, reuse)."""
    rng = np.random.default_rng(config.seed)
    if pool is None:
        pool = build_pool(pool_kind, hamiltonian.n_electrons, hamiltonian.n_qubits)
    screen = GradientScreen(hamiltonian.observable, pool)
    h_cliques = screen.h_cliques
    cache = ReuseCache()
    trace = RunTrace(hamiltonian.molecule, pool_kind, config, fci_energy=hamiltonian.fci_energy)
    ansatz = AnsatzState(hamiltonian.n_qubits, hamiltonian.hf_bitstring)
    cumulative = 0
    exact = config.mode == "exact"
    constant = hamiltonian.observable.identity_coefficient.real
    budget = (
        config.shot_budget
        if config.shot_budget is not None
        else config.shots_per_clique * len(h_cliques)
    )

    # reference-state energy; in shots mode it seeds the reuse cache
    if exact:
        energy = expectation_exact(ansatz.prepare(), hamiltonian.observable)
        e0_shots = 0
    else:
        result = measure_observable(
            lambda: ansatz.prepare(None, config.noise, rng),
            h_cliques,
            config.allocation,
            budget,
            probe_shots=config.probe_shots,
            noise=config.noise,
            rng=rng,
            constant=constant,
            state_tag=0,
            eta_form=config.eta_form,
        )
        energy = result.value
        e0_shots = result.shots_spent
        cache.store(0, result.records)
    cumulative += e0_shots
    trace.records.append(
        IterationRecord(0, energy, abs(energy - hamiltonian.fci_energy), math.nan,
                        "", e0_shots, 0, 0, cumulative)
    )

    theta = np.zeros(0)
    for n in range(1, config.max_iterations + 1):
        ansatz = replace(ansatz, theta=theta)
        if exact:
            state_for_screen = ansatz.prepare()
        else:
            state_for_screen = lambda: ansatz.prepare(None, config.noise, rng)
        report = compute_gradients(
            state_for_screen, screen, config, rng=rng,
            reuse_cache=cache, state_tag=n - 1,
        )
        cumulative += report.shots_spent
        if report.selected is None:
            trace.terminated_at = n
            break

        op = pool[report.selected]
        ansatz = ansatz.extended(op)
        vqe = vqe_optimize(ansatz, hamiltonian, config, rng=rng,
                           h_cliques=h_cliques, state_tag=n)
        theta = vqe.theta
        ansatz = replace(ansatz, theta=theta)
        if not exact:
            cache.store(n, vqe.records)
        cumulative += vqe.shots_spent
        energy = vqe.energy
        trace.records.append(
            IterationRecord(
                n, energy, abs(energy - hamiltonian.fci_energy), report.norm,
                op.label, vqe.shots_spent, report.shots_spent,
                report.shots_saved, cumulative, vqe.warning,
            )
        )
        trace.ansatz_labels.append(op.label)

    trace.final_energy = energy
    return trace
