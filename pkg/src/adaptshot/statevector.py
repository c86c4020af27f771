"""Dense statevector simulation.

Amplitude layout puts qubit 0 in the most significant bit: the basis state
``|b_0 b_1 ... b_{n-1}>`` lives at index ``int("b_0...b_{n-1}", 2)``, matching
the rendering of occupation bitstrings elsewhere in the package.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .pauli import PauliSum

_SQRT2 = np.sqrt(2.0)

# Single-qubit rotations taking the measurement axis into the computational basis.
_HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / _SQRT2
_H_SDG = _HADAMARD @ np.array([[1.0, 0.0], [0.0, -1.0j]], dtype=complex)


@dataclass(frozen=True)
class NoiseSpec:
    """Stochastic error model: each listed channel fires with probability p.

    Channels: ``gate`` (random non-identity Pauli per qubit after each pool
    operator), ``phase`` (Z per qubit after each pool operator), ``reset``
    (collapse qubit to |0> at state preparation), ``measurement`` (classical
    bit flip per measured bit).
    """

    p: float = 0.0
    channels: frozenset[str] = field(
        default_factory=lambda: frozenset({"gate", "reset", "phase", "measurement"})
    )

    _ALLOWED = frozenset({"gate", "reset", "phase", "measurement"})

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"noise probability must lie in [0, 1], got {self.p}")
        bad = set(self.channels) - self._ALLOWED
        if bad:
            raise ValueError(f"unknown noise channels: {sorted(bad)}")

    @property
    def enabled(self) -> bool:
        return self.p > 0.0 and bool(self.channels)

    def has(self, channel: str) -> bool:
        return self.p > 0.0 and channel in self.channels


NO_NOISE = NoiseSpec(p=0.0)


@dataclass
class Statevector:
    amplitudes: np.ndarray
    n_qubits: int

    @classmethod
    def zero_state(cls, n_qubits: int) -> "Statevector":
        amp = np.zeros(2**n_qubits, dtype=complex)
        amp[0] = 1.0
        return cls(amp, n_qubits)

    @classmethod
    def from_bitstring(cls, bits: str) -> "Statevector":
        n = len(bits)
        if set(bits) - {"0", "1"}:
            raise ValueError(f"not a bitstring: {bits!r}")
        amp = np.zeros(2**n, dtype=complex)
        amp[int(bits, 2)] = 1.0
        return cls(amp, n)

    def copy(self) -> "Statevector":
        return Statevector(self.amplitudes.copy(), self.n_qubits)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def renormalize(self) -> None:
        self.amplitudes /= self.norm()


def _masks(term: str, n: int) -> tuple[int, int, int]:
    """Bit masks (flip, y, z) for a Pauli string under MSB-first layout."""
    flip = y = z = 0
    for q, axis in enumerate(term):
        bit = 1 << (n - 1 - q)
        if axis in ("X", "Y"):
            flip |= bit
        if axis == "Y":
            y |= bit
        if axis == "Z":
            z |= bit
    return flip, y, z


def _parity(values: np.ndarray) -> np.ndarray:
    """Parity of the set bits of each entry (int64 array in, 0/1 out)."""
    v = values.copy()
    shift = 32
    while shift:
        v ^= v >> shift
        shift //= 2
    return (v & 1).astype(np.int64)


def apply_pauli(state: Statevector, term: str, coeff: complex = 1.0) -> np.ndarray:
    """Return ``coeff * P |psi>`` as a raw amplitude array."""
    n = state.n_qubits
    if len(term) != n:
        raise ValueError(f"qubit mismatch: term acts on {len(term)}, state has {n}")
    flip, ymask, zmask = _masks(term, n)
    idx = np.arange(2**n, dtype=np.int64)
    src = idx ^ flip
    # P|x> = i^{n_Y} (-1)^{popcount(x & (Y|Z))} |x ^ flip>, so amplitude at x
    # comes from src = x ^ flip with the phase evaluated at src.
    n_y = bin(ymask).count("1")
    signs = 1.0 - 2.0 * _parity(src & (ymask | zmask))
    out = (1j**n_y) * coeff * signs * state.amplitudes[src]
    return out


def expectation_exact(state: Statevector, obs: PauliSum) -> float:
    """<psi| obs |psi>, exact to floating point; asserts a small imaginary residue."""
    if obs.n_qubits != state.n_qubits:
        raise ValueError(
            f"qubit mismatch: observable on {obs.n_qubits}, state on {state.n_qubits}"
        )
    psi = state.amplitudes
    total = 0j
    for term, coeff in obs.terms():
        total += np.vdot(psi, apply_pauli(state, term, coeff))
    if abs(total.imag) > 1e-8:
        raise ValueError(f"expectation has imaginary residue {total.imag:.3e}")
    return float(total.real)


def dense_matrix(obs: PauliSum) -> np.ndarray:
    """Dense matrix of a Pauli sum (kron over single-qubit factors)."""
    dim = 2**obs.n_qubits
    mat = np.zeros((dim, dim), dtype=complex)
    eye2 = np.eye(2, dtype=complex)
    for term, coeff in obs.terms():
        factor = np.array([[coeff]])
        for axis in term:
            factor = np.kron(factor, _PAULI_1Q[axis] if axis != "I" else eye2)
        mat += factor
    return mat


def _generator_eig(op, index: int):
    """Cached eigendecomposition of -i * generator (Hermitian)."""
    cache = getattr(op, "_eig_cache", None)
    if cache is None:
        cache = {}
        op._eig_cache = cache
    if index not in cache:
        herm = -1j * dense_matrix(op.generators[index])
        cache[index] = np.linalg.eigh(herm)
    return cache[index]


def evolve(state: Statevector, op, theta) -> Statevector:
    """Apply exp(theta · G) for each generator of a pool operator.

    When a generator's terms mutually commute (coefficients ``i a_j`` purely
    imaginary on terms P_j), the exponential factorizes exactly into
    ``prod_j [cos(theta a_j) I + sin(theta a_j) (i P_j)]``; otherwise an exact
    dense exponential via eigendecomposition is used.  Multi-parameter
    operators consume one theta entry per generator, applied in listed order.
    """
    thetas = np.atleast_1d(np.asarray(theta, dtype=float))
    if thetas.shape[0] != op.n_parameters:
        raise ValueError(
            f"operator expects {op.n_parameters} parameter(s), got {thetas.shape[0]}"
        )
    out = state.copy()
    for index, (angle, gen) in enumerate(zip(thetas, op.generators)):
        if gen.n_qubits != state.n_qubits:
            raise ValueError("generator qubit count does not match state")
        if getattr(op, "factorizable", [True] * op.n_parameters)[index]:
            for term, coeff in gen.terms():
                a = coeff.imag  # coeff = i*a with a real
                psi_rot = np.cos(angle * a) * out.amplitudes + np.sin(angle * a) * (
                    1j * apply_pauli(out, term)
                )
                out.amplitudes = psi_rot
        else:
            w, v = _generator_eig(op, index)
            phases = np.exp(1j * angle * w)
            out.amplitudes = v @ (phases * (v.conj().T @ out.amplitudes))
    return out


def _apply_single_qubit_gate(amp: np.ndarray, gate: np.ndarray, qubit: int, n: int) -> np.ndarray:
    shaped = amp.reshape(2**qubit, 2, 2 ** (n - qubit - 1))
    return np.einsum("ab,ibj->iaj", gate, shaped).reshape(amp.shape)


_ROTATION_CACHE: dict[str, np.ndarray | None] = {}


def _rotation_matrix(basis: str) -> np.ndarray | None:
    """Full-register rotation for a measurement basis (None if no-op)."""
    cached = _ROTATION_CACHE.get(basis)
    if cached is None and basis not in _ROTATION_CACHE:
        if set(basis) <= {"Z", "I"}:
            mat = None
        else:
            mat = np.array([[1.0 + 0j]])
            eye2 = np.eye(2, dtype=complex)
            for axis in basis:
                if axis in ("Z", "I"):
                    factor = eye2
                elif axis == "X":
                    factor = _HADAMARD
                elif axis == "Y":
                    factor = _H_SDG
                else:
                    raise ValueError(f"invalid measurement axis {axis!r}")
                mat = np.kron(mat, factor)
        if len(_ROTATION_CACHE) > 4096:
            _ROTATION_CACHE.clear()
        _ROTATION_CACHE[basis] = mat
        return mat
    return cached


def rotate_to_basis(state: Statevector, basis: str) -> Statevector:
    """Rotate so that measuring Z per qubit realizes the requested axes.

    X uses a Hadamard, Y uses H·S†, Z and I need no rotation.
    """
    if len(basis) != state.n_qubits:
        raise ValueError("basis length must equal qubit count")
    if state.n_qubits <= 8:
        mat = _rotation_matrix(basis)
        if mat is None:
            return Statevector(state.amplitudes, state.n_qubits)
        return Statevector(mat @ state.amplitudes, state.n_qubits)
    amp = state.amplitudes
    for q, axis in enumerate(basis):
        if axis in ("Z", "I"):
            continue
        if axis == "X":
            amp = _apply_single_qubit_gate(amp, _HADAMARD, q, state.n_qubits)
        elif axis == "Y":
            amp = _apply_single_qubit_gate(amp, _H_SDG, q, state.n_qubits)
        else:
            raise ValueError(f"invalid measurement axis {axis!r}")
    return Statevector(amp, state.n_qubits)


def _as_rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def sample_in_basis(
    state: Statevector,
    basis: str,
    shots: int,
    noise: NoiseSpec = NO_NOISE,
    rng=None,
) -> dict[str, int]:
    """Sample ``shots`` bitstrings in the given per-qubit basis.

    Returns a histogram mapping bitstrings (qubit 0 leftmost) to counts.
    Measurement-flip noise is applied per shot and per bit.  Deterministic
    for a fixed rng seed.
    """
    if shots < 0:
        raise ValueError("shots must be nonnegative")
    if shots == 0:
        return {}
    gen = _as_rng(rng)
    rotated = rotate_to_basis(state, basis)
    probs = np.abs(rotated.amplitudes) ** 2
    probs = probs / probs.sum()
    n = state.n_qubits
    counts = gen.multinomial(shots, probs)
    hist: dict[str, int] = {}
    if noise.has("measurement"):
        outcomes = np.repeat(np.arange(len(probs)), counts)
        flips = gen.random((shots, n)) < noise.p
        flip_mask = np.zeros(shots, dtype=np.int64)
        for q in range(n):
            flip_mask |= flips[:, q].astype(np.int64) << (n - 1 - q)
        outcomes = outcomes ^ flip_mask
        values, freq = np.unique(outcomes, return_counts=True)
        for v, f in zip(values, freq):
            hist[format(int(v), f"0{n}b")] = int(f)
    else:
        for index in np.nonzero(counts)[0]:
            hist[format(int(index), f"0{n}b")] = int(counts[index])
    return hist


def apply_state_prep_noise(state: Statevector, noise: NoiseSpec, rng) -> Statevector:
    """Reset errors: with probability p per qubit, force that qubit to |0>.

    On a pure-state trajectory a reset measures the qubit (Born rule), keeps
    the sampled branch, and maps it to |0>.
    """
    if not noise.has("reset"):
        return state
    gen = _as_rng(rng)
    out = state.copy()
    n = state.n_qubits
    for q in range(n):
        if gen.random() >= noise.p:
            continue
        shaped = out.amplitudes.reshape(2**q, 2, 2 ** (n - q - 1)).copy()
        p_one = float(np.sum(np.abs(shaped[:, 1, :]) ** 2))
        if gen.random() < p_one:
            shaped[:, 0, :] = shaped[:, 1, :]
        shaped[:, 1, :] = 0.0
        amp = shaped.reshape(-1)
        out.amplitudes = amp / np.linalg.norm(amp)
    return out


_PAULI_1Q = {
    "X": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "Y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}


def apply_operator_noise(state: Statevector, noise: NoiseSpec, rng) -> Statevector:
    """Gate and phase errors attached to one pool-operator application."""
    if not (noise.has("gate") or noise.has("phase")):
        return state
    gen = _as_rng(rng)
    out = state
    n = state.n_qubits
    for q in range(n):
        if noise.has("gate") and gen.random() < noise.p:
            pauli = ("X", "Y", "Z")[gen.integers(3)]
            out = Statevector(
                _apply_single_qubit_gate(out.amplitudes, _PAULI_1Q[pauli], q, n), n
            )
        if noise.has("phase") and gen.random() < noise.p:
            out = Statevector(
                _apply_single_qubit_gate(out.amplitudes, _PAULI_1Q["Z"], q, n), n
            )
    return out
