"""Exact statevector simulation of the small qubit registers used by the optimizers.

A state is a complex numpy vector of length 2**n (n <= 10).  Basis index z
corresponds to the bitstring q1..qn read most-significant-bit first, i.e.
qubit 1 is the leftmost bit of z.  All operators here are unitary; global
phases are kept as-is and never normalized away.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

MAX_QUBITS = 10


def n_qubits_of(state: np.ndarray) -> int:
    """Number of qubits of a statevector, validating the length is a power of two."""
    dim = state.shape[0]
    n = int(dim).bit_length() - 1
    if dim != 2**n or not 1 <= n <= MAX_QUBITS:
        raise ValueError(f"statevector length {dim} is not 2**n with 1 <= n <= {MAX_QUBITS}")
    return n


def uniform_superposition(n_qubits: int) -> np.ndarray:
    """All basis states with equal real amplitude 2**(-n/2)."""
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise ValueError(f"n_qubits must be in [1, {MAX_QUBITS}], got {n_qubits}")
    dim = 2**n_qubits
    return np.full(dim, 2.0 ** (-n_qubits / 2.0), dtype=complex)


def basis_state(n_qubits: int, z: int) -> np.ndarray:
    """The computational basis state |z>."""
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise ValueError(f"n_qubits must be in [1, {MAX_QUBITS}], got {n_qubits}")
    if not 0 <= z < 2**n_qubits:
        raise ValueError(f"basis index {z} out of range for {n_qubits} qubits")
    state = np.zeros(2**n_qubits, dtype=complex)
    state[z] = 1.0
    return state


def bits_of(z: int, n_qubits: int) -> tuple[int, ...]:
    """Bit values (q1, ..., qn) of basis index z, q1 = most significant bit."""
    return tuple((z >> (n_qubits - 1 - k)) & 1 for k in range(n_qubits))


def index_of(bits) -> int:
    """Basis index of a bit tuple (inverse of :func:`bits_of`)."""
    z = 0
    for b in bits:
        z = (z << 1) | int(b)
    return z


def apply_diagonal_phase(state: np.ndarray, values: np.ndarray, gamma: float) -> np.ndarray:
    """Multiply amplitude z by exp(-i * gamma * values[z])."""
    if values.shape != state.shape:
        raise ValueError(f"diagonal length {values.shape[0]} != state length {state.shape[0]}")
    return state * np.exp(-1j * gamma * np.asarray(values))


def apply_x_mixer(state: np.ndarray, beta: float) -> np.ndarray:
    """Apply exp(-i * beta * sum_i X_i), i.e. one Rx(2*beta) per qubit."""
    n = n_qubits_of(state)
    c, s = np.cos(beta), np.sin(beta)
    rx = np.array([[c, -1j * s], [-1j * s, c]])
    psi = state.reshape([2] * n)
    for axis in range(n):
        psi = np.moveaxis(np.tensordot(rx, psi, axes=([1], [axis])), 0, axis)
    return np.ascontiguousarray(psi).reshape(-1)


def xy_ring_hamiltonian(n_qubits: int) -> np.ndarray:
    """Dense matrix of 0.5 * sum_i (X_i X_{i+1} + Y_i Y_{i+1}) with cyclic indices.

    The sum runs over all n cyclic pairs as written, so for n = 2 the single
    edge is counted twice.
    """
    if n_qubits < 2:
        raise ValueError("XY ring needs at least 2 qubits")
    x = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
    y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
    eye = np.eye(2, dtype=complex)
    dim = 2**n_qubits
    ham = np.zeros((dim, dim), dtype=complex)
    for i in range(n_qubits):
        j = (i + 1) % n_qubits
        for pauli in (x, y):
            factors = [eye] * n_qubits
            factors[i] = pauli
            factors[j] = pauli
            term = factors[0]
            for f in factors[1:]:
                term = np.kron(term, f)
            ham += 0.5 * term
    return ham


@functools.lru_cache(maxsize=None)
def _xy_ring_eig(n_qubits: int) -> tuple[np.ndarray, np.ndarray]:
    vals, vecs = np.linalg.eigh(xy_ring_hamiltonian(n_qubits))
    return vals, vecs


def apply_xy_mixer(state: np.ndarray, beta: float) -> np.ndarray:
    """Apply exp(-i * beta * B) for the cyclic XY ring Hamiltonian B.

    Computed through a cached eigendecomposition of the dense 2**n matrix.
    B conserves Hamming weight, so amplitude never leaks between weight
    sectors.
    """
    n = n_qubits_of(state)
    if n < 2:
        raise ValueError("XY mixer needs at least 2 qubits")
    vals, vecs = _xy_ring_eig(n)
    return vecs @ (np.exp(-1j * beta * vals) * (vecs.conj().T @ state))


def apply_grover_mixer(state: np.ndarray, target_set, theta: float) -> np.ndarray:
    """Phase the target basis states by exp(i*theta), then reflect about the mean.

    The phase step multiplies each amplitude in ``target_set`` by exp(i*theta)
    and leaves the rest untouched.  The reflection is I - 2|s><s| with |s> the
    uniform state, applied as an O(2**n) vector update.  An empty target set
    reduces the phase step to the identity; the reflection always applies.
    """
    n = n_qubits_of(state)
    dim = state.shape[0]
    targets = np.fromiter(target_set, dtype=np.int64) if not isinstance(target_set, np.ndarray) else target_set.astype(np.int64)
    if targets.size and (targets.min() < 0 or targets.max() >= dim):
        raise ValueError(f"target index out of range for {n} qubits")
    psi = state.copy()
    if targets.size:
        psi[targets] *= np.exp(1j * theta)
    return psi - 2.0 * psi.mean()


@dataclass(frozen=True)
class MeasurementHistogram:
    """Counts of measured basis indices over a fixed number of shots."""

    counts: dict[int, int]
    shots: int

    def __post_init__(self):
        if self.shots < 1:
            raise ValueError("shots must be >= 1")
        if sum(self.counts.values()) != self.shots:
            raise ValueError("histogram counts do not sum to shots")

    def most_frequent(self) -> int:
        """Most frequently measured basis index; ties break toward the smaller index."""
        return min(self.counts, key=lambda z: (-self.counts[z], z))

    def frequencies(self) -> tuple[np.ndarray, np.ndarray]:
        """Sorted basis indices and their empirical probabilities."""
        zs = np.array(sorted(self.counts), dtype=np.int64)
        ps = np.array([self.counts[int(z)] for z in zs], dtype=float) / self.shots
        return zs, ps


def sample_counts(state: np.ndarray, shots: int, seed) -> MeasurementHistogram:
    """Draw ``shots`` basis-state measurements from |amplitude|^2, seeded.

    ``seed`` may be anything accepted by ``numpy.random.default_rng``,
    including an existing Generator.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    n_qubits_of(state)
    rng = np.random.default_rng(seed)
    probs = np.abs(state) ** 2
    probs /= probs.sum()  # guard against 1e-16 scale norm drift
    draws = rng.multinomial(shots, probs)
    counts = {int(z): int(c) for z, c in enumerate(draws) if c > 0}
    return MeasurementHistogram(counts=counts, shots=shots)


def state_probabilities(state: np.ndarray) -> np.ndarray:
    return np.abs(state) ** 2
