"""Phase-separating Hamiltonians and the Pauli-term text formats that feed them.

Two concrete operator kinds cover every benchmark: a real diagonal (classical
pseudo-Boolean objectives compiled per basis state) and a dense Hermitian
matrix (molecular problems ingested from Pauli-term files).  Both expose the
same three operations the optimizer loop needs: phase evolution, expectation,
and the real diagonal used to rank basis states.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from .statevector import n_qubits_of

_PAULI_1Q = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "Y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}

HERMITICITY_TOL = 1e-10


class PauliFormatError(ValueError):
    """Raised for malformed Pauli-term files; carries the offending line number."""


def pauli_string_matrix(pauli: str) -> np.ndarray:
    """Tensor product of single-qubit Paulis; leftmost letter acts on qubit 1 (MSB)."""
    if not pauli or any(ch not in _PAULI_1Q for ch in pauli):
        raise ValueError(f"invalid Pauli string {pauli!r}")
    mat = _PAULI_1Q[pauli[0]]
    for ch in pauli[1:]:
        mat = np.kron(mat, _PAULI_1Q[ch])
    return mat


class DiagonalHamiltonian:
    """Objective values per basis state, acting as a diagonal operator."""

    def __init__(self, values):
        values = np.asarray(values, dtype=float)
        if values.ndim != 1 or values.shape[0] & (values.shape[0] - 1):
            raise ValueError("diagonal must be a flat vector of length 2**n")
        if not np.all(np.isfinite(values)):
            raise ValueError("diagonal entries must be finite")
        self.values = values
        self.n_qubits = int(values.shape[0]).bit_length() - 1

    @property
    def diagonal(self) -> np.ndarray:
        return self.values

    def apply_phase(self, state: np.ndarray, gamma: float) -> np.ndarray:
        if state.shape != self.values.shape:
            raise ValueError("state dimension does not match Hamiltonian")
        return state * np.exp(-1j * gamma * self.values)

    def expectation(self, state: np.ndarray) -> float:
        if state.shape != self.values.shape:
            raise ValueError("state dimension does not match Hamiltonian")
        return float(np.real(np.vdot(state, self.values * state)))


class DenseHamiltonian:
    """Hermitian matrix operator with a cached eigendecomposition.

    The eigendecomposition is computed once at construction (2**n <= 1024 so
    this is cheap) and reused for every phase evolution.
    """

    def __init__(self, matrix):
        matrix = np.asarray(matrix, dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValueError("Hamiltonian matrix must be square")
        dim = matrix.shape[0]
        if dim & (dim - 1):
            raise ValueError("Hamiltonian dimension must be 2**n")
        if np.max(np.abs(matrix - matrix.conj().T)) >= HERMITICITY_TOL:
            raise ValueError("matrix is not Hermitian")
        self.matrix = matrix
        self.n_qubits = int(dim).bit_length() - 1
        self.eigenvalues, self.eigenvectors = np.linalg.eigh(matrix)

    @property
    def diagonal(self) -> np.ndarray:
        return np.real(np.diag(self.matrix))

    def apply_phase(self, state: np.ndarray, gamma: float) -> np.ndarray:
        if state.shape[0] != self.matrix.shape[0]:
            raise ValueError("state dimension does not match Hamiltonian")
        v = self.eigenvectors
        return v @ (np.exp(-1j * gamma * self.eigenvalues) * (v.conj().T @ state))

    def expectation(self, state: np.ndarray) -> float:
        if state.shape[0] != self.matrix.shape[0]:
            raise ValueError("state dimension does not match Hamiltonian")
        return float(np.real(np.vdot(state, self.matrix @ state)))


def from_pauli_terms(terms: list[tuple[float, str]]) -> DenseHamiltonian:
    """Sum of coefficient * Pauli-string tensor products as a dense operator."""
    if not terms:
        raise ValueError("empty term list gives the zero operator, which has no spectrum to optimize")
    n = len(terms[0][1])
    if any(len(p) != n for _, p in terms):
        raise ValueError("all Pauli strings must have the same length")
    dim = 2**n
    mat = np.zeros((dim, dim), dtype=complex)
    for coeff, pauli in terms:
        mat += coeff * pauli_string_matrix(pauli)
    return DenseHamiltonian(mat)


_TERM_RE = re.compile(r"^([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s+([IXYZ]+)$")


def _parse_term_line(line: str, lineno: int) -> tuple[float, str]:
    m = _TERM_RE.match(line)
    if m is None:
        raise PauliFormatError(f"line {lineno}: expected '<real coefficient> <pauli string>', got {line!r}")
    return float(m.group(1)), m.group(2)


def parse_pauli_terms(text: str) -> list[tuple[float, str]]:
    """Parse '<coeff> <pauli>' lines; '#' comments and blank lines are ignored."""
    terms = []
    length = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        coeff, pauli = _parse_term_line(line, lineno)
        if length is None:
            length = len(pauli)
        elif len(pauli) != length:
            raise PauliFormatError(f"line {lineno}: Pauli string length {len(pauli)} != {length}")
        terms.append((coeff, pauli))
    return terms


def load_pauli_hamiltonian(path) -> DenseHamiltonian:
    """Read a Pauli-term file and assemble the dense Hermitian operator."""
    with open(path, "r", encoding="utf-8") as fh:
        terms = parse_pauli_terms(fh.read())
    if not terms:
        raise PauliFormatError(f"{path}: no Pauli terms found")
    return from_pauli_terms(terms)


@dataclass
class PauliCoefficientGrid:
    """Pauli-term coefficients tabulated on a grid of a scalar parameter.

    Used for Hamiltonian families H(L) = sum_k c_k(L) P_k; coefficients are
    linearly interpolated between grid points.
    """

    n_qubits: int
    grid: np.ndarray  # sorted parameter values
    paulis: list[str]  # one entry per term
    coefficients: np.ndarray  # shape (len(grid), len(paulis))
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.grid.ndim != 1 or self.coefficients.shape != (self.grid.size, len(self.paulis)):
            raise ValueError("coefficient table shape does not match grid and term list")
        if np.any(np.diff(self.grid) <= 0):
            raise ValueError("grid values must be strictly increasing")

    @property
    def bounds(self) -> tuple[float, float]:
        return float(self.grid[0]), float(self.grid[-1])

    def terms_at(self, value: float) -> list[tuple[float, str]]:
        lo, hi = self.bounds
        if not lo <= value <= hi:
            raise ValueError(f"parameter {value} outside tabulated range [{lo}, {hi}]")
        coeffs = [float(np.interp(value, self.grid, self.coefficients[:, k])) for k in range(len(self.paulis))]
        return list(zip(coeffs, self.paulis))

    def hamiltonian_at(self, value: float) -> DenseHamiltonian:
        key = round(float(value), 12)
        if key not in self._cache:
            self._cache[key] = from_pauli_terms(self.terms_at(value))
        return self._cache[key]


def load_coefficient_grid(path) -> PauliCoefficientGrid:
    """Read a coefficient-grid file.

    Format: a header line ``n_qubits=<int>``, then repeated blocks of a
    ``L=<float>`` line followed by '<coeff> <pauli>' term lines.  Comments
    ('#') and blank lines are ignored.  Term sets may differ between blocks;
    missing terms get coefficient zero.
    """
    blocks: dict[float, dict[str, float]] = {}
    n_qubits = None
    current: dict[str, float] | None = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("n_qubits="):
                n_qubits = int(line.split("=", 1)[1])
                continue
            if line.startswith("L="):
                value = float(line.split("=", 1)[1])
                current = blocks.setdefault(value, {})
                continue
            if current is None:
                raise PauliFormatError(f"line {lineno}: term line before any 'L=' block header")
            coeff, pauli = _parse_term_line(line, lineno)
            current[pauli] = current.get(pauli, 0.0) + coeff
    if n_qubits is None:
        raise PauliFormatError(f"{path}: missing 'n_qubits=' header")
    if not blocks:
        raise PauliFormatError(f"{path}: no coefficient blocks found")
    paulis = sorted({p for block in blocks.values() for p in block})
    if any(len(p) != n_qubits for p in paulis):
        raise PauliFormatError(f"{path}: Pauli string length inconsistent with n_qubits={n_qubits}")
    grid = np.array(sorted(blocks), dtype=float)
    coefficients = np.array([[blocks[g].get(p, 0.0) for p in paulis] for g in grid])
    return PauliCoefficientGrid(n_qubits=n_qubits, grid=grid, paulis=paulis, coefficients=coefficients)


def expectation(state: np.ndarray, hamiltonian) -> float:
    """<state| H |state> for either Hamiltonian kind."""
    n_qubits_of(state)
    return hamiltonian.expectation(state)
