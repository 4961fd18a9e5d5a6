"""The benchmark objectives: graph cuts, a folding energy polynomial, a molecular
potential-energy surface, and three mixed-integer engineering designs.

Every objective is expressed over binary variables q1..qn (q1 is the most
significant bit of the basis index) plus an optional vector of continuous
variables.  ``evaluate`` implementations use plain Python arithmetic on the
inputs so exact-arithmetic and symbolic test oracles can pass through them.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from importlib import resources
from typing import Callable, Sequence

import numpy as np

from .hamiltonians import DenseHamiltonian, DiagonalHamiltonian, load_coefficient_grid
from .statevector import MAX_QUBITS, bits_of

MINIMIZE = "minimize"
MAXIMIZE = "maximize"


def better(a: float, b: float, sense: str) -> bool:
    """True when objective value ``a`` improves on ``b`` under the given sense."""
    return a < b if sense == MINIMIZE else a > b


def worst_value(sense: str) -> float:
    """Sentinel that every finite objective value improves on."""
    return math.inf if sense == MINIMIZE else -math.inf


@dataclass(frozen=True)
class ObjectiveSpec:
    """A pseudo-Boolean or mixed-integer objective with optional constraints.

    ``evaluate(q, x_c)`` maps a bit sequence and a continuous vector to the
    objective value.  Constraints follow the same signature and are feasible
    at or below zero; ``penalty_value`` replaces the acquisition value at
    infeasible points.  Problems whose phase operator is not diagonal supply
    ``dense_compiler`` instead of being compiled from ``evaluate``.
    """

    name: str
    n_binary: int
    sense: str
    evaluate: Callable[[Sequence[int], Sequence[float]], float]
    continuous_bounds: tuple[tuple[float, float], ...] = ()
    constraints: tuple[Callable[[Sequence[int] | None, Sequence[float]], float], ...] = ()
    penalty_value: float | None = None
    dense_compiler: Callable[[Sequence[float]], DenseHamiltonian] | None = None

    def __post_init__(self):
        if not 1 <= self.n_binary <= MAX_QUBITS:
            raise ValueError(f"n_binary must be in [1, {MAX_QUBITS}]")
        if self.sense not in (MINIMIZE, MAXIMIZE):
            raise ValueError(f"sense must be '{MINIMIZE}' or '{MAXIMIZE}'")
        for lo, hi in self.continuous_bounds:
            if not lo < hi:
                raise ValueError(f"continuous bound ({lo}, {hi}) is empty")

    @property
    def is_classical(self) -> bool:
        return self.dense_compiler is None

    def check_continuous(self, x_c: Sequence[float]) -> None:
        if len(x_c) != len(self.continuous_bounds):
            raise ValueError(f"{self.name}: expected {len(self.continuous_bounds)} continuous variables, got {len(x_c)}")
        for value, (lo, hi) in zip(x_c, self.continuous_bounds):
            if not lo <= value <= hi:
                raise ValueError(f"{self.name}: continuous value {value} outside [{lo}, {hi}]")

    def is_feasible(self, q, x_c) -> bool:
        return all(g(q, x_c) <= 0 for g in self.constraints)


@dataclass(frozen=True)
class WeightedGraph:
    """Undirected graph with real edge weights."""

    n_vertices: int
    edges: tuple[tuple[int, int, float], ...]

    def __post_init__(self):
        seen = set()
        for i, j, w in self.edges:
            if i == j:
                raise ValueError(f"self-loop on vertex {i}")
            if not (0 <= i < self.n_vertices and 0 <= j < self.n_vertices):
                raise ValueError(f"edge ({i}, {j}) out of range")
            if not math.isfinite(w):
                raise ValueError(f"edge ({i}, {j}) has non-finite weight")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise ValueError(f"duplicate edge ({i}, {j})")
            seen.add(key)


def complete_graph(n_vertices: int, weight: float = 1.0) -> WeightedGraph:
    edges = tuple((i, j, weight) for i in range(n_vertices) for j in range(i + 1, n_vertices))
    return WeightedGraph(n_vertices=n_vertices, edges=edges)


def random_weighted_k5(seed: int) -> WeightedGraph:
    """Complete 5-vertex graph with weights drawn uniformly from [0.1, 10.0]."""
    rng = np.random.default_rng(seed)
    edges = tuple(
        (i, j, float(rng.uniform(0.1, 10.0))) for i in range(5) for j in range(i + 1, 5)
    )
    return WeightedGraph(n_vertices=5, edges=edges)


def maxcut(graph: WeightedGraph, weighted: bool = True) -> ObjectiveSpec:
    """Cut value sum_{(i,j)} W_ij (q_i + q_j - 2 q_i q_j), maximized.

    With ``weighted=False`` every edge counts 1 regardless of stored weights.
    """
    edges = tuple((i, j, w if weighted else 1.0) for i, j, w in graph.edges)

    def evaluate(q, x_c=()):
        return sum(w * (q[i] + q[j] - 2 * q[i] * q[j]) for i, j, w in edges)

    kind = "wmaxcut" if weighted else "maxcut"
    return ObjectiveSpec(
        name=f"{kind}-n{graph.n_vertices}",
        n_binary=graph.n_vertices,
        sense=MAXIMIZE,
        evaluate=evaluate,
    )


# Folding energy of the six undetermined direction bits of the PSVKMA chain
# on a 2D lattice: (coefficient, 1-based variable indices) per monomial.
LATTICE_PROTEIN_TERMS: tuple[tuple[int, tuple[int, ...]], ...] = (
    (-1, (1,)), (15, (1, 2)), (4, (2, 3)), (-6, (1, 2, 3)), (4, (1, 4)),
    (-15, (1, 2, 4)), (15, (3, 4)), (-6, (1, 3, 4)), (-15, (2, 3, 4)),
    (28, (1, 2, 3, 4)), (-4, (2, 5)), (2, (1, 2, 5)), (2, (2, 3, 5)),
    (4, (1, 2, 3, 5)), (7, (4, 5)), (7, (5, 6)), (2, (1, 4, 5)),
    (4, (2, 4, 5)), (9, (1, 2, 4, 5)), (-20, (3, 4, 5)), (4, (1, 3, 4, 5)),
    (9, (2, 3, 4, 5)), (-37, (1, 2, 3, 4, 5)), (-4, (1, 6)), (4, (1, 2, 6)),
    (7, (3, 6)), (2, (1, 3, 6)), (4, (2, 3, 6)), (9, (1, 2, 3, 6)),
    (4, (1, 4, 6)), (-18, (3, 4, 6)), (9, (1, 3, 4, 6)), (-33, (1, 2, 3, 4, 6)),
    (2, (1, 5, 6)), (4, (2, 5, 6)), (-20, (3, 5, 6)), (9, (1, 2, 5, 6)),
    (4, (1, 3, 5, 6)), (9, (2, 3, 5, 6)), (-37, (1, 2, 3, 5, 6)),
    (-18, (4, 5, 6)), (9, (1, 4, 5, 6)), (-33, (1, 2, 4, 5, 6)),
    (53, (3, 4, 5, 6)), (-37, (1, 3, 4, 5, 6)), (-33, (2, 3, 4, 5, 6)),
    (99, (1, 2, 3, 4, 5, 6)),
)


def lattice_protein() -> ObjectiveSpec:
    """Six-bit lattice protein folding energy, minimized (global minimum -6)."""
    terms = tuple((c, tuple(i - 1 for i in idx)) for c, idx in LATTICE_PROTEIN_TERMS)

    def evaluate(q, x_c=()):
        total = 0
        for coeff, idx in terms:
            prod = coeff
            for i in idx:
                prod = prod * q[i]
            total = total + prod
        return total

    return ObjectiveSpec(name="lattice-protein", n_binary=6, sense=MINIMIZE, evaluate=evaluate)


def _selector(q, pattern) -> float:
    """Product of q_i (pattern bit 1) or 1 - q_i (pattern bit 0) factors."""
    out = 1
    for qi, bit in zip(q, pattern):
        out = out * (qi if bit else (1 - qi))
    return out


# Welded beam: cost-per-volume constants (C1, C2) per bulk material type
# 1=steel, 2=cast iron, 3=aluminum, 4=brass.
WELDED_BEAM_MATERIALS = {
    1: (0.1047, 0.0481),
    2: (0.0489, 0.0224),
    3: (0.5235, 0.2405),
    4: (0.5584, 0.2566),
}
WELDED_BEAM_LENGTH = 14.0


def welded_beam_cost(w, m, h, l, t, b):
    """Beam cost for weld type w (0 two-sided, 1 four-sided) and material m."""
    c1, c2 = WELDED_BEAM_MATERIALS[m]
    return (1 + c1) * (w * t + l) * h**2 + c2 * t * b * (WELDED_BEAM_LENGTH + l)


def welded_beam() -> ObjectiveSpec:
    """Welded beam design: 3 bits select (weld type, material), x_c = (h, l, t, b).

    The continuous variables are weld thickness, weld length, beam width and
    beam thickness in inches.  Feasibility requires b >= h (buckling load).
    """
    patterns = [(b1, b2, b3) for b1 in (0, 1) for b2 in (0, 1) for b3 in (0, 1)]

    def decode(pattern):
        return pattern[0], 1 + 2 * pattern[1] + pattern[2]

    def evaluate(q, x_c):
        h, l, t, b = x_c[0], x_c[1], x_c[2], x_c[3]
        total = 0
        for pattern in patterns:
            w, m = decode(pattern)
            total = total + _selector(q, pattern) * welded_beam_cost(w, m, h, l, t, b)
        return total

    return ObjectiveSpec(
        name="welded-beam",
        n_binary=3,
        sense=MINIMIZE,
        evaluate=evaluate,
        continuous_bounds=((0.0625, 2.0), (0.1, 10.0), (2.0, 20.0), (0.0625, 2.0)),
        constraints=(lambda q, x_c: x_c[0] - x_c[3],),
        penalty_value=-100_000.0,
    )


def speed_reducer_weight(x1, x2, x3, x4, x5, x6, x7):
    """Speed reducer weight as a polynomial of the seven design variables."""
    return (
        0.7854 * x1 * x2**2 * (3.3333 * x3**2 + 14.9334 * x3 - 43.0934)
        - 1.508 * x1 * (x6**2 + x7**2)
        + 7.4777 * (x6**3 + x7**3)
        + 0.7854 * (x4 * x6**2 + x5 * x7**2)
    )


def speed_reducer() -> ObjectiveSpec:
    """Speed reducer design: 4 bits select the tooth count x3 in {15, ..., 30}.

    x_c = (x1, x2, x4, x5, x6, x7); the source problem's constraints are
    dropped, so the spec carries none.
    """
    patterns = [tuple(bits_of(k, 4)) for k in range(16)]

    def evaluate(q, x_c):
        x1, x2, x4, x5, x6, x7 = x_c[0], x_c[1], x_c[2], x_c[3], x_c[4], x_c[5]
        total = 0
        for k, pattern in enumerate(patterns):
            total = total + _selector(q, pattern) * speed_reducer_weight(x1, x2, 15 + k, x4, x5, x6, x7)
        return total

    return ObjectiveSpec(
        name="speed-reducer",
        n_binary=4,
        sense=MINIMIZE,
        evaluate=evaluate,
        continuous_bounds=((2.6, 3.6), (0.7, 0.8), (7.3, 8.3), (7.8, 8.3), (2.9, 3.9), (5.0, 5.5)),
    )


def pressure_vessel_cost(x1, x2, x3, x4):
    """Pressure vessel cost for thicknesses (x1, x2), radius x3, length x4."""
    return 0.6224 * x1 * x3 * x4 + 1.7781 * x2 * x3**2 + 3.1661 * x1**2 * x4 + 19.84 * x1**2 * x3


def pressure_vessel_volume_slack(x3, x4):
    """Volume constraint residual; feasible at or below zero."""
    return -math.pi * x3**2 * x4**2 - (4.0 / 3.0) * x3**3 + 1_296_000.0


def pressure_vessel() -> ObjectiveSpec:
    """Pressure vessel design: 2 bits each select the integer thicknesses x1, x2 in {3..6}."""
    patterns = [tuple(bits_of(k, 4)) for k in range(16)]

    def decode(pattern):
        return 3 + 2 * pattern[0] + pattern[1], 3 + 2 * pattern[2] + pattern[3]

    def evaluate(q, x_c):
        x3, x4 = x_c[0], x_c[1]
        total = 0
        for pattern in patterns:
            x1, x2 = decode(pattern)
            total = total + _selector(q, pattern) * pressure_vessel_cost(x1, x2, x3, x4)
        return total

    return ObjectiveSpec(
        name="pressure-vessel",
        n_binary=4,
        sense=MINIMIZE,
        evaluate=evaluate,
        continuous_bounds=((10.0, 150.0), (10.0, 150.0)),
        constraints=(lambda q, x_c: pressure_vessel_volume_slack(x_c[0], x_c[1]),),
        penalty_value=-10_000_000.0,
    )


def _heh_plus_grid():
    path = resources.files("qaboa").joinpath("data/heh_plus_tapered.txt")
    with resources.as_file(path) as p:
        return load_coefficient_grid(p)


def heh_plus() -> ObjectiveSpec:
    """HeH+ potential energy: 2 qubits of orbital configuration, x_c = (bond length in angstrom).

    The reduced molecular Hamiltonian is interpolated from a packaged
    Pauli-coefficient grid; per-basis-state objective values are its diagonal.
    """
    grid = _heh_plus_grid()

    def compile_dense(x_c):
        return grid.hamiltonian_at(float(x_c[0]))

    def evaluate(q, x_c):
        diag = compile_dense(x_c).diagonal
        z = 0
        for b in q:
            z = (z << 1) | int(b)
        return float(diag[z])

    return ObjectiveSpec(
        name="heh-plus",
        n_binary=grid.n_qubits,
        sense=MINIMIZE,
        evaluate=evaluate,
        continuous_bounds=(grid.bounds,),
        dense_compiler=compile_dense,
    )


def compile_diagonal(spec: ObjectiveSpec, x_c: Sequence[float] = ()) -> DiagonalHamiltonian:
    """Objective values over all basis states as a diagonal phase operator.

    Evaluating per basis state is exactly the diagonal produced by the
    q -> (1 - Z)/2 substitution on the objective polynomial; the symbolic
    route exists as a test oracle.
    """
    if not spec.is_classical:
        raise ValueError(f"{spec.name} does not compile to a diagonal; use compile_hamiltonian")
    spec.check_continuous(x_c)
    n = spec.n_binary
    values = np.array([spec.evaluate(bits_of(z, n), x_c) for z in range(2**n)], dtype=float)
    return DiagonalHamiltonian(values)


def compile_hamiltonian(spec: ObjectiveSpec, x_c: Sequence[float] = ()):
    """Phase operator at fixed continuous variables: diagonal or dense per problem kind."""
    if spec.is_classical:
        return compile_diagonal(spec, x_c)
    spec.check_continuous(x_c)
    return spec.dense_compiler(x_c)


def brute_force_optimum(spec: ObjectiveSpec, x_c: Sequence[float] = ()) -> tuple[int, float]:
    """Exhaustive scan over all bit patterns at fixed x_c; ties break toward smaller index."""
    best_z, best_value = 0, None
    for z in range(2**spec.n_binary):
        value = spec.evaluate(bits_of(z, spec.n_binary), x_c)
        if best_value is None or better(value, best_value, spec.sense):
            best_z, best_value = z, value
    return best_z, float(best_value)


_REGISTRY: dict[str, Callable[[], ObjectiveSpec]] = {
    "maxcut-k6": lambda: maxcut(complete_graph(6), weighted=False),
    "wmaxcut-k5-1": lambda: maxcut(random_weighted_k5(seed=1)),
    "wmaxcut-k5-2": lambda: maxcut(random_weighted_k5(seed=2)),
    "wmaxcut-k5-3": lambda: maxcut(random_weighted_k5(seed=3)),
    "lattice-protein": lattice_protein,
    "heh-plus": heh_plus,
    "welded-beam": welded_beam,
    "speed-reducer": speed_reducer,
    "pressure-vessel": pressure_vessel,
}


def list_problem_ids() -> list[str]:
    return sorted(_REGISTRY)


def get_problem(problem_id: str) -> ObjectiveSpec:
    try:
        factory = _REGISTRY[problem_id]
    except KeyError:
        raise KeyError(f"unknown problem id {problem_id!r}; known: {', '.join(list_problem_ids())}") from None
    return dataclasses.replace(factory(), name=problem_id)
