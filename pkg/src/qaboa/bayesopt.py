"""The hybrid quantum-classical optimization loop.

One evaluation simulates a parameterized circuit (phase operator plus the
variant's mixers), samples it, and scores the most frequently measured basis
state.  A Gaussian-process surrogate over the rotation angles and continuous
variables proposes the next point by maximizing an upper-confidence-bound
acquisition with simulated annealing.  Everything is deterministic given the
run seed.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, asdict
from typing import Callable, Sequence

import numpy as np

from . import statevector as sv
from .gpr import GaussianProcessSurrogate, KurtosisEstimate, histogram_kurtosis
from .hamiltonians import DenseHamiltonian, DiagonalHamiltonian
from .problems import ObjectiveSpec, compile_hamiltonian, worst_value

TWO_PI = 2.0 * math.pi

VARIANT_KINDS = ("x", "xy", "gm", "tm", "utm")
_DISPLAY = {"x": "X-QABOA", "xy": "XY-QABOA", "gm": "GM-QABOA", "tm": "TM-QABOA", "utm": "uTM-QABOA"}

# sub-stream tags for deterministic seed derivation
_STREAM_INIT = 0
_STREAM_SAMPLE = 1
_STREAM_ANNEAL = 2


@dataclass(frozen=True)
class AlgorithmVariant:
    """A circuit family: which mixers each layer applies and how deep.

    Single-mixer variants use two angles per layer (phase, mixer); the
    two-mixer variants use three (phase, exploration mixer, amplification).
    ``exploration`` selects the first mixer of the two-mixer variants.
    """

    kind: str
    depth: int
    exploration: str = "x"

    def __post_init__(self):
        if self.kind not in VARIANT_KINDS:
            raise ValueError(f"variant kind must be one of {VARIANT_KINDS}, got {self.kind!r}")
        if self.depth < 1:
            raise ValueError("depth must be >= 1")
        if self.exploration not in ("x", "xy"):
            raise ValueError("exploration mixer must be 'x' or 'xy'")

    @property
    def angles_per_layer(self) -> int:
        return 3 if self.kind in ("tm", "utm") else 2

    @property
    def n_angles(self) -> int:
        return self.depth * self.angles_per_layer

    @property
    def uses_grover(self) -> bool:
        return self.kind in ("gm", "tm", "utm")

    @property
    def uses_kurtosis_kernel(self) -> bool:
        return self.kind == "utm"

    @property
    def display_name(self) -> str:
        return _DISPLAY[self.kind]

    @staticmethod
    def from_name(name: str, angle_budget: int = 6, exploration: str = "x") -> "AlgorithmVariant":
        """Build a variant from its name with depth derived from a total angle budget."""
        kind = name.strip().lower().replace("-qaboa", "")
        if kind not in VARIANT_KINDS:
            raise ValueError(f"unknown variant {name!r}")
        per_layer = 3 if kind in ("tm", "utm") else 2
        if angle_budget % per_layer:
            raise ValueError(f"angle budget {angle_budget} is not a multiple of {per_layer} for variant {name!r}")
        return AlgorithmVariant(kind=kind, depth=angle_budget // per_layer, exploration=exploration)


def grover_target_set(values: np.ndarray, f_star: float, sense: str) -> np.ndarray:
    """Basis indices whose objective value strictly improves on the incumbent."""
    values = np.asarray(values)
    mask = values < f_star if sense == "minimize" else values > f_star
    return np.nonzero(mask)[0]


def simulate_circuit(
    variant: AlgorithmVariant,
    angles: Sequence[float],
    hamiltonian,
    f_star: float,
    sense: str,
) -> np.ndarray:
    """Final statevector of the variant's circuit from the uniform start state."""
    angles = np.asarray(angles, dtype=float)
    if angles.shape[0] != variant.n_angles:
        raise ValueError(f"{variant.kind} depth {variant.depth} needs {variant.n_angles} angles, got {angles.shape[0]}")
    state = sv.uniform_superposition(hamiltonian.n_qubits)
    targets = grover_target_set(hamiltonian.diagonal, f_star, sense) if variant.uses_grover else None
    apply_exploration = sv.apply_x_mixer if variant.exploration == "x" else sv.apply_xy_mixer
    per_layer = variant.angles_per_layer
    for layer in range(variant.depth):
        gamma = angles[layer * per_layer]
        state = hamiltonian.apply_phase(state, gamma)
        if variant.kind == "x":
            state = sv.apply_x_mixer(state, angles[layer * per_layer + 1])
        elif variant.kind == "xy":
            state = sv.apply_xy_mixer(state, angles[layer * per_layer + 1])
        elif variant.kind == "gm":
            state = sv.apply_grover_mixer(state, targets, angles[layer * per_layer + 1])
        else:  # tm / utm
            state = apply_exploration(state, angles[layer * per_layer + 1])
            state = sv.apply_grover_mixer(state, targets, angles[layer * per_layer + 2])
    return state


def run_circuit(
    variant: AlgorithmVariant,
    angles: Sequence[float],
    hamiltonian,
    f_star: float,
    sense: str,
    shots: int,
    seed,
) -> sv.MeasurementHistogram:
    """Simulate the circuit and measure it ``shots`` times."""
    state = simulate_circuit(variant, angles, hamiltonian, f_star, sense)
    return sv.sample_counts(state, shots, seed)


def mode_objective(hist: sv.MeasurementHistogram, hamiltonian) -> tuple[int, float]:
    """Most frequent basis state and its objective value (the operator diagonal entry)."""
    psi_m = hist.most_frequent()
    return psi_m, float(hamiltonian.diagonal[psi_m])


def ucb(mu: float, sigma: float, alpha: float) -> float:
    """Upper confidence bound alpha*sigma - mu for minimization of mu."""
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    return alpha * sigma - mu


@dataclass(frozen=True)
class AnnealerConfig:
    """Simulated annealing schedule for the acquisition search.

    ``cooling_rate`` of None derives the geometric rate that reaches a final
    temperature of 1e-3 after ``steps`` steps.  ``proposal_scale`` is the
    Gaussian proposal stddev as a fraction of each dimension's range.
    """

    steps: int = 1000
    initial_temperature: float = 1.0
    cooling_rate: float | None = None
    proposal_scale: float = 0.1

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        if self.initial_temperature <= 0:
            raise ValueError("initial temperature must be positive")
        if self.cooling_rate is not None and not 0.0 < self.cooling_rate < 1.0:
            raise ValueError("cooling rate must lie in (0, 1)")
        if self.proposal_scale <= 0:
            raise ValueError("proposal scale must be positive")

    def effective_rate(self) -> float:
        if self.cooling_rate is not None:
            return self.cooling_rate
        return (1e-3 / self.initial_temperature) ** (1.0 / self.steps)


def anneal_maximize(
    objective: Callable[[np.ndarray], float],
    lower: np.ndarray,
    upper: np.ndarray,
    config: AnnealerConfig,
    rng: np.random.Generator,
) -> tuple[np.ndarray, float]:
    """Maximize a black-box function over a box with Metropolis annealing.

    Proposals are Gaussian steps clipped to the box; returns the best point
    visited (which need not be the final accepted point).
    """
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    span = upper - lower
    x = rng.uniform(lower, upper)
    value = objective(x)
    best_x, best_value = x.copy(), value
    temperature = config.initial_temperature
    rate = config.effective_rate()
    for _ in range(config.steps):
        proposal = np.clip(x + rng.normal(0.0, config.proposal_scale * span), lower, upper)
        prop_value = objective(proposal)
        if prop_value > best_value:
            best_x, best_value = proposal.copy(), prop_value
        if prop_value >= value or rng.random() < math.exp((prop_value - value) / temperature):
            x, value = proposal, prop_value
        temperature *= rate
    return best_x, best_value


@dataclass(frozen=True)
class RunConfig:
    """Per-run settings of the optimization loop."""

    iterations: int
    shots: int = 1024
    n_initial: int = 3
    alpha: float = 1.0
    nu: float = 0.5
    annealer: AnnealerConfig = field(default_factory=AnnealerConfig)

    def __post_init__(self):
        if self.iterations < 0:
            raise ValueError("iterations must be >= 0")
        if self.shots < 1:
            raise ValueError("shots must be >= 1")
        if self.n_initial < 1:
            raise ValueError("n_initial must be >= 1")
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")


@dataclass
class TraceRecord:
    """One circuit evaluation inside a run."""

    index: int
    phase: str  # "init" or "bo"
    angles: list[float]
    x_c: list[float]
    counts: dict[int, int]
    shots: int
    mode_state: int
    objective: float
    kurtosis: float | None  # None when the measured distribution is a point mass
    best_objective: float
    best_state: int


@dataclass
class RunTrace:
    """Full record of one optimization run."""

    problem_id: str
    variant: str
    depth: int
    sense: str
    seed: int
    records: list[TraceRecord] = field(default_factory=list)

    @property
    def best_objective(self) -> float:
        return self.records[-1].best_objective

    def best_so_far(self) -> list[float]:
        return [r.best_objective for r in self.records]

    def to_jsonl(self) -> str:
        header = {
            "problem_id": self.problem_id,
            "variant": self.variant,
            "depth": self.depth,
            "sense": self.sense,
            "seed": self.seed,
        }
        lines = [json.dumps({"header": header}, sort_keys=True)]
        for record in self.records:
            payload = asdict(record)
            payload["counts"] = {str(k): v for k, v in record.counts.items()}
            lines.append(json.dumps(payload, sort_keys=True))
        return "\n".join(lines) + "\n"

    @staticmethod
    def from_jsonl(text: str) -> "RunTrace":
        lines = [line for line in text.splitlines() if line.strip()]
        header = json.loads(lines[0])["header"]
        trace = RunTrace(**header)
        for line in lines[1:]:
            payload = json.loads(line)
            payload["counts"] = {int(k): v for k, v in payload["counts"].items()}
            trace.records.append(TraceRecord(**payload))
        return trace

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_jsonl())

    @staticmethod
    def load(path) -> "RunTrace":
        with open(path, "r", encoding="utf-8") as fh:
            return RunTrace.from_jsonl(fh.read())


def _search_bounds(variant: AlgorithmVariant, problem: ObjectiveSpec) -> tuple[np.ndarray, np.ndarray]:
    n_angles = variant.n_angles
    lower = np.concatenate([np.zeros(n_angles), [lo for lo, _ in problem.continuous_bounds]])
    upper = np.concatenate([np.full(n_angles, TWO_PI), [hi for _, hi in problem.continuous_bounds]])
    return lower, upper


def _scale_points(points: np.ndarray, lower: np.ndarray, upper: np.ndarray) -> np.ndarray:
    """Map raw search points into the unit box the kernel operates on."""
    return (points - lower) / (upper - lower)


def _initial_points(
    variant: AlgorithmVariant,
    problem: ObjectiveSpec,
    n_initial: int,
    seed: int,
) -> np.ndarray:
    """Uniform-random initial design, identical across variants for a given seed.

    For the standard six-angle budget each sample draws four shared base
    angles, two amplification angles, and the continuous variables in a fixed
    order regardless of variant; single-mixer variants place the shared base
    angles in their first two layers and zero the third, so all variants see
    the same underlying draw.
    """
    rng = np.random.default_rng([seed, _STREAM_INIT])
    c_lo = np.array([lo for lo, _ in problem.continuous_bounds])
    c_hi = np.array([hi for _, hi in problem.continuous_bounds])
    points = []
    for _ in range(n_initial):
        if variant.n_angles == 6:
            base = rng.uniform(0.0, TWO_PI, 4)
            thetas = rng.uniform(0.0, TWO_PI, 2)
            if variant.angles_per_layer == 2:
                angles = np.array([base[0], base[1], base[2], base[3], 0.0, 0.0])
            else:
                angles = np.array([base[0], base[1], thetas[0], base[2], base[3], thetas[1]])
        else:
            angles = rng.uniform(0.0, TWO_PI, variant.n_angles)
        x_c = rng.uniform(c_lo, c_hi) if c_lo.size else np.empty(0)
        points.append(np.concatenate([angles, x_c]))
    return np.array(points)


def _negated(hamiltonian):
    if isinstance(hamiltonian, DiagonalHamiltonian):
        return DiagonalHamiltonian(-hamiltonian.values)
    return DenseHamiltonian(-hamiltonian.matrix)


def run_optimization(
    variant: AlgorithmVariant,
    problem: ObjectiveSpec,
    config: RunConfig,
    seed: int,
) -> RunTrace:
    """Execute one full optimization run; bit-identical for identical inputs.

    Maximization problems are negated wholesale (phase operator included) so
    the loop always minimizes; trace records carry the un-negated objective.
    A maximize problem and its negated minimize twin therefore produce
    identical runs.
    """
    if problem.constraints and problem.penalty_value is None:
        raise ValueError(f"{problem.name} has constraints but no penalty value")
    sense = problem.sense
    sign = 1.0 if sense == "minimize" else -1.0
    lower, upper = _search_bounds(variant, problem)
    n_angles = variant.n_angles
    compiled: dict[tuple, object] = {}

    def hamiltonian_at(x_c: np.ndarray):
        key = tuple(x_c.tolist())
        if key not in compiled:
            hamiltonian = compile_hamiltonian(problem, x_c)
            compiled[key] = hamiltonian if sign > 0 else _negated(hamiltonian)
        return compiled[key]

    trace = RunTrace(
        problem_id=problem.name, variant=variant.kind, depth=variant.depth, sense=sense, seed=seed
    )
    points: list[np.ndarray] = []
    internal_y: list[float] = []
    kappas: list[KurtosisEstimate] = []
    f_star_int = worst_value("minimize")
    best_state = 0

    def evaluate(point: np.ndarray, index: int, phase: str) -> None:
        nonlocal f_star_int, best_state
        angles, x_c = point[:n_angles], point[n_angles:]
        hamiltonian = hamiltonian_at(x_c)
        # initial-design circuits all run against the sentinel, so the set of
        # phase-marked states does not depend on the order of the design
        incumbent = worst_value("minimize") if phase == "init" else f_star_int
        hist = run_circuit(
            variant, angles, hamiltonian, incumbent, "minimize", config.shots, seed=[seed, _STREAM_SAMPLE, index]
        )
        psi_m, objective_int = mode_objective(hist, hamiltonian)
        kappa = histogram_kurtosis(hist)
        if objective_int < f_star_int:
            f_star_int, best_state = objective_int, psi_m
        points.append(point)
        internal_y.append(objective_int)
        kappas.append(kappa)
        trace.records.append(
            TraceRecord(
                index=index,
                phase=phase,
                angles=[float(a) for a in angles],
                x_c=[float(c) for c in x_c],
                counts=dict(hist.counts),
                shots=hist.shots,
                mode_state=psi_m,
                objective=sign * objective_int,
                kurtosis=None if kappa.degenerate else kappa.kappa,
                best_objective=sign * f_star_int,
                best_state=best_state,
            )
        )

    for i, point in enumerate(_initial_points(variant, problem, config.n_initial, seed)):
        evaluate(point, i, "init")

    if config.iterations == 0:
        return trace

    model = GaussianProcessSurrogate(
        kernel="qmatern" if variant.uses_kurtosis_kernel else "matern",
        nu=config.nu,
    )

    def fit_model(iteration: int) -> None:
        features = _scale_points(np.array(points), lower, upper)
        try:
            model.fit(features, np.array(internal_y), kappas=kappas if variant.uses_kurtosis_kernel else None)
        except Exception as exc:
            raise RuntimeError(
                f"surrogate refit failed at iteration {iteration} of {problem.name}/{variant.kind} (seed {seed}): {exc}"
            ) from exc

    def acquisition(point: np.ndarray) -> float:
        x_c = point[n_angles:]
        if problem.constraints and not problem.is_feasible(None, x_c):
            return problem.penalty_value
        mu, sigma = model.predict_standardized(_scale_points(point, lower, upper).reshape(1, -1))
        return ucb(float(mu[0]), float(sigma[0]), config.alpha)

    for t in range(config.iterations):
        fit_model(t)
        rng = np.random.default_rng([seed, _STREAM_ANNEAL, t])
        point, _ = anneal_maximize(acquisition, lower, upper, config.annealer, rng)
        evaluate(point, config.n_initial + t, "bo")
    return trace
