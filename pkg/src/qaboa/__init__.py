"""Quantum approximate Bayesian optimization on an exact statevector simulator.

Five circuit variants (Pauli-X, XY-ring, and Grover single-mixer baselines,
plus two-mixer circuits with and without measurement-uncertainty modeling)
optimize discrete and mixed-integer objectives through a Gaussian-process
surrogate loop.
"""

from .bayesopt import (
    AlgorithmVariant,
    AnnealerConfig,
    RunConfig,
    RunTrace,
    anneal_maximize,
    grover_target_set,
    mode_objective,
    run_circuit,
    run_optimization,
    simulate_circuit,
    ucb,
)
from .gpr import (
    GaussianProcessSurrogate,
    KurtosisEstimate,
    histogram_kurtosis,
    matern_kernel,
    quantum_matern_kernel,
)
from .hamiltonians import (
    DenseHamiltonian,
    DiagonalHamiltonian,
    PauliFormatError,
    load_coefficient_grid,
    load_pauli_hamiltonian,
)
from .harness import (
    AggregateCurve,
    ExperimentConfig,
    aggregate_traces,
    load_config,
    run_experiment,
    verify,
)
from .problems import (
    ObjectiveSpec,
    WeightedGraph,
    brute_force_optimum,
    compile_diagonal,
    compile_hamiltonian,
    complete_graph,
    get_problem,
    lattice_protein,
    list_problem_ids,
    maxcut,
    pressure_vessel,
    random_weighted_k5,
    speed_reducer,
    welded_beam,
)
from .statevector import (
    MeasurementHistogram,
    apply_diagonal_phase,
    apply_grover_mixer,
    apply_x_mixer,
    apply_xy_mixer,
    sample_counts,
    uniform_superposition,
)

__version__ = "0.1.0"
