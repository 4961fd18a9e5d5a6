"""Experiment orchestration: configs, repeated seeded runs, aggregation, verification.

An experiment is one problem crossed with a list of algorithm variants,
repeated over seeds base_seed + k.  Each run writes a JSONL trace; per-variant
convergence curves (mean and population standard deviation of the
best-so-far objective) are written as CSV.  Reruns of the same config are
byte-identical.
"""

from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import problems as prob
from .bayesopt import AlgorithmVariant, AnnealerConfig, RunConfig, RunTrace, run_optimization
from .statevector import bits_of

CSV_COLUMNS = ("iteration", "variant", "mean_best", "std_best", "n_runs")


@dataclass(frozen=True)
class ExperimentConfig:
    """Settings of one experiment (problem x variants x repetitions)."""

    problem: str
    variants: tuple[str, ...]
    repetitions: int
    iterations: int
    shots: int = 1024
    n_initial: int = 3
    alpha: float = 1.0
    nu: float = 0.5
    angle_budget: int = 6
    base_seed: int = 0
    exploration: str = "x"
    annealer: AnnealerConfig = field(default_factory=AnnealerConfig)

    def __post_init__(self):
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if self.iterations < 0:
            raise ValueError("iterations must be >= 0")
        prob.get_problem(self.problem)  # unresolvable ids fail at load time
        for name in self.variants:
            AlgorithmVariant.from_name(name, self.angle_budget)  # asserts angle-budget parity

    def run_config(self) -> RunConfig:
        return RunConfig(
            iterations=self.iterations,
            shots=self.shots,
            n_initial=self.n_initial,
            alpha=self.alpha,
            nu=self.nu,
            annealer=self.annealer,
        )


def load_config(source) -> ExperimentConfig:
    """Parse an experiment config from a TOML file path or text."""
    if hasattr(source, "read"):
        data = tomllib.loads(source.read())
    elif isinstance(source, str) and "\n" in source:
        data = tomllib.loads(source)
    else:
        with open(source, "rb") as fh:
            data = tomllib.load(fh)
    exp = dict(data.get("experiment", {}))
    annealer = AnnealerConfig(**data.get("annealer", {}))
    exp["variants"] = tuple(exp.get("variants", ("x", "xy", "gm", "tm", "utm")))
    return ExperimentConfig(annealer=annealer, **exp)


def bundled_config_path(name: str):
    """Path of a packaged experiment config by bare name (without .toml)."""
    return resources.files("qaboa").joinpath(f"configs/{name}.toml")


def resolve_config(name_or_path: str) -> ExperimentConfig:
    """Load a config from a filesystem path, falling back to the bundled set."""
    if os.path.exists(name_or_path):
        return load_config(name_or_path)
    candidate = bundled_config_path(name_or_path.removesuffix(".toml"))
    if candidate.is_file():
        return load_config(candidate.read_text(encoding="utf-8"))
    raise FileNotFoundError(f"no config file or bundled config named {name_or_path!r}")


def list_bundled_configs() -> list[str]:
    folder = resources.files("qaboa").joinpath("configs")
    return sorted(p.name.removesuffix(".toml") for p in folder.iterdir() if p.name.endswith(".toml"))


@dataclass(frozen=True)
class AggregateCurve:
    """Mean and population stddev of the best-so-far objective per evaluation index."""

    variant: str
    mean_best: np.ndarray
    std_best: np.ndarray
    n_runs: int


def aggregate_traces(traces: list[RunTrace]) -> dict[str, AggregateCurve]:
    """Group traces by variant and average their best-so-far curves."""
    by_variant: dict[str, list[RunTrace]] = {}
    for trace in traces:
        by_variant.setdefault(trace.variant, []).append(trace)
    curves = {}
    for variant, group in sorted(by_variant.items()):
        if len({len(t.records) for t in group}) > 1:
            raise ValueError(f"traces for variant {variant} have inconsistent lengths")
        series = np.array([t.best_so_far() for t in sorted(group, key=lambda t: t.seed)])
        curves[variant] = AggregateCurve(
            variant=variant,
            mean_best=series.mean(axis=0),
            std_best=series.std(axis=0, ddof=0),
            n_runs=len(group),
        )
    return curves


def curve_to_csv(curve: AggregateCurve) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for i, (mean, std) in enumerate(zip(curve.mean_best, curve.std_best)):
        writer.writerow([i, curve.variant, repr(float(mean)), repr(float(std)), curve.n_runs])
    return buffer.getvalue()


def trace_filename(problem_id: str, variant: str, seed: int) -> str:
    return f"{problem_id}__{variant}__seed{seed}.jsonl"


def _run_one(problem_id: str, variant_name: str, angle_budget: int, exploration: str,
             run_config: RunConfig, seed: int) -> RunTrace:
    problem = prob.get_problem(problem_id)
    variant = AlgorithmVariant.from_name(variant_name, angle_budget, exploration)
    return run_optimization(variant, problem, run_config, seed)


def run_experiment(config: ExperimentConfig, out_dir, jobs: int = 1) -> dict[str, AggregateCurve]:
    """Run all repetitions of all variants, writing traces and per-variant CSVs."""
    os.makedirs(out_dir, exist_ok=True)
    run_config = config.run_config()
    tasks = [
        (config.problem, name, config.angle_budget, config.exploration, run_config, config.base_seed + rep)
        for name in config.variants
        for rep in range(config.repetitions)
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            traces = list(pool.map(_run_one, *zip(*tasks)))
    else:
        traces = [_run_one(*task) for task in tasks]
    for trace in traces:
        trace.save(os.path.join(out_dir, trace_filename(trace.problem_id, trace.variant, trace.seed)))
    curves = aggregate_traces(traces)
    for variant, curve in curves.items():
        path = os.path.join(out_dir, f"aggregate_{config.problem}_{variant}.csv")
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(curve_to_csv(curve))
    return curves


def aggregate_directory(trace_dir, out_dir=None) -> dict[str, dict[str, AggregateCurve]]:
    """Recompute aggregate CSVs from the trace files in a directory, grouped by problem."""
    out_dir = trace_dir if out_dir is None else out_dir
    os.makedirs(out_dir, exist_ok=True)
    traces = [
        RunTrace.load(os.path.join(trace_dir, name))
        for name in sorted(os.listdir(trace_dir))
        if name.endswith(".jsonl")
    ]
    if not traces:
        raise FileNotFoundError(f"no .jsonl trace files in {trace_dir}")
    by_problem: dict[str, list[RunTrace]] = {}
    for trace in traces:
        by_problem.setdefault(trace.problem_id, []).append(trace)
    result = {}
    for problem_id, group in sorted(by_problem.items()):
        curves = aggregate_traces(group)
        result[problem_id] = curves
        for variant, curve in curves.items():
            path = os.path.join(out_dir, f"aggregate_{problem_id}_{variant}.csv")
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(curve_to_csv(curve))
    return result


# -- verification reports ---------------------------------------------------

# Independent decode tables for the selector-expansion checks: bit pattern ->
# discrete design values, re-derived here rather than imported so the report
# cross-checks the problem definitions.
def _welded_decode(pattern):
    return pattern[0], 1 + 2 * pattern[1] + pattern[2]


def _reducer_decode(pattern):
    return 15 + 8 * pattern[0] + 4 * pattern[1] + 2 * pattern[2] + pattern[3]


def _vessel_decode(pattern):
    return 3 + 2 * pattern[0] + pattern[1], 3 + 2 * pattern[2] + pattern[3]


def _selector_check(spec, base_value, n_draws: int = 100, seed: int = 7) -> tuple[bool, float]:
    """Compare the selector-expanded objective against the decoded base objective."""
    rng = np.random.default_rng(seed)
    lo = np.array([b[0] for b in spec.continuous_bounds])
    hi = np.array([b[1] for b in spec.continuous_bounds])
    worst = 0.0
    for _ in range(n_draws):
        x_c = rng.uniform(lo, hi)
        for z in range(2**spec.n_binary):
            q = bits_of(z, spec.n_binary)
            expanded = spec.evaluate(q, x_c)
            direct = base_value(q, x_c)
            denom = max(abs(direct), 1.0)
            worst = max(worst, abs(expanded - direct) / denom)
    return worst <= 1e-12, worst


_SELECTOR_BASES = {
    "welded-beam": lambda q, x: prob.welded_beam_cost(*_welded_decode(q), x[0], x[1], x[2], x[3]),
    "speed-reducer": lambda q, x: prob.speed_reducer_weight(x[0], x[1], _reducer_decode(q), x[2], x[3], x[4], x[5]),
    "pressure-vessel": lambda q, x: prob.pressure_vessel_cost(*_vessel_decode(q), x[0], x[1]),
}


def verify(problem_id: str) -> str:
    """Human-readable report: brute-force optimum and structural cross-checks."""
    spec = prob.get_problem(problem_id)
    lines = [f"problem: {problem_id} ({spec.sense}, {spec.n_binary} qubits)"]
    if problem_id == "heh-plus":
        lo, hi = spec.continuous_bounds[0]
        best_value, best_state, best_length = math.inf, 0, lo
        for b in np.round(np.arange(lo, hi + 1e-9, 0.05), 6):
            z, value = prob.brute_force_optimum(spec, (float(b),))
            if value < best_value:
                best_value, best_state, best_length = value, z, float(b)
        lines.append(
            f"grid scan over bond length: optimum {best_value:.6f} at "
            f"L={best_length:.2f}, state {best_state:0{spec.n_binary}b}"
        )
        return "\n".join(lines)
    if spec.continuous_bounds:
        mid = tuple((lo + hi) / 2.0 for lo, hi in spec.continuous_bounds)
        z, value = prob.brute_force_optimum(spec, mid)
        lines.append(f"brute-force optimum at midpoint x_c {tuple(round(m, 4) for m in mid)}: {value:.6f} at {z:0{spec.n_binary}b}")
    else:
        z, value = prob.brute_force_optimum(spec)
        optima = [
            f"{w:0{spec.n_binary}b}"
            for w in range(2**spec.n_binary)
            if spec.evaluate(bits_of(w, spec.n_binary), ()) == value
        ]
        lines.append(f"brute-force optimum: {value:g}")
        lines.append(f"optimal bitstrings ({len(optima)}): {' '.join(optima)}")
    if problem_id in _SELECTOR_BASES:
        ok, worst = _selector_check(spec, _SELECTOR_BASES[problem_id])
        patterns = 2**spec.n_binary
        lines.append(
            f"selector equivalence over {patterns} patterns x 100 draws: "
            f"{'PASS' if ok else 'FAIL'} (max relative deviation {worst:.3e})"
        )
    if spec.constraints:
        lines.append(f"constraints: {len(spec.constraints)} (penalty {spec.penalty_value:g})")
    return "\n".join(lines)
