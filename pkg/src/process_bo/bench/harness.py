"""Monte Carlo comparison of the switching acquisition against EI_C on the benchmark problems

Every repetition draws its initialization samples from a generator keyed by (seed, problem, initialization index),
so two runs of different acquisitions (or different pi values) with the same repetition index start from the same
points. In noisy mode a repetition is one (initialization, noise realization) pair, and the noise drawn at each
evaluation index depends on the repetition only.
"""

from __future__ import annotations

import logging
import statistics
import time
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np
from joblib import Parallel, delayed

from ..acquisition import ACQUISITIONS, feasibility_mask, find_incumbent, score_candidates, select_candidate
from ..batch import BatchConfig, incorporate_results, propose_batch
from ..config import Config
from ..exceptions import EmptyCandidateSetError, Message, ProcessBOError
from ..gp import FitConfig, fit_models
from ..problems import (
    NoiseConfig,
    NoiseStream,
    find_grid_optimum,
    get_problem,
    make_grid,
)
from ..resources import CandidateSet, Dataset, all_satisfied

logger = logging.getLogger(__name__)

DEFAULT_PIS = tuple(round(0.1 * i, 1) for i in range(11))
DEFAULT_TIMING_SIZES = (10, 50, 100)


class StopReason:
    OPTIMUM_FOUND = "optimum-found"
    MAX_ITERATIONS = "max-iterations"
    CANDIDATES_EXHAUSTED = "candidates-exhausted"
    GP_FAILURE = "gp-failure"


@dataclass(frozen=True)
class RunConfig:
    problem: str = "p1"
    acquisition: str = "alg1"
    pi: float = 0.6
    tau: float = 0.0
    max_iterations: int = 100
    init_count: int = 2
    repetitions: int = 100
    initializations: int = 20
    noise_realizations: int = 5
    seed: int = field(default_factory=lambda: Config.RANDOM_SEED)
    grid_count: int = 20000
    gp_restarts: int = 2

    def __post_init__(self) -> None:
        get_problem(self.problem)
        if self.acquisition not in ACQUISITIONS:
            raise ValueError(f"Unknown acquisition {self.acquisition}, expected one of {ACQUISITIONS}")
        if not 0 <= self.pi <= 1:
            raise ValueError(f"pi must lie in [0, 1], got {self.pi}")
        if self.tau < 0:
            raise ValueError("tau must be non-negative")
        if self.repetitions < 1 or self.initializations < 1 or self.noise_realizations < 1:
            raise ValueError("At least one repetition is required")
        if self.init_count < 1:
            raise ValueError("At least one initialization sample is required")
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be non-negative")

    @property
    def noisy(self) -> bool:
        return self.tau > 0

    @property
    def total_repetitions(self) -> int:
        return self.initializations * self.noise_realizations if self.noisy else self.repetitions

    def initialization_index(self, repetition: int) -> int:
        return repetition // self.noise_realizations if self.noisy else repetition

    def replace(self, **changes) -> RunConfig:
        values = self.to_dict()
        values.update(changes)
        return RunConfig(**values)

    def to_dict(self) -> dict:
        return {name: getattr(self, name) for name in self.__dataclass_fields__}


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    candidate_id: int
    inputs: tuple[float, ...]
    cost: float
    measured: tuple[float, ...]
    feasible: bool
    branch: Optional[str] = None
    fp: Optional[float] = None
    improvement: Optional[float] = None
    alpha_fip: Optional[float] = None
    alpha: Optional[float] = None

    @property
    def is_initialization(self) -> bool:
        return self.iteration == 0

    def to_dict(self) -> dict:
        return {
            "iteration": self.iteration,
            "candidate_id": self.candidate_id,
            "candidate": list(self.inputs),
            "S": self.cost,
            "measured_values": list(self.measured),
            "feasible": self.feasible,
            "branch": self.branch,
            "FP": self.fp,
            "I": self.improvement,
            "alpha_fip": self.alpha_fip,
            "alpha": self.alpha,
        }


@dataclass
class RunTrace:
    problem: str
    acquisition: str
    pi: float
    repetition: int
    records: list[IterationRecord]
    stop_reason: str
    required_iterations: int

    def samples(self, include_init: bool = False) -> list[IterationRecord]:
        return [r for r in self.records if include_init or not r.is_initialization]

    def feasible_count(self, include_init: bool = False) -> int:
        return sum(r.feasible for r in self.samples(include_init))

    def evaluated_count(self, include_init: bool = False) -> int:
        return len(self.samples(include_init))

    def convergence_series(self) -> list[Optional[float]]:
        """Best measured-feasible cost after the initialization (index 0) and after each optimization iteration"""
        best = None
        for record in self.records:
            if record.is_initialization and record.feasible:
                best = record.cost if best is None else min(best, record.cost)
        series = [best]
        for record in self.samples():
            if record.feasible and (best is None or record.cost < best):
                best = record.cost
            series.append(best)
        return series

    def to_records(self) -> list[dict]:
        return [
            {"acquisition": self.acquisition, "pi": self.pi, "repetition": self.repetition, **r.to_dict()}
            for r in self.records
        ]


def _initial_positions(config: RunConfig, grid_size: int, problem_key: int, repetition: int) -> np.ndarray:
    rng = np.random.default_rng([config.seed, problem_key, config.initialization_index(repetition)])
    return rng.choice(grid_size, size=config.init_count, replace=False)


def run_single(config: RunConfig, repetition: int) -> RunTrace:
    """Run one sequential optimization (batch size 1) from seeded initialization samples

    The run stops when the grid optimum is evaluated (noiseless), when a measured-feasible candidate within the
    tolerance radius of the optimum is evaluated (noisy), or after `config.max_iterations` evaluations.

    Args:
        config (RunConfig): the study settings
        repetition (int): the repetition index

    Returns:
        RunTrace: the trace, initialization samples included at iteration 0
    """
    problem = get_problem(config.problem)
    grid = make_grid(problem, config.grid_count)
    optimum = find_grid_optimum(problem, grid)
    stream = NoiseStream(NoiseConfig(config.tau, config.seed), problem.key, repetition)

    def measure(x: np.ndarray) -> np.ndarray:
        values = problem.oracle(x)[0]
        return values + stream.next(values.shape[0]) if config.noisy else values

    def reached(candidate_id: int, x: np.ndarray, feasible: bool) -> bool:
        if config.noisy:
            return feasible and optimum.within_radius(x)
        return candidate_id == optimum.candidate_id

    positions = _initial_positions(config, len(grid), problem.key, repetition)
    records, found = [], False
    inputs, measurements = [], []
    for position in positions:
        x = grid.inputs[position]
        measured = measure(x)
        feasible = bool(all_satisfied(measured[None, :], problem.specs)[0])
        records.append(
            IterationRecord(
                0,
                int(grid.ids[position]),
                tuple(float(v) for v in x),
                float(grid.costs[position]),
                tuple(float(v) for v in measured),
                feasible,
            )
        )
        inputs.append(x)
        measurements.append(measured)
        found = found or reached(int(grid.ids[position]), x, feasible)

    dataset = Dataset(inputs, measurements)
    candidates = grid.remove(grid.ids[positions])
    fit_config = FitConfig(
        noise_variance=config.tau**2,
        restarts=config.gp_restarts,
        seed=config.seed,
        input_bounds=problem.bounds,
    )
    batch_config = BatchConfig(
        batch_size=1, pi=config.pi, epsilon=0.0, acquisition=config.acquisition, seed=config.seed
    )

    stop_reason = StopReason.OPTIMUM_FOUND if found else StopReason.MAX_ITERATIONS
    iteration = 0
    models = None
    while not found and iteration < config.max_iterations:
        if len(candidates) == 0:
            stop_reason = StopReason.CANDIDATES_EXHAUSTED
            break
        try:
            models = fit_models(
                dataset, fit_config, warm_starts=None if models is None else [m.params for m in models]
            )
            batch = propose_batch(
                dataset, candidates, problem.specs, problem.objective, batch_config, models, fit_config
            )
        except ProcessBOError as err:
            logger.warning("Repetition %d aborted at iteration %d: %s", repetition, iteration + 1, err)
            stop_reason = StopReason.GP_FAILURE
            break

        iteration += 1
        selection = batch.selections[0]
        x = np.asarray(selection.inputs)
        measured = measure(x)
        feasible = bool(all_satisfied(measured[None, :], problem.specs)[0])
        dataset = incorporate_results(dataset, batch, measured[None, :])
        candidates = candidates.remove([selection.candidate_id])
        records.append(
            IterationRecord(
                iteration,
                selection.candidate_id,
                selection.inputs,
                selection.cost,
                tuple(float(v) for v in measured),
                feasible,
                str(selection.branch),
                selection.fp,
                selection.improvement,
                selection.alpha_fip,
                selection.alpha,
            )
        )
        if reached(selection.candidate_id, x, feasible):
            found = True
            stop_reason = StopReason.OPTIMUM_FOUND

    required = iteration if found else config.max_iterations
    logger.debug(
        "%s %s repetition %d: %s after %d iteration(s)",
        config.problem, config.acquisition, repetition, stop_reason, iteration,
    )
    return RunTrace(config.problem, config.acquisition, config.pi, repetition, records, stop_reason, required)


@dataclass
class AggregateMetrics:
    problem: str
    acquisition: str
    pi: float
    tau: float
    repetitions: int
    mean_required_iterations: float
    feasible_fraction: float
    feasible_fraction_with_init: float
    optimum_found_rate: float
    failed_repetitions: int
    series: list[list[Optional[float]]] = field(repr=False)
    traces: list[RunTrace] = field(repr=False, default_factory=list)

    def to_dict(self) -> dict:
        return {
            "problem": self.problem,
            "acquisition": self.acquisition,
            "pi": self.pi,
            "tau": self.tau,
            "repetitions": self.repetitions,
            "mean_required_iterations": self.mean_required_iterations,
            "feasible_fraction": self.feasible_fraction,
            "feasible_fraction_with_init": self.feasible_fraction_with_init,
            "optimum_found_rate": self.optimum_found_rate,
            "failed_repetitions": self.failed_repetitions,
        }


def _pooled_fraction(traces: Sequence[RunTrace], include_init: bool) -> float:
    evaluated = sum(t.evaluated_count(include_init) for t in traces)
    return sum(t.feasible_count(include_init) for t in traces) / evaluated if evaluated else 0.0


def aggregate(config: RunConfig, traces: Sequence[RunTrace]) -> AggregateMetrics:
    """Means and pooled feasible fractions over repetitions, independent of the order the traces came in"""
    traces = sorted(traces, key=lambda t: t.repetition)
    return AggregateMetrics(
        problem=config.problem,
        acquisition=config.acquisition,
        pi=config.pi,
        tau=config.tau,
        repetitions=len(traces),
        mean_required_iterations=float(np.mean([t.required_iterations for t in traces])),
        feasible_fraction=_pooled_fraction(traces, include_init=False),
        feasible_fraction_with_init=_pooled_fraction(traces, include_init=True),
        optimum_found_rate=float(np.mean([t.stop_reason == StopReason.OPTIMUM_FOUND for t in traces])),
        failed_repetitions=sum(t.stop_reason == StopReason.GP_FAILURE for t in traces),
        series=[t.convergence_series() for t in traces],
        traces=list(traces),
    )


def run_monte_carlo(config: RunConfig, n_jobs: Optional[int] = None) -> AggregateMetrics:
    """Run every repetition of the study, in parallel when `n_jobs` > 1

    Args:
        config (RunConfig): the study settings
        n_jobs (Optional[int], optional): joblib worker count. Defaults to `Config.N_JOBS`.

    Returns:
        AggregateMetrics: the aggregated metrics, with the individual traces attached
    """
    n_jobs = Config.N_JOBS if n_jobs is None else n_jobs
    logger.info(
        "Running %d repetition(s) of %s with %s (pi=%g, tau=%g)",
        config.total_repetitions, config.problem, config.acquisition, config.pi, config.tau,
    )
    traces = Parallel(n_jobs=n_jobs)(
        delayed(run_single)(config, repetition) for repetition in range(config.total_repetitions)
    )
    metrics = aggregate(config, traces)
    logger.info(
        "%s %s: %.2f mean required iterations, %.1f%% feasible samples",
        config.problem, config.acquisition, metrics.mean_required_iterations, 100 * metrics.feasible_fraction,
    )
    return metrics


def compare(
    config: RunConfig, acquisitions: Iterable[str] = ACQUISITIONS, n_jobs: Optional[int] = None
) -> dict[str, AggregateMetrics]:
    """Run the same study with each acquisition on shared initializations and noise"""
    return {acq: run_monte_carlo(config.replace(acquisition=acq), n_jobs) for acq in acquisitions}


def pi_sweep(
    config: RunConfig, pis: Sequence[float] = DEFAULT_PIS, n_jobs: Optional[int] = None
) -> dict[str, AggregateMetrics]:
    """Noiseless study of the switching acquisition for each pi, plus the EI_C reference column

    Returns:
        dict[str, AggregateMetrics]: keyed by the pi value formatted with `:g`, and "eic"
    """
    for pi in pis:
        if not 0 <= pi <= 1:
            raise ValueError(f"pi must lie in [0, 1], got {pi}")
    base = config.replace(tau=0.0, acquisition="alg1")
    results = {f"{pi:g}": run_monte_carlo(base.replace(pi=pi), n_jobs) for pi in pis}
    results["eic"] = run_monte_carlo(base.replace(acquisition="eic"), n_jobs)
    return results


def timing_probe(
    problem_name: str,
    dataset_sizes: Sequence[int] = DEFAULT_TIMING_SIZES,
    grid_count: int = 20000,
    repeats: int = 5,
    candidates: Optional[CandidateSet] = None,
    seed: Optional[int] = None,
) -> dict[int, float]:
    """Median wall-clock seconds of one full iteration: condition the models, score every candidate, select one.

    The hyperparameters are fitted once per dataset size, outside the timed section, as they are between batches.

    Args:
        problem_name (str): the benchmark problem
        dataset_sizes (Sequence[int], optional): dataset sizes to probe. Defaults to (10, 50, 100).
        grid_count (int, optional): grid size when `candidates` is not given. Defaults to 20000.
        repeats (int, optional): timed runs per size. Defaults to 5.
        candidates (Optional[CandidateSet], optional): the candidates to score. Defaults to the problem grid.
        seed (Optional[int], optional): seed of the dataset draw. Defaults to `Config.RANDOM_SEED`.

    Returns:
        dict[int, float]: dataset size to median seconds
    """
    problem = get_problem(problem_name)
    if candidates is None:
        candidates = make_grid(problem, grid_count)
    if len(candidates) == 0:
        raise EmptyCandidateSetError(Message.empty_candidates_error())
    seed = Config.RANDOM_SEED if seed is None else seed
    rng = np.random.default_rng(seed)
    fit_config = FitConfig(restarts=1, seed=seed, input_bounds=problem.bounds)
    timings = {}
    for size in dataset_sizes:
        lower, upper = problem.lower, problem.upper
        inputs = lower + (upper - lower) * rng.random((size, problem.n_dims))
        dataset = Dataset(inputs, problem.constraints(inputs))
        models = fit_models(dataset, fit_config)
        feasible = feasibility_mask(dataset, problem.specs)
        durations = []
        for _ in range(repeats):
            start = time.perf_counter()
            conditioned = [m.condition(dataset.inputs, dataset.targets(k)) for k, m in enumerate(models)]
            incumbent = find_incumbent(dataset, problem.specs, problem.objective, candidates)
            scores = score_candidates(conditioned, candidates, problem.specs, incumbent, 0.6)
            select_candidate(scores, feasible, 0.6)
            durations.append(time.perf_counter() - start)
        timings[size] = statistics.median(durations)
        logger.info("Dataset of %d point(s), %d candidates: %.1f ms", size, len(candidates), 1e3 * timings[size])
    return timings
