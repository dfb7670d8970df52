"""Fixed-size batch proposals with fantasy observations, and the propose/evaluate/incorporate loop built on them.

Within a batch, each selected candidate is temporarily added to a virtual copy of the dataset with the posterior
predictions of the constraint models as its observations, so the next selection sees a reduced uncertainty around it.
The fantasies are discarded as soon as the real measurements arrive.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Sequence

import numpy as np

from .acquisition import (
    ACQUISITIONS,
    Branch,
    Incumbent,
    feasibility_mask,
    find_incumbent,
    improvement,
    score_candidates,
    select_candidate,
)
from .config import Config
from .exceptions import EmptyCandidateSetError, MeasurementError, Message
from .gp import FitConfig, GpModel, fit_models
from .resources import CandidateSet, ConstraintSpec, Dataset, Objective
from .resources.dataset import stack_measurements

logger = logging.getLogger(__name__)

FANTASIES = ("mean", "sample")


@dataclass(frozen=True)
class BatchConfig:
    batch_size: int = 1
    pi: float = 0.6
    epsilon: float = 0.05
    max_batches: int = 50
    acquisition: str = "alg1"
    fantasy: str = "mean"
    refit_in_fantasy: bool = False
    seed: int = field(default_factory=lambda: Config.RANDOM_SEED)

    def __post_init__(self) -> None:
        if self.batch_size < 1:
            raise ValueError("The batch size must be at least 1")
        if not 0 <= self.pi <= 1:
            raise ValueError(f"pi must lie in [0, 1], got {self.pi}")
        if not 0 <= self.epsilon <= 1:
            raise ValueError(f"epsilon must lie in [0, 1], got {self.epsilon}")
        if self.max_batches < 0:
            raise ValueError("max_batches must be non-negative")
        if self.acquisition not in ACQUISITIONS:
            raise ValueError(f"Unknown acquisition {self.acquisition}, expected one of {ACQUISITIONS}")
        if self.fantasy not in FANTASIES:
            raise ValueError(f"Unknown fantasy mode {self.fantasy}, expected one of {FANTASIES}")

    def replace(self, **changes) -> BatchConfig:
        values = self.to_dict()
        values.update(changes)
        return BatchConfig(**values)

    def to_dict(self) -> dict:
        return {name: getattr(self, name) for name in self.__dataclass_fields__}

    @staticmethod
    def from_dict(data: dict) -> BatchConfig:
        known = {k: v for k, v in data.items() if k in BatchConfig.__dataclass_fields__}
        return BatchConfig(**known)


@dataclass(frozen=True)
class BatchSelection:
    """One candidate of a batch, with the diagnostics recorded when it was selected"""

    candidate_id: int
    inputs: tuple[float, ...]
    cost: float
    improvement: float
    fp: float
    alpha_fip: float
    alpha: float
    branch: Branch
    fantasy_means: tuple[float, ...]

    def to_dict(self) -> dict:
        return {
            "candidate_id": self.candidate_id,
            "inputs": list(self.inputs),
            "cost": self.cost,
            "improvement": self.improvement,
            "fp": self.fp,
            "alpha_fip": self.alpha_fip,
            "alpha": self.alpha,
            "branch": str(self.branch),
            "fantasy_means": list(self.fantasy_means),
        }

    @staticmethod
    def from_dict(data: dict) -> BatchSelection:
        return BatchSelection(
            int(data["candidate_id"]),
            tuple(float(v) for v in data["inputs"]),
            float(data["cost"]),
            float(data["improvement"]),
            float(data["fp"]),
            float(data["alpha_fip"]),
            float(data["alpha"]),
            Branch(data["branch"]),
            tuple(float(v) for v in data["fantasy_means"]),
        )


@dataclass(frozen=True)
class ProposedBatch:
    selections: tuple[BatchSelection, ...]
    batch_size: int
    exhausted: bool = False

    @property
    def candidates(self) -> np.ndarray:
        if not self.selections:
            return np.empty((0, 0))
        return np.array([s.inputs for s in self.selections])

    @property
    def candidate_ids(self) -> list[int]:
        return [s.candidate_id for s in self.selections]

    @property
    def selection_fips(self) -> list[float]:
        return [s.alpha_fip for s in self.selections]

    @property
    def selection_branches(self) -> list[Branch]:
        return [s.branch for s in self.selections]

    def __len__(self) -> int:
        return len(self.selections)

    def to_dict(self) -> dict:
        return {
            "selections": [s.to_dict() for s in self.selections],
            "batch_size": self.batch_size,
            "exhausted": self.exhausted,
        }

    @staticmethod
    def from_dict(data: dict) -> ProposedBatch:
        return ProposedBatch(
            tuple(BatchSelection.from_dict(s) for s in data["selections"]),
            int(data["batch_size"]),
            bool(data.get("exhausted", False)),
        )


class VirtualDataset:
    """The real dataset extended with fantasy observations"""

    def __init__(self, dataset: Dataset) -> None:
        self.real = dataset
        self.dataset = Dataset(
            dataset.inputs,
            dataset.observations,
            has_status=dataset.has_status,
            allow_duplicates=True,
        )
        self.fantasy_count = 0

    def add(self, inputs, fantasies) -> None:
        self.dataset = self.dataset.extend(
            np.asarray(inputs, dtype=float)[None, :], np.asarray(fantasies, dtype=float)[None, :]
        )
        self.fantasy_count += 1

    def real_part(self) -> Dataset:
        return self.dataset.head(len(self.dataset) - self.fantasy_count)


def propose_batch(
    dataset: Dataset,
    candidates: CandidateSet,
    specs: Sequence[ConstraintSpec],
    objective: Objective,
    config: BatchConfig,
    models: Optional[Sequence[GpModel]] = None,
    fit_config: Optional[FitConfig] = None,
) -> ProposedBatch:
    """Select up to `config.batch_size` distinct candidates using fantasy observations

    The incumbent and the improvements are computed once from the real data. Between selections the constraint models
    are conditioned on the virtual dataset with their hyperparameters frozen, unless `config.refit_in_fantasy` is set.

    Args:
        dataset (Dataset): the real evaluated points, left untouched
        candidates (CandidateSet): the unevaluated candidates
        specs (Sequence[ConstraintSpec]): one spec per constraint
        objective (Objective): the known cost function
        config (BatchConfig): batch settings
        models (Optional[Sequence[GpModel]], optional): models already fitted to `dataset`. Fitted here if None.
        fit_config (Optional[FitConfig], optional): hyperparameter search settings. Defaults to FitConfig().

    Returns:
        ProposedBatch: the batch, shorter than requested only if the candidates ran out
    """
    if len(candidates) == 0:
        raise EmptyCandidateSetError(Message.empty_candidates_error())
    if models is None:
        models = fit_models(dataset, fit_config)
    models = list(models)

    incumbent = find_incumbent(dataset, specs, objective, candidates)
    improvements = improvement(candidates.costs, incumbent)
    improvements = np.asarray(improvements).reshape(-1)
    feasible = feasibility_mask(dataset, specs)

    virtual = VirtualDataset(dataset)
    remaining = np.ones(len(candidates), dtype=bool)
    rng = np.random.default_rng(config.seed)
    selections = []
    exhausted = False

    for inner in range(config.batch_size):
        if not remaining.any():
            exhausted = True
            logger.warning(
                "The candidate set ran out after %d of %d selections", inner, config.batch_size
            )
            break
        if inner > 0:
            if config.refit_in_fantasy:
                models = fit_models(
                    virtual.dataset, fit_config, warm_starts=[m.params for m in models]
                )
            else:
                models = [
                    m.condition(virtual.dataset.inputs, virtual.dataset.targets(k))
                    for k, m in enumerate(models)
                ]

        positions = np.flatnonzero(remaining)
        active = candidates.subset(remaining)
        scores = score_candidates(
            models, active, specs, incumbent, config.pi, improvements[remaining]
        )
        selection = select_candidate(scores, feasible, config.pi, config.acquisition)
        chosen = active.inputs[selection.index]

        predictions = [m.predict(chosen) for m in models]
        if config.fantasy == "sample":
            fantasy = [rng.normal(p.mean, p.std) for p in predictions]
        else:
            fantasy = [p.mean for p in predictions]
        virtual.add(chosen, fantasy)
        remaining[positions[selection.index]] = False

        selections.append(
            BatchSelection(
                candidate_id=int(active.ids[selection.index]),
                inputs=tuple(float(v) for v in chosen),
                cost=float(scores.costs[selection.index]),
                improvement=float(scores.improvement[selection.index]),
                fp=float(scores.fp[selection.index]),
                alpha_fip=float(scores.alpha_fip[selection.index]),
                alpha=selection.score(scores),
                branch=selection.branch,
                fantasy_means=tuple(float(p.mean) for p in predictions),
            )
        )

    return ProposedBatch(tuple(selections), config.batch_size, exhausted)


def check_termination(batch: ProposedBatch, epsilon: float) -> bool:
    """True when at least half of the batch was selected with FIP below `epsilon`"""
    if len(batch) == 0:
        raise ValueError("Cannot judge termination on an empty batch")
    below = sum(fip < epsilon for fip in batch.selection_fips)
    return below >= math.ceil(len(batch) / 2)


def incorporate_results(
    dataset: Dataset,
    batch: ProposedBatch,
    measurements,
    status: Optional[Sequence[float]] = None,
) -> Dataset:
    """Extend the real dataset with the measured batch

    Args:
        dataset (Dataset): the real dataset the batch was proposed on
        batch (ProposedBatch): the evaluated batch
        measurements (array-like): one row of constraint measurements per batch candidate
        status (Optional[Sequence[float]], optional): measured status values that replace the predicted status
            column of the candidates. Defaults to None.

    Returns:
        Dataset: the extended dataset
    """
    width = dataset.constraint_count
    try:
        rows = np.asarray(measurements, dtype=float)
    except ValueError:
        raise MeasurementError(Message.measurement_shape_error(width)) from None
    if rows.ndim < 2:
        rows = rows.reshape(-1, width) if rows.size % width == 0 else rows.reshape(1, -1)
    count = rows.shape[0] if rows.size else 0
    if rows.size and rows.shape[1] != width:
        raise MeasurementError(
            f"Expected {width} measurement(s) per candidate, got {rows.shape[1]}"
        )
    if count != len(batch):
        raise MeasurementError(Message.measurement_count_error(len(batch), count))
    if len(batch) == 0:
        return dataset
    values = stack_measurements(rows, dataset.constraint_count)
    inputs = batch.candidates.copy()
    if status is not None:
        if not dataset.has_status:
            raise MeasurementError(Message.status_column_error())
        status = np.asarray(status, dtype=float).reshape(-1)
        if status.shape[0] != len(batch):
            raise MeasurementError(Message.measurement_count_error(len(batch), status.shape[0]))
        if not np.all(np.isfinite(status)):
            raise MeasurementError(Message.non_finite_measurement_error())
        inputs[:, -1] = status
    return dataset.extend(inputs, values)


class RunStatus(Enum):
    TERMINATED = "terminated"
    MAX_BATCHES = "max-batches"
    CANDIDATES_EXHAUSTED = "candidates-exhausted"
    NO_FEASIBLE_MINIMIZER = "no-feasible-minimizer"

    def __str__(self) -> str:
        return self.value


@dataclass
class TerminationResult:
    dataset: Dataset
    stop_reason: RunStatus
    incumbent: Incumbent
    batches: list[ProposedBatch]
    trace: list[dict]

    @property
    def status(self) -> RunStatus:
        return self.stop_reason if self.incumbent.has_feasible else RunStatus.NO_FEASIBLE_MINIMIZER

    @property
    def evaluated_batches(self) -> int:
        return sum(1 for record in self.trace if record["inner_index"] == 0 and "measured_values" in record)


def trace_records(
    batch: ProposedBatch, batch_index: int, measurements: Optional[np.ndarray] = None
) -> list[dict]:
    records = []
    for inner, selection in enumerate(batch.selections):
        record = {
            "batch_index": batch_index,
            "inner_index": inner,
            "candidate_id": selection.candidate_id,
            "candidate": list(selection.inputs),
            "S": selection.cost,
            "I": selection.improvement,
            "FP": selection.fp,
            "alpha_fip": selection.alpha_fip,
            "alpha": selection.alpha,
            "branch": str(selection.branch),
            "fantasy_means": list(selection.fantasy_means),
        }
        if measurements is not None:
            record["measured_values"] = [float(v) for v in measurements[inner]]
        records.append(record)
    return records


def write_trace(path: str, records: Sequence[dict]) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for record in records:
            f.write(json.dumps(record) + "\n")


def run_to_termination(
    dataset: Dataset,
    candidates: CandidateSet,
    specs: Sequence[ConstraintSpec],
    objective: Objective,
    config: BatchConfig,
    oracle: Callable[[np.ndarray], np.ndarray],
    fit_config: Optional[FitConfig] = None,
    trace_path: Optional[str] = None,
) -> TerminationResult:
    """Propose, evaluate and incorporate batches until the termination rule fires.

    The batch on which the rule fires is recorded in the trace but not evaluated. The loop also stops after
    `config.max_batches` evaluated batches, or when the candidates run out.

    Args:
        dataset (Dataset): the initial evaluated points
        candidates (CandidateSet): the unevaluated candidates
        specs (Sequence[ConstraintSpec]): one spec per constraint
        objective (Objective): the known cost function
        config (BatchConfig): batch settings
        oracle (Callable[[np.ndarray], np.ndarray]): evaluates a (points, dims) array of candidates and returns their
            (points, constraints) measurements
        fit_config (Optional[FitConfig], optional): hyperparameter search settings. Defaults to FitConfig().
        trace_path (Optional[str], optional): where to write the JSON-lines trace. Defaults to None.

    Returns:
        TerminationResult: the final dataset, the incumbent, the stop reason and the full trace
    """
    fit_config = fit_config or FitConfig()
    trace, batches = [], []
    models = fit_models(dataset, fit_config)
    batch_index = 0
    stop_reason = RunStatus.CANDIDATES_EXHAUSTED

    while len(candidates) > 0:
        batch = propose_batch(dataset, candidates, specs, objective, config, models, fit_config)
        batches.append(batch)
        if check_termination(batch, config.epsilon):
            trace.extend(trace_records(batch, batch_index))
            stop_reason = RunStatus.TERMINATED
            break
        if batch_index >= config.max_batches:
            trace.extend(trace_records(batch, batch_index))
            stop_reason = RunStatus.MAX_BATCHES
            break

        measurements = np.asarray(oracle(batch.candidates), dtype=float).reshape(
            len(batch), dataset.constraint_count
        )
        dataset = incorporate_results(dataset, batch, measurements)
        candidates = candidates.remove(batch.candidate_ids)
        trace.extend(trace_records(batch, batch_index, measurements))
        incumbent = find_incumbent(dataset, specs, objective, candidates)
        logger.info(
            "Batch %d evaluated: %d point(s), incumbent cost %s",
            batch_index,
            len(batch),
            incumbent.best_feasible_cost if incumbent.has_feasible else "none",
        )
        batch_index += 1
        models = fit_models(dataset, fit_config, warm_starts=[m.params for m in models])

    if len(candidates) == 0:
        logger.warning("The candidate set is exhausted after %d batch(es)", batch_index)
    if trace_path is not None:
        write_trace(trace_path, trace)
    incumbent = find_incumbent(dataset, specs, objective, candidates)
    return TerminationResult(dataset, stop_reason, incumbent, batches, trace)
