"""Status-aware candidate generation

Some processes have a measurement V that depends on both the controllable inputs x_c and an uncontrolled equipment
status which is constant during an experimental session but drifts between sessions (e.g. a gun voltage). Such a
measurement is treated as an extra input column of the dataset. At the start of each session:
    1. a model M_V(x_c) of V is trained on the initialization experiments
    2. one baseline experiment x_c^b from the initialization set is repeated, giving the offset
       delta = V^b - M_V(x_c^b)
    3. every grid point of the controllable space becomes a candidate (x_c, M_V(x_c) + delta)
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.spatial.distance import cdist

from .config import Config
from .exceptions import CalibrationError, CandidateCapError, Message
from .gp import FitConfig, GpModel, PosteriorPrediction, fit_models
from .resources import CandidateSet, Dataset, Objective

logger = logging.getLogger(__name__)


class StatusModel:
    """A GP of the status-dependent measurement over the controllable inputs"""

    def __init__(self, model: GpModel, training_inputs: np.ndarray) -> None:
        self.model = model
        self.training_inputs = np.array(training_inputs, dtype=float, ndmin=2)
        self.training_inputs.setflags(write=False)

    @property
    def n_dims(self) -> int:
        return self.training_inputs.shape[1]

    def predict(self, controllable) -> PosteriorPrediction:
        return self.model.predict(controllable)

    def predict_many(self, controllable) -> np.ndarray:
        means, _ = self.model.predict_many(controllable)
        return means

    def contains(self, controllable) -> bool:
        """Whether the given controllable inputs were part of the training set"""
        controllable = np.asarray(controllable, dtype=float)
        return bool(np.any(np.all(self.training_inputs == controllable, axis=1)))


def fit_status_model(
    dataset: Dataset,
    fit_config: Optional[FitConfig] = None,
    init_count: Optional[int] = None,
) -> StatusModel:
    """Train the status model on the initialization experiments

    Args:
        dataset (Dataset): a dataset whose last input column is the status measurement
        fit_config (Optional[FitConfig], optional): hyperparameter search over the controllable inputs only.
        init_count (Optional[int], optional): the size of the initialization set, which is the head of the dataset.
            Defaults to the whole dataset.

    Returns:
        StatusModel: the fitted model
    """
    if not dataset.has_status:
        raise CalibrationError(Message.status_column_error())
    init = dataset if init_count is None else dataset.head(init_count)
    controllable = init.controllable_inputs
    status_data = Dataset(controllable, init.status[:, None], allow_duplicates=True)
    if fit_config is None:
        fit_config = FitConfig(noise_variance=None)
    model = fit_models(status_data, fit_config)[0]
    logger.debug("Status model fitted on %d initialization point(s): %s", len(init), model)
    return StatusModel(model, controllable)


@dataclass(frozen=True)
class SessionOffset:
    delta: float
    baseline_input: tuple[float, ...]
    baseline_measured: float
    predicted: float

    def to_dict(self) -> dict:
        return {
            "baseline_input": list(self.baseline_input),
            "baseline_measured": self.baseline_measured,
            "predicted": self.predicted,
            "delta": self.delta,
        }

    @staticmethod
    def from_dict(data: dict) -> SessionOffset:
        return SessionOffset(
            float(data["delta"]),
            tuple(float(v) for v in data["baseline_input"]),
            float(data["baseline_measured"]),
            float(data["predicted"]),
        )


def compute_offset(
    model: StatusModel,
    baseline_input,
    baseline_measured: float,
    allow_outside: bool = False,
) -> SessionOffset:
    """Offset between the status measured on a repeated baseline experiment and its model prediction

    Args:
        model (StatusModel): the status model of the initialization set
        baseline_input (array-like): the controllable inputs of the baseline experiment
        baseline_measured (float): the status measured this session
        allow_outside (bool, optional): accept a baseline that is not in the initialization set, with a warning.

    Returns:
        SessionOffset: the offset
    """
    baseline_input = np.asarray(baseline_input, dtype=float).reshape(-1)
    if not model.contains(baseline_input):
        if not allow_outside:
            raise CalibrationError(
                f"The baseline {list(baseline_input)} is not one of the initialization experiments"
            )
        logger.warning(
            "The baseline %s is not one of the initialization experiments, the offset may be biased",
            list(baseline_input),
        )
    predicted = model.predict(baseline_input).mean
    delta = float(baseline_measured) - predicted
    logger.info("Session offset %.6g (measured %.6g, predicted %.6g)", delta, baseline_measured, predicted)
    return SessionOffset(
        delta, tuple(float(v) for v in baseline_input), float(baseline_measured), predicted
    )


@dataclass(frozen=True)
class GridSpec:
    lower: tuple[float, ...]
    upper: tuple[float, ...]
    counts: tuple[int, ...]
    cap: int = field(default_factory=lambda: Config.CANDIDATE_CAP)

    def __post_init__(self) -> None:
        object.__setattr__(self, "lower", tuple(float(v) for v in self.lower))
        object.__setattr__(self, "upper", tuple(float(v) for v in self.upper))
        object.__setattr__(self, "counts", tuple(int(v) for v in self.counts))
        if not len(self.lower) == len(self.upper) == len(self.counts) >= 1:
            raise ValueError("A grid needs one lower bound, upper bound and point count per dimension")
        for lo, hi, n in zip(self.lower, self.upper, self.counts):
            if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
                raise ValueError(f"Invalid grid bounds [{lo}, {hi}]")
            if n < 2:
                raise ValueError("Every grid dimension needs at least 2 points")

    @property
    def n_dims(self) -> int:
        return len(self.counts)

    @property
    def size(self) -> int:
        return int(np.prod(self.counts))

    def points(self) -> np.ndarray:
        """The grid points in row-major order (the last dimension varies fastest)"""
        if self.size > self.cap:
            raise CandidateCapError(Message.candidate_cap_error(self.size, self.cap))
        axes = [np.linspace(lo, hi, n) for lo, hi, n in zip(self.lower, self.upper, self.counts)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.reshape(-1) for m in mesh], axis=1)

    def to_dict(self) -> dict:
        return {
            "lower": list(self.lower),
            "upper": list(self.upper),
            "counts": list(self.counts),
            "cap": self.cap,
        }

    @staticmethod
    def from_dict(data: dict) -> GridSpec:
        return GridSpec(
            tuple(data["lower"]),
            tuple(data["upper"]),
            tuple(data["counts"]),
            int(data.get("cap", Config.CANDIDATE_CAP)),
        )


def generate_candidates(
    grid: GridSpec,
    model: Optional[StatusModel],
    offset: Optional[SessionOffset],
    objective: Objective,
    dataset: Optional[Dataset] = None,
    tolerance: float = 0.0,
) -> CandidateSet:
    """Expand the controllable grid into full candidate vectors

    Args:
        grid (GridSpec): the grid over the controllable inputs
        model (Optional[StatusModel]): the status model, or None when the process has no status measurement
        offset (Optional[SessionOffset]): the session offset. None means no offset.
        objective (Objective): the known cost function over full candidate vectors
        dataset (Optional[Dataset], optional): evaluated points whose controllable inputs are excluded.
        tolerance (float, optional): coordinate tolerance of the exclusion. Defaults to exact matching.

    Returns:
        CandidateSet: the candidates, keeping their grid positions as ids
    """
    controllable = grid.points()
    ids = np.arange(controllable.shape[0])
    if dataset is not None and len(dataset):
        evaluated = dataset.controllable_inputs
        if evaluated.shape[1] != grid.n_dims:
            raise ValueError(
                f"The grid has {grid.n_dims} dimension(s) but the dataset has {evaluated.shape[1]} controllable input(s)"
            )
        distance = cdist(controllable, evaluated, "chebyshev").min(axis=1)
        keep = distance > tolerance
        controllable, ids = controllable[keep], ids[keep]

    if model is None:
        inputs = controllable
    else:
        delta = 0.0 if offset is None else offset.delta
        status = model.predict_many(controllable) + delta
        inputs = np.hstack([controllable, status[:, None]])
    return CandidateSet(inputs, objective(inputs), ids=ids, provenance=objective.name)


def append_baseline(
    dataset: Dataset, offset: SessionOffset, measurements: Sequence[float]
) -> Dataset:
    """Add the baseline experiment of a session to the dataset as a regular evaluated point"""
    inputs = np.array([*offset.baseline_input, offset.baseline_measured])
    return dataset.extend(inputs[None, :], np.asarray(measurements, dtype=float)[None, :])
