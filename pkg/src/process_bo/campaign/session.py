"""Persistent human-in-the-loop campaigns

A campaign alternates between suggesting a batch of experiments and recording their measurements. Its whole state
lives in one JSON session file: the campaign config, the dataset, the session offset, the pending batch and an
append-only history with one event per state transition. The dataset can always be rebuilt from the history alone.

The functions taking a `SessionState` are pure and return a new state; the `campaign_*` functions wrap them with
loading, locking and atomic saving of a session file.
"""

from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from ..acquisition import feasibility_mask, find_incumbent
from ..batch import BatchConfig, ProposedBatch, check_termination, incorporate_results, propose_batch
from ..calibration import (
    GridSpec,
    SessionOffset,
    StatusModel,
    append_baseline,
    compute_offset,
    fit_status_model,
    generate_candidates,
)
from ..config import Config
from ..exceptions import (
    CalibrationError,
    ConfigError,
    Message,
    NoPendingBatchError,
    PendingBatchError,
    SessionExistsError,
)
from ..gp import FitConfig, fit_models
from ..resources import CandidateSet, ConstraintSpec, Dataset, Objective
from ..resources.dataset import stack_measurements
from .objectives import build_objective
from .storage import read_json, session_lock, write_json_atomic

logger = logging.getLogger(__name__)

SESSION_VERSION = 1


@dataclass(frozen=True)
class InputSpec:
    name: str
    lower: float
    upper: float
    points: int = 2

    def __post_init__(self) -> None:
        if not (np.isfinite(self.lower) and np.isfinite(self.upper) and self.lower < self.upper):
            raise ConfigError(f"Input {self.name} needs finite bounds with lower < upper")

    def to_dict(self) -> dict:
        return {"name": self.name, "lower": self.lower, "upper": self.upper, "points": self.points}

    @staticmethod
    def from_dict(data: dict) -> InputSpec:
        return InputSpec(
            str(data["name"]), float(data["lower"]), float(data["upper"]), int(data.get("points", 2))
        )


@dataclass(frozen=True)
class CampaignConfig:
    name: str
    inputs: tuple[InputSpec, ...]
    constraints: tuple[ConstraintSpec, ...]
    objective: dict
    batch: BatchConfig = field(default_factory=BatchConfig)
    status: Optional[InputSpec] = None
    gp: dict = field(default_factory=dict)
    candidate_cap: int = field(default_factory=lambda: Config.CANDIDATE_CAP)
    append_baseline: bool = True
    synthetic: Optional[str] = None

    def __post_init__(self) -> None:
        if not self.inputs:
            raise ConfigError("A campaign needs at least one controllable input")
        if not self.constraints:
            raise ConfigError("A campaign needs at least one constraint")
        self.build_objective()
        grid = self.grid()
        if grid.size > self.candidate_cap:
            raise ConfigError(Message.candidate_cap_error(grid.size, self.candidate_cap))

    @property
    def has_status(self) -> bool:
        return self.status is not None

    @property
    def n_controllable(self) -> int:
        return len(self.inputs)

    @property
    def n_dims(self) -> int:
        return self.n_controllable + (1 if self.has_status else 0)

    def build_objective(self) -> Objective:
        return build_objective(self.objective, self.n_controllable)

    def grid(self) -> GridSpec:
        try:
            return GridSpec(
                tuple(i.lower for i in self.inputs),
                tuple(i.upper for i in self.inputs),
                tuple(i.points for i in self.inputs),
                self.candidate_cap,
            )
        except ValueError as err:
            raise ConfigError(str(err)) from err

    def fit_config(self) -> FitConfig:
        """Constraint models: learnt noise, inputs scaled by the declared bounds (status column included)"""
        bounds = [(i.lower, i.upper) for i in self.inputs]
        if self.status is not None:
            bounds.append((self.status.lower, self.status.upper))
        return FitConfig(
            noise_variance=None,
            restarts=int(self.gp.get("restarts", Config.GP_RESTARTS)),
            seed=int(self.gp.get("seed", Config.RANDOM_SEED)),
            input_bounds=tuple(bounds),
        )

    def status_fit_config(self) -> FitConfig:
        return self.fit_config().replace(input_bounds=tuple((i.lower, i.upper) for i in self.inputs))

    def header(self) -> list[str]:
        names = [i.name for i in self.inputs]
        if self.status is not None:
            names.append(self.status.name)
        return names + [c.name or f"c{k + 1}" for k, c in enumerate(self.constraints)]

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "synthetic": self.synthetic,
            "inputs": [i.to_dict() for i in self.inputs],
            "status": None if self.status is None else self.status.to_dict(),
            "constraints": [c.to_dict() for c in self.constraints],
            "objective": self.objective,
            "batch": self.batch.to_dict(),
            "gp": self.gp,
            "candidate_cap": self.candidate_cap,
            "append_baseline": self.append_baseline,
        }

    @staticmethod
    def from_dict(data: dict) -> CampaignConfig:
        try:
            return CampaignConfig(
                name=str(data.get("name", "campaign")),
                inputs=tuple(InputSpec.from_dict(i) for i in data["inputs"]),
                constraints=tuple(ConstraintSpec.from_dict(c) for c in data["constraints"]),
                objective=dict(data["objective"]),
                batch=BatchConfig.from_dict(data.get("batch", {})),
                status=None if not data.get("status") else InputSpec.from_dict(data["status"]),
                gp=dict(data.get("gp", {})),
                candidate_cap=int(data.get("candidate_cap", Config.CANDIDATE_CAP)),
                append_baseline=bool(data.get("append_baseline", True)),
                synthetic=data.get("synthetic"),
            )
        except ConfigError:
            raise
        except (KeyError, TypeError, ValueError) as err:
            raise ConfigError(f"Malformed campaign config: {err}") from err


def load_initial_data(config: CampaignConfig, data, base_dir: str = ".") -> Dataset:
    """Initial experiments from a CSV path (relative to the config file) or an inline
    `{"inputs": [...], "observations": [...]}` document
    """
    if data is None:
        return Dataset.empty(config.n_dims, len(config.constraints), config.has_status)
    try:
        if isinstance(data, str):
            dataset = Dataset.from_csv(os.path.join(base_dir, data))
        else:
            dataset = Dataset(
                np.array(data["inputs"], dtype=float).reshape(-1, config.n_dims),
                np.array(data["observations"], dtype=float).reshape(-1, len(config.constraints)),
                has_status=config.has_status,
            )
    except (KeyError, ValueError) as err:
        raise ConfigError(f"Invalid initial data: {err}") from err
    if dataset.n_dims != config.n_dims or dataset.constraint_count != len(config.constraints):
        raise ConfigError(
            f"The initial data has {dataset.n_dims} input(s) and {dataset.constraint_count} constraint(s), "
            f"the config declares {config.n_dims} and {len(config.constraints)}"
        )
    if dataset.has_status != config.has_status:
        raise ConfigError("The initial data and the config disagree on the status column")
    stack_measurements(dataset.observations, dataset.constraint_count)
    return dataset


@dataclass(frozen=True)
class SessionState:
    config: CampaignConfig
    dataset: Dataset
    init_count: int
    pi: float
    offset: Optional[SessionOffset] = None
    pending: Optional[ProposedBatch] = None
    history: tuple[dict, ...] = ()

    def with_event(self, event: dict, **changes) -> SessionState:
        event = {"index": len(self.history), **event}
        return replace(self, history=self.history + (event,), **changes)

    def status_model(self) -> Optional[StatusModel]:
        if not self.config.has_status:
            return None
        return fit_status_model(self.dataset, self.config.status_fit_config(), self.init_count)

    def candidates(self, status_model: Optional[StatusModel] = None) -> CandidateSet:
        """The grid of candidates not evaluated yet, contextualized with the current offset"""
        if self.config.has_status and status_model is None:
            status_model = self.status_model()
        return generate_candidates(
            self.config.grid(),
            status_model,
            self.offset,
            self.config.build_objective(),
            dataset=self.dataset,
        )

    def to_dict(self) -> dict:
        return {
            "version": SESSION_VERSION,
            "config": self.config.to_dict(),
            "dataset": self.dataset.to_dict(),
            "init_count": self.init_count,
            "pi": self.pi,
            "offset": None if self.offset is None else self.offset.to_dict(),
            "pending": None if self.pending is None else self.pending.to_dict(),
            "history": list(self.history),
        }

    @staticmethod
    def from_dict(data: dict) -> SessionState:
        return SessionState(
            config=CampaignConfig.from_dict(data["config"]),
            dataset=Dataset.from_dict(data["dataset"]),
            init_count=int(data["init_count"]),
            pi=float(data["pi"]),
            offset=None if data.get("offset") is None else SessionOffset.from_dict(data["offset"]),
            pending=None if data.get("pending") is None else ProposedBatch.from_dict(data["pending"]),
            history=tuple(data.get("history", [])),
        )


def new_session(config: CampaignConfig, initial: Optional[Dataset] = None) -> SessionState:
    initial = initial if initial is not None else load_initial_data(config, None)
    state = SessionState(config, initial, len(initial), config.batch.pi)
    logger.info("Campaign %s started with %d initial experiment(s)", config.name, len(initial))
    return state.with_event({"event": "init", "dataset": initial.to_dict()})


def calibrate(
    state: SessionState,
    baseline_input: Sequence[float],
    baseline_measured: float,
    measurements: Optional[Sequence[float]] = None,
    allow_outside: bool = False,
) -> SessionState:
    """Start a new experimental session from a repeated baseline experiment

    Args:
        state (SessionState): the campaign
        baseline_input (Sequence[float]): controllable inputs of the baseline, one of the initialization experiments
        baseline_measured (float): the status measured on the baseline this session
        measurements (Optional[Sequence[float]], optional): the baseline's constraint measurements, appended to the
            dataset when the config enables it. Defaults to None.
        allow_outside (bool, optional): accept a baseline outside the initialization set. Defaults to False.

    Returns:
        SessionState: the campaign with the new offset
    """
    if not state.config.has_status:
        raise CalibrationError(Message.status_column_error())
    if state.pending is not None:
        raise PendingBatchError(Message.pending_batch_error())
    offset = compute_offset(state.status_model(), baseline_input, baseline_measured, allow_outside)
    dataset = state.dataset
    appended = None
    if measurements is not None and state.config.append_baseline:
        row = stack_measurements([measurements], len(state.config.constraints))[0]
        candidate = np.array([*offset.baseline_input, offset.baseline_measured])
        if not dataset.contains(candidate):
            dataset = append_baseline(dataset, offset, row)
            appended = {"inputs": candidate.tolist(), "observations": row.tolist()}
    return state.with_event(
        {"event": "calibrate", "offset": offset.to_dict(), "appended": appended},
        offset=offset,
        dataset=dataset,
    )


def suggest(
    state: SessionState, batch_size: Optional[int] = None, pi: Optional[float] = None
) -> tuple[SessionState, ProposedBatch]:
    """Propose the next batch and keep it pending

    Args:
        state (SessionState): the campaign
        batch_size (Optional[int], optional): override of the batch size for this suggestion only.
        pi (Optional[float], optional): new confidence threshold, kept for every later suggestion.

    Returns:
        tuple[SessionState, ProposedBatch]: the campaign with the pending batch, and the batch
    """
    if state.pending is not None:
        raise PendingBatchError(Message.pending_batch_error())
    current_pi = state.pi
    if pi is not None and pi != state.pi:
        logger.info("Confidence threshold changed from %g to %g", state.pi, pi)
        current_pi = pi
    try:
        config = state.config.batch.replace(
            pi=current_pi, batch_size=batch_size or state.config.batch.batch_size
        )
    except ValueError as err:
        raise ConfigError(str(err)) from err
    if state.config.has_status and state.offset is None:
        logger.warning("No session offset has been measured, candidates assume no drift")

    candidates = state.candidates()
    fit_config = state.config.fit_config()
    models = fit_models(state.dataset, fit_config)
    batch = propose_batch(
        state.dataset, candidates, state.config.constraints, state.config.build_objective(), config, models, fit_config
    )
    logger.info(
        "Suggested %d experiment(s) with pi=%g, FIP %s",
        len(batch), current_pi, ", ".join(f"{fip:.3f}" for fip in batch.selection_fips),
    )
    new_state = state.with_event(
        {
            "event": "suggest",
            "batch_size": config.batch_size,
            "pi": current_pi,
            "candidate_ids": batch.candidate_ids,
        },
        pending=batch,
        pi=current_pi,
    )
    return new_state, batch


def record(
    state: SessionState, measurements, status: Optional[Sequence[float]] = None
) -> tuple[SessionState, dict]:
    """Add the measurements of the pending batch to the dataset

    Args:
        state (SessionState): the campaign, with a pending batch
        measurements (array-like): one row of constraint measurements per pending candidate, in order
        status (Optional[Sequence[float]], optional): the measured status of each candidate. Defaults to the
            predicted status of the candidates.

    Returns:
        tuple[SessionState, dict]: the campaign and a report with the incumbent and the termination recommendation
    """
    if state.pending is None:
        raise NoPendingBatchError(Message.no_pending_batch_error())
    batch = state.pending
    dataset = incorporate_results(state.dataset, batch, measurements, status)
    added = dataset.inputs[len(state.dataset):]
    observations = dataset.observations[len(state.dataset):]
    terminate = check_termination(batch, state.config.batch.epsilon)
    new_state = state.with_event(
        {
            "event": "record",
            "candidate_ids": batch.candidate_ids,
            "inputs": added.tolist(),
            "observations": observations.tolist(),
            "selection_fips": batch.selection_fips,
            "terminate": terminate,
        },
        dataset=dataset,
        pending=None,
    )
    incumbent = find_incumbent(dataset, state.config.constraints, state.config.build_objective())
    report = {
        "recorded": len(batch),
        "incumbent": incumbent.to_dict() if incumbent.has_feasible else None,
        "terminate": terminate,
    }
    logger.info(
        "Recorded %d experiment(s); incumbent %s; %s",
        len(batch),
        incumbent.best_feasible_cost if incumbent.has_feasible else "none",
        "stopping is recommended" if terminate else "continue",
    )
    return new_state, report


def abandon(state: SessionState) -> SessionState:
    """Discard the pending batch, e.g. after failed experiments. The history keeps a trace of it."""
    if state.pending is None:
        raise NoPendingBatchError(Message.no_pending_batch_error())
    logger.info("Abandoned a batch of %d experiment(s)", len(state.pending))
    return state.with_event(
        {"event": "abandon", "candidate_ids": state.pending.candidate_ids}, pending=None
    )


def replay_dataset(history: Sequence[dict]) -> Dataset:
    """Rebuild the dataset from the event history alone"""
    dataset = None
    for event in history:
        kind = event["event"]
        if kind == "init":
            dataset = Dataset.from_dict(event["dataset"])
        elif kind == "calibrate" and event.get("appended"):
            dataset = dataset.extend([event["appended"]["inputs"]], [event["appended"]["observations"]])
        elif kind == "record" and event["inputs"]:
            dataset = dataset.extend(event["inputs"], event["observations"])
    if dataset is None:
        raise ValueError("The history has no init event")
    return dataset


def status_summary(state: SessionState) -> dict:
    """Read-only summary of a campaign"""
    config = state.config
    objective = config.build_objective()
    incumbent = find_incumbent(state.dataset, config.constraints, objective)
    feasible = feasibility_mask(state.dataset, config.constraints)
    records = [e for e in state.history if e["event"] == "record"]
    last_fips = records[-1]["selection_fips"] if records else None
    return {
        "name": config.name,
        "synthetic": config.synthetic,
        "objective": objective.description,
        "columns": config.header(),
        "evaluations": len(state.dataset),
        "initial_experiments": state.init_count,
        "feasible": int(feasible.sum()),
        "feasible_fraction": float(feasible.mean()) if feasible.size else 0.0,
        "incumbent": incumbent.to_dict() if incumbent.has_feasible else None,
        "pi": state.pi,
        "epsilon": config.batch.epsilon,
        "batches_recorded": len(records),
        "pending": None if state.pending is None else state.pending.to_dict(),
        "last_batch_fips": last_fips,
        "terminate": bool(records[-1]["terminate"]) if records else False,
        "offset": None if state.offset is None else state.offset.to_dict(),
    }


def format_summary(summary: dict) -> str:
    lines = [f"Campaign: {summary['name']}"]
    if summary["synthetic"]:
        lines[0] += f" (synthetic process: {summary['synthetic']})"
    lines.append(f"Objective: {summary['objective']}")
    lines.append(
        f"Evaluations: {summary['evaluations']} ({summary['initial_experiments']} initial), "
        f"{summary['feasible']} feasible ({100 * summary['feasible_fraction']:.1f}%)"
    )
    incumbent = summary["incumbent"]
    if incumbent is None:
        lines.append("Incumbent: none (no feasible experiment yet)")
    else:
        lines.append(f"Incumbent: cost {incumbent['best_feasible_cost']:.6g} at {incumbent['best_feasible_input']}")
    lines.append(f"pi = {summary['pi']:g}, epsilon = {summary['epsilon']:g}")
    if summary["offset"] is not None:
        lines.append(f"Session offset: {summary['offset']['delta']:+.4g}")
    if summary["pending"] is not None:
        lines.append(f"Pending batch: {len(summary['pending']['selections'])} experiment(s)")
    if summary["last_batch_fips"] is not None:
        fips = ", ".join(f"{fip:.3f}" for fip in summary["last_batch_fips"])
        lines.append(f"Last batch FIP: {fips}")
        lines.append("Stopping is recommended" if summary["terminate"] else "Continue optimizing")
    return "\n".join(lines)


def load_session(path: str) -> SessionState:
    return SessionState.from_dict(read_json(path))


def save_session(path: str, state: SessionState) -> None:
    write_json_atomic(path, state.to_dict())


def campaign_init(config_path: str, session_path: str, force: bool = False) -> SessionState:
    """Create a session file from a campaign config file"""
    if os.path.exists(session_path) and not force:
        raise SessionExistsError(Message.session_exists_error(session_path))
    with open(config_path, "r", encoding="utf-8") as f:
        try:
            document = json.load(f)
        except json.JSONDecodeError as err:
            raise ConfigError(f"{config_path} is not valid JSON: {err}") from err
    config = CampaignConfig.from_dict(document)
    initial = load_initial_data(
        config, document.get("initial_data"), os.path.dirname(os.path.abspath(config_path))
    )
    state = new_session(config, initial)
    with session_lock(session_path):
        save_session(session_path, state)
    return state


def _mutate(session_path: str, operation):
    with session_lock(session_path):
        state = load_session(session_path)
        result = operation(state)
        new_state = result[0] if isinstance(result, tuple) else result
        save_session(session_path, new_state)
    return result


def campaign_calibrate(
    session_path: str,
    baseline_input: Sequence[float],
    baseline_measured: float,
    measurements: Optional[Sequence[float]] = None,
    allow_outside: bool = False,
) -> SessionState:
    return _mutate(
        session_path,
        lambda s: calibrate(s, baseline_input, baseline_measured, measurements, allow_outside),
    )


def campaign_suggest(
    session_path: str, batch_size: Optional[int] = None, pi: Optional[float] = None
) -> tuple[SessionState, ProposedBatch]:
    return _mutate(session_path, lambda s: suggest(s, batch_size, pi))


def campaign_record(
    session_path: str, measurements, status: Optional[Sequence[float]] = None
) -> tuple[SessionState, dict]:
    return _mutate(session_path, lambda s: record(s, measurements, status))


def campaign_abandon(session_path: str) -> SessionState:
    return _mutate(session_path, abandon)


def campaign_status(session_path: str) -> dict:
    return status_summary(load_session(session_path))
