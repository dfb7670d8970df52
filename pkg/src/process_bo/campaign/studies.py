"""Simulated campaigns on the synthetic processes

`aps_study` runs a batched campaign that starts from measured-infeasible experiments and recalibrates the status
input at the start of every session while the process drifts. `fdm_study` runs a sequential campaign and lowers the
confidence threshold halfway through, then compares the feasibility probability of the suggestions before and after.
Both drive the same pure session functions as the command line, so a study can be persisted and inspected like any
other campaign.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ..acquisition import find_incumbent
from ..config import Config
from ..exceptions import ConfigError
from ..resources import Dataset, all_satisfied
from .oracle import SyntheticProcessOracle, aps_like, fdm_like, preset_config
from .session import CampaignConfig, SessionState, calibrate, new_session, record, save_session, suggest

logger = logging.getLogger(__name__)

APS_DRIFTS = (2.0, -0.8)


@dataclass
class StudyReport:
    name: str
    batches: int = 0
    terminated: bool = False
    incumbent_trace: list[Optional[float]] = field(default_factory=list)
    feasible_fraction: float = 0.0
    offsets: list[float] = field(default_factory=list)
    phase_fp: dict[str, list[float]] = field(default_factory=dict)
    evaluations: int = 0
    state: Optional[SessionState] = None

    @property
    def best_cost(self) -> Optional[float]:
        return self.incumbent_trace[-1] if self.incumbent_trace else None

    @property
    def feasible_count(self) -> int:
        if self.state is None:
            return 0
        data = self.state.dataset
        return int(all_satisfied(data.observations, self.state.config.constraints).sum())

    def mean_fp(self, phase: str) -> Optional[float]:
        values = self.phase_fp.get(phase, [])
        return float(np.mean(values)) if values else None

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "batches": self.batches,
            "terminated": self.terminated,
            "evaluations": self.evaluations,
            "feasible_count": self.feasible_count,
            "feasible_fraction": self.feasible_fraction,
            "incumbent_trace": self.incumbent_trace,
            "offsets": self.offsets,
            "mean_fp": {phase: self.mean_fp(phase) for phase in self.phase_fp},
        }


def _measured_dataset(
    oracle: SyntheticProcessOracle, inputs: np.ndarray, constraint_count: int
) -> Dataset:
    outputs, status = oracle.measure(inputs)
    if status is not None:
        inputs = np.hstack([inputs, status[:, None]])
    return Dataset(inputs, outputs[:, :constraint_count], has_status=status is not None)


def infeasible_initial_data(
    oracle: SyntheticProcessOracle, config: CampaignConfig, count: int, seed: int
) -> Dataset:
    """Draw uniform random experiments and keep the first `count` whose measurements violate a constraint"""
    rng = np.random.default_rng(seed)
    lower, upper = np.asarray(oracle.lower), np.asarray(oracle.upper)
    kept = []
    for _ in range(100):
        draws = lower + rng.random((4 * count, len(lower))) * (upper - lower)
        outputs, _ = oracle.measure(draws)
        infeasible = ~all_satisfied(outputs, config.constraints)
        kept.extend(draws[infeasible])
        if len(kept) >= count:
            break
    else:
        raise ConfigError(f"Could not draw {count} infeasible experiments from {oracle.name}")
    return _measured_dataset(oracle, np.array(kept[:count]), len(config.constraints))


def _initial_data(oracle: SyntheticProcessOracle, config: CampaignConfig, count: int, seed: int) -> Dataset:
    rng = np.random.default_rng(seed)
    lower, upper = np.asarray(oracle.lower), np.asarray(oracle.upper)
    return _measured_dataset(oracle, lower + rng.random((count, len(lower))) * (upper - lower), len(config.constraints))


def _persist(state: SessionState, session_path: Optional[str]) -> None:
    if session_path is not None:
        save_session(session_path, state)


def _record_batch(
    state: SessionState, oracle: SyntheticProcessOracle, report: StudyReport, phase: str
) -> tuple[SessionState, bool]:
    batch = state.pending
    outputs, status = oracle.measure(batch.candidates)
    report.phase_fp.setdefault(phase, []).extend(s.fp for s in batch.selections)
    state, outcome = record(state, outputs, status)
    report.batches += 1
    incumbent = outcome["incumbent"]
    report.incumbent_trace.append(None if incumbent is None else incumbent["best_feasible_cost"])
    return state, outcome["terminate"]


def _finish(report: StudyReport, state: SessionState) -> StudyReport:
    report.state = state
    report.evaluations = len(state.dataset)
    report.feasible_fraction = report.feasible_count / max(report.evaluations, 1)
    objective = state.config.build_objective()
    incumbent = find_incumbent(state.dataset, state.config.constraints, objective)
    logger.info(
        "%s: %d batch(es), %s, best feasible cost %s",
        report.name,
        report.batches,
        "terminated" if report.terminated else "stopped at the batch cap",
        incumbent.best_feasible_cost if incumbent.has_feasible else "none",
    )
    return report


def aps_study(
    init_count: int = 86,
    drifts: Sequence[float] = APS_DRIFTS,
    seed: Optional[int] = None,
    session_path: Optional[str] = None,
    max_batches: Optional[int] = None,
) -> StudyReport:
    """Batched campaign on the APS-like process, recalibrating the status input before every batch

    Args:
        init_count (int, optional): number of measured-infeasible initial experiments. Defaults to 86.
        drifts (Sequence[float], optional): status drift of successive sessions, cycled. Defaults to (2.0, -0.8).
        seed (Optional[int], optional): seed of the initial design and of the process noise. Defaults to Config.
        session_path (Optional[str], optional): persist the session after every step. Defaults to None.
        max_batches (Optional[int], optional): override of the batch cap of the preset.

    Returns:
        StudyReport: the outcome of the campaign
    """
    seed = Config.RANDOM_SEED if seed is None else seed
    document = preset_config("aps")
    if max_batches is not None:
        document["batch"]["max_batches"] = max_batches
    config = CampaignConfig.from_dict(document)
    process = aps_like(seed=seed)
    initial = infeasible_initial_data(process, config, init_count, seed)
    state = new_session(config, initial)
    _persist(state, session_path)

    report = StudyReport("aps")
    baseline = initial.controllable_inputs[0]
    for index in range(config.batch.max_batches):
        session = process.with_drift(drifts[index % len(drifts)])
        outputs, status = session.measure(baseline)
        state = calibrate(state, baseline, float(status[0]), outputs[0])
        report.offsets.append(state.offset.delta)
        state, _ = suggest(state)
        _persist(state, session_path)
        state, terminate = _record_batch(state, session, report, "pi")
        _persist(state, session_path)
        if terminate:
            report.terminated = True
            break
    return _finish(report, state)


def fdm_study(
    init_count: int = 7,
    switch_at: int = 16,
    pis: tuple[float, float] = (0.4, 0.1),
    seed: Optional[int] = None,
    session_path: Optional[str] = None,
    max_batches: Optional[int] = None,
) -> StudyReport:
    """Sequential campaign on the FDM-like process that lowers the confidence threshold once the dataset holds
    `switch_at` experiments

    The report's `phase_fp` keeps the feasibility probability of every suggestion under the keys "before" and "after".
    """
    seed = Config.RANDOM_SEED if seed is None else seed
    document = preset_config("fdm")
    document["batch"]["pi"] = pis[0]
    if max_batches is not None:
        document["batch"]["max_batches"] = max_batches
    config = CampaignConfig.from_dict(document)
    process = fdm_like(seed=seed)
    state = new_session(config, _initial_data(process, config, init_count, seed))
    _persist(state, session_path)

    report = StudyReport("fdm", phase_fp={"before": [], "after": []})
    for _ in range(config.batch.max_batches):
        switched = len(state.dataset) >= switch_at
        state, _ = suggest(state, pi=pis[1] if switched else None)
        _persist(state, session_path)
        state, terminate = _record_batch(state, process, report, "after" if switched else "before")
        _persist(state, session_path)
        if terminate:
            report.terminated = True
            break
    return _finish(report, state)


STUDIES = {"aps": aps_study, "fdm": fdm_study}
