"""Scoring candidates for constrained optimization with a known objective.

The objective S(x) is deterministic, so the improvement a candidate would bring is known exactly and only the
constraints are uncertain. Every acquisition here is built from two numbers per candidate:
    - the improvement I(x) = max(0, S(x+) - S(x)) over the incumbent x+
    - the feasibility probability FP(x), the product over constraints of the posterior mass inside each window

Selection follows the switching rule: while no feasible point is known, or while no candidate is confident enough,
the most probably feasible improving candidate is taken (FIP); otherwise the best trade-off between improvement and
confidence above the threshold `pi` is taken (HFI).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np
import pandas as pd
from scipy.stats import norm

from .exceptions import EmptyCandidateSetError, Message
from .gp import GpModel, PosteriorPrediction
from .resources import CandidateSet, ConstraintSpec, Dataset, Objective, all_satisfied

logger = logging.getLogger(__name__)

ACQUISITIONS = ("alg1", "eic")


class Branch(Enum):
    FIP_NO_FEASIBLE = "fip-no-feasible"
    HFI = "hfi"
    FIP_LOW_CONFIDENCE = "fip-low-confidence"
    EIC = "eic"
    EIC_NO_FEASIBLE = "eic-no-feasible"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Incumbent:
    best_feasible_cost: float
    best_feasible_input: Optional[tuple[float, ...]]
    fallback_cost: float

    @property
    def has_feasible(self) -> bool:
        return self.best_feasible_input is not None

    def to_dict(self) -> dict:
        return {
            "best_feasible_cost": self.best_feasible_cost,
            "best_feasible_input": None
            if self.best_feasible_input is None
            else list(self.best_feasible_input),
            "fallback_cost": self.fallback_cost,
        }


def feasibility_mask(dataset: Dataset, specs: Sequence[ConstraintSpec]) -> np.ndarray:
    """Which evaluated points are feasible, judged on their measured (possibly noisy) values"""
    if len(dataset) == 0:
        return np.zeros(0, dtype=bool)
    return all_satisfied(dataset.observations, specs)


def find_incumbent(
    dataset: Dataset,
    specs: Sequence[ConstraintSpec],
    objective: Objective,
    candidates: Optional[CandidateSet] = None,
) -> Incumbent:
    """The lowest-cost feasible point of the dataset, or the fallback cost when there is none.

    The fallback is one more than the largest cost over the candidates and the evaluated points.

    Args:
        dataset (Dataset): evaluated points
        specs (Sequence[ConstraintSpec]): one spec per constraint
        objective (Objective): the known cost function
        candidates (Optional[CandidateSet], optional): the current candidate set. Defaults to None.

    Returns:
        Incumbent: the incumbent
    """
    evaluated_costs = objective(dataset.inputs) if len(dataset) else np.empty(0)
    pooled = [evaluated_costs]
    if candidates is not None:
        pooled.append(candidates.costs)
    pooled = np.concatenate(pooled)
    fallback = float(pooled.max()) + 1 if pooled.size else 1.0

    feasible = feasibility_mask(dataset, specs)
    if not feasible.any():
        return Incumbent(fallback, None, fallback)
    masked = np.where(feasible, evaluated_costs, np.inf)
    best = int(np.argmin(masked))
    return Incumbent(
        float(evaluated_costs[best]), tuple(float(v) for v in dataset.inputs[best]), fallback
    )


def improvement(candidate_cost, incumbent: Incumbent):
    """max(0, S(x+) - S(x)), elementwise over array inputs"""
    value = np.maximum(0.0, incumbent.best_feasible_cost - np.asarray(candidate_cost, dtype=float))
    return float(value) if value.ndim == 0 else value


def feasibility_probabilities(
    means: np.ndarray, variances: np.ndarray, specs: Sequence[ConstraintSpec]
) -> np.ndarray:
    """Vectorized feasibility probability

    Args:
        means (np.ndarray): posterior means, shape (constraints, points)
        variances (np.ndarray): latent posterior variances, same shape
        specs (Sequence[ConstraintSpec]): one spec per constraint

    Returns:
        np.ndarray: the probability that every constraint holds, one value per point
    """
    means = np.atleast_2d(np.asarray(means, dtype=float))
    stds = np.sqrt(np.atleast_2d(np.asarray(variances, dtype=float)))
    if means.shape[0] != len(specs):
        raise ValueError(f"Expected predictions for {len(specs)} constraint(s), got {means.shape[0]}")
    probability = np.ones(means.shape[1])
    for spec, mu, sigma in zip(specs, means, stds):
        upper = norm.cdf((spec.upper - mu) / sigma)
        if spec.lower is not None:
            upper = upper - norm.cdf((spec.lower - mu) / sigma)
        probability *= np.clip(upper, 0.0, 1.0)
    return probability


def feasibility_probability(
    predictions: Sequence[PosteriorPrediction], specs: Sequence[ConstraintSpec]
) -> float:
    means = np.array([[p.mean] for p in predictions])
    variances = np.array([[p.variance] for p in predictions])
    return float(feasibility_probabilities(means, variances, specs)[0])


def alpha_fip(fp, i):
    """FP * sgn(I), with sgn(0) = 0"""
    value = np.asarray(fp, dtype=float) * (np.asarray(i, dtype=float) > 0)
    return float(value) if value.ndim == 0 else value


def alpha_hfi(fp, i, pi: float):
    value = (np.asarray(fp, dtype=float) - pi) * np.asarray(i, dtype=float)
    return float(value) if value.ndim == 0 else value


def alpha_eic(fp, i):
    value = np.asarray(fp, dtype=float) * np.asarray(i, dtype=float)
    return float(value) if value.ndim == 0 else value


@dataclass(frozen=True)
class AcquisitionScores:
    candidate_ids: np.ndarray
    costs: np.ndarray
    improvement: np.ndarray
    fp: np.ndarray
    alpha_fip: np.ndarray
    alpha_hfi: np.ndarray
    alpha_eic: np.ndarray
    pi: float

    @staticmethod
    def from_values(
        candidate_ids, costs, improvements, fps, pi: float
    ) -> AcquisitionScores:
        improvements = np.asarray(improvements, dtype=float)
        fps = np.asarray(fps, dtype=float)
        return AcquisitionScores(
            np.asarray(candidate_ids, dtype=int),
            np.asarray(costs, dtype=float),
            improvements,
            fps,
            np.asarray(alpha_fip(fps, improvements)).reshape(-1),
            np.asarray(alpha_hfi(fps, improvements, pi)).reshape(-1),
            np.asarray(alpha_eic(fps, improvements)).reshape(-1),
            pi,
        )

    def __len__(self) -> int:
        return self.fp.shape[0]

    def to_frame(self, branch: Optional[Branch] = None) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "candidate_id": self.candidate_ids,
                "S": self.costs,
                "I": self.improvement,
                "FP": self.fp,
                "alpha_fip": self.alpha_fip,
                "alpha_hfi": self.alpha_hfi,
                "alpha_eic": self.alpha_eic,
                "branch": str(branch or ""),
            }
        )

    def to_csv(self, path: str, branch: Optional[Branch] = None) -> None:
        self.to_frame(branch).to_csv(path, index=False)


def score_candidates(
    models: Sequence[GpModel],
    candidates: CandidateSet,
    specs: Sequence[ConstraintSpec],
    incumbent: Incumbent,
    pi: float,
    improvements: Optional[np.ndarray] = None,
) -> AcquisitionScores:
    """Compute I, FP and every acquisition value over the candidate set

    Args:
        models (Sequence[GpModel]): one model per constraint
        candidates (CandidateSet): the candidates to score
        specs (Sequence[ConstraintSpec]): one spec per constraint
        incumbent (Incumbent): the current incumbent
        pi (float): the confidence threshold
        improvements (Optional[np.ndarray], optional): precomputed improvements. Defaults to None.

    Returns:
        AcquisitionScores: the scores, in candidate order
    """
    if improvements is None:
        improvements = improvement(candidates.costs, incumbent)
    if len(candidates) == 0:
        fps = np.empty(0)
    else:
        predictions = [model.predict_many(candidates.inputs) for model in models]
        means = np.array([p[0] for p in predictions])
        variances = np.array([p[1] for p in predictions])
        fps = feasibility_probabilities(means, variances, specs)
    return AcquisitionScores.from_values(
        candidates.ids, candidates.costs, np.asarray(improvements).reshape(-1), fps, pi
    )


@dataclass(frozen=True)
class Selection:
    index: int
    branch: Branch

    def score(self, scores: AcquisitionScores) -> float:
        """The value of the acquisition the selection maximized"""
        if self.branch is Branch.HFI:
            return float(scores.alpha_hfi[self.index])
        if self.branch is Branch.EIC:
            return float(scores.alpha_eic[self.index])
        return float(scores.alpha_fip[self.index])


def select_candidate(
    scores: AcquisitionScores,
    dataset_feasibility,
    pi: float,
    acquisition: str = "alg1",
) -> Selection:
    """Pick the next candidate to evaluate. Ties go to the lowest candidate index.

    With `acquisition="eic"` the expected constrained improvement FP * I is maximized once a feasible point is known,
    and FIP is maximized before that.

    Args:
        scores (AcquisitionScores): the scores of every candidate
        dataset_feasibility (array-like of bool): which evaluated points are feasible
        pi (float): the confidence threshold
        acquisition (str, optional): "alg1" for the switching rule or "eic". Defaults to "alg1".

    Returns:
        Selection: the position of the chosen candidate in `scores` and the branch that chose it
    """
    if len(scores) == 0:
        raise EmptyCandidateSetError(Message.empty_candidates_error())
    if acquisition not in ACQUISITIONS:
        raise ValueError(f"Unknown acquisition {acquisition}, expected one of {ACQUISITIONS}")
    has_feasible = bool(np.any(dataset_feasibility))

    if acquisition == "eic":
        if not has_feasible:
            selection = Selection(int(np.argmax(scores.alpha_fip)), Branch.EIC_NO_FEASIBLE)
        else:
            selection = Selection(int(np.argmax(scores.alpha_eic)), Branch.EIC)
    elif not has_feasible:
        selection = Selection(int(np.argmax(scores.alpha_fip)), Branch.FIP_NO_FEASIBLE)
    elif np.any(scores.alpha_fip > pi):
        selection = Selection(int(np.argmax(scores.alpha_hfi)), Branch.HFI)
    else:
        selection = Selection(int(np.argmax(scores.alpha_fip)), Branch.FIP_LOW_CONFIDENCE)

    logger.debug(
        "Selected candidate %d via %s (FP %.4g, I %.4g)",
        scores.candidate_ids[selection.index],
        selection.branch,
        scores.fp[selection.index],
        scores.improvement[selection.index],
    )
    return selection
