from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from .objective import Objective


class CandidateSet:
    """The finite set of unevaluated input vectors the optimizer chooses from, together with their known costs.

    Each candidate keeps a stable integer id for its whole life, so traces stay readable after candidates have been
    removed. The `costs` column and the `provenance` string form the objective table of the set
    """

    def __init__(
        self,
        inputs,
        costs,
        ids: Optional[Sequence[int]] = None,
        provenance: str = "",
    ) -> None:
        inputs = np.array(inputs, dtype=float, ndmin=2)
        costs = np.array(costs, dtype=float).reshape(-1)
        if costs.shape[0] != inputs.shape[0]:
            raise ValueError(
                f"Every candidate needs exactly one cost: {inputs.shape[0]} candidate(s), {costs.shape[0]} cost(s)"
            )
        if not np.all(np.isfinite(costs)):
            raise ValueError("Candidate costs must be finite")
        ids = np.arange(inputs.shape[0]) if ids is None else np.asarray(ids, dtype=int)
        if ids.shape[0] != inputs.shape[0]:
            raise ValueError("Every candidate needs exactly one id")

        self.inputs = inputs
        self.costs = costs
        self.ids = ids
        self.provenance = provenance
        for array in (self.inputs, self.costs, self.ids):
            array.setflags(write=False)

    @staticmethod
    def from_objective(
        inputs, objective: Objective, ids: Optional[Sequence[int]] = None
    ) -> CandidateSet:
        """Build a candidate set, computing each candidate's cost with the given objective

        Args:
            inputs (array-like): candidate vectors, shape (candidates, dims)
            objective (Objective): the known cost function
            ids (Optional[Sequence[int]], optional): stable ids. Defaults to positions.

        Returns:
            CandidateSet: the candidate set
        """
        inputs = np.array(inputs, dtype=float, ndmin=2)
        return CandidateSet(inputs, objective(inputs), ids=ids, provenance=objective.name)

    @property
    def n_dims(self) -> int:
        return self.inputs.shape[1]

    def position(self, candidate_id: int) -> int:
        matches = np.flatnonzero(self.ids == candidate_id)
        if matches.size == 0:
            raise KeyError(f"No candidate with id {candidate_id}")
        return int(matches[0])

    def remove(self, candidate_ids: Sequence[int]) -> CandidateSet:
        """Create a new candidate set without the given ids"""
        keep = ~np.isin(self.ids, np.asarray(candidate_ids, dtype=int))
        return self.subset(keep)

    def subset(self, mask) -> CandidateSet:
        return CandidateSet(
            self.inputs[mask],
            self.costs[mask],
            ids=self.ids[mask],
            provenance=self.provenance,
        )

    def __len__(self) -> int:
        return self.inputs.shape[0]

    def __eq__(self, other: CandidateSet) -> bool:
        return (
            isinstance(other, CandidateSet)
            and np.array_equal(self.inputs, other.inputs)
            and np.array_equal(self.costs, other.costs)
            and np.array_equal(self.ids, other.ids)
        )

    def __repr__(self) -> str:
        return f"CandidateSet({len(self)} candidates, {self.n_dims} dims, {self.provenance or 'unnamed objective'})"
