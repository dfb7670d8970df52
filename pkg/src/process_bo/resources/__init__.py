"""This module contains the data classes shared by every stage of the optimizer.

These are:
    - `Dataset`, the evaluated inputs and their measured constraint values
    - `CandidateSet`, the unevaluated inputs and their known costs
    - `ConstraintSpec`, a one-sided or interval window on one measured output
    - `Objective`, the known deterministic cost function
"""

from .dataset import Dataset
from .candidates import CandidateSet
from .constraint import ConstraintSpec, ConstraintKind, all_satisfied
from .objective import Objective

__all__ = [
    "Dataset",
    "CandidateSet",
    "ConstraintSpec",
    "ConstraintKind",
    "all_satisfied",
    "Objective",
]
