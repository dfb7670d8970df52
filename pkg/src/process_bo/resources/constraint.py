"""Constraint windows applied to measured process outputs

`ConstraintSpec` covers both forms used by the optimizer:
    - one-sided, `c(x) <= upper`
    - interval, `lower <= c(x) <= upper`, for property windows on a single measured quantity
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np


class ConstraintKind(Enum):
    UPPER = "one-sided-upper"
    INTERVAL = "interval"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class ConstraintSpec:
    """A single constraint k on the measured value of output k"""

    upper: float
    lower: Optional[float] = None
    name: str = ""

    def __post_init__(self) -> None:
        if not math.isfinite(self.upper):
            raise ValueError("The upper bound of a constraint must be finite")
        if self.lower is not None and not self.lower < self.upper:
            raise ValueError(
                f"An interval constraint requires lower < upper, got [{self.lower}, {self.upper}]"
            )

    @property
    def kind(self) -> ConstraintKind:
        return ConstraintKind.UPPER if self.lower is None else ConstraintKind.INTERVAL

    def satisfied(self, value):
        """Check whether the value(s) given respect this constraint

        Args:
            value (float | np.ndarray): measured value(s) of the constrained output

        Returns:
            bool | np.ndarray: True where the constraint holds
        """
        value = np.asarray(value, dtype=float)
        ok = value <= self.upper
        if self.lower is not None:
            ok &= value >= self.lower
        return bool(ok) if ok.ndim == 0 else ok

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "kind": str(self.kind),
            "lower": self.lower,
            "upper": self.upper,
        }

    @staticmethod
    def from_dict(data: dict) -> ConstraintSpec:
        lower = data.get("lower")
        return ConstraintSpec(
            upper=float(data["upper"]),
            lower=None if lower is None else float(lower),
            name=data.get("name", ""),
        )


def all_satisfied(values: np.ndarray, specs: Sequence[ConstraintSpec]) -> np.ndarray:
    """Row-wise check that every constraint holds

    Args:
        values (np.ndarray): measurements of shape (points, constraints)
        specs (Sequence[ConstraintSpec]): one spec per column

    Returns:
        np.ndarray: boolean array of shape (points,)
    """
    values = np.atleast_2d(np.asarray(values, dtype=float))
    if values.shape[1] != len(specs):
        raise ValueError(
            f"Expected {len(specs)} constraint column(s), got {values.shape[1]}"
        )
    ok = np.ones(values.shape[0], dtype=bool)
    for k, spec in enumerate(specs):
        ok &= spec.satisfied(values[:, k])
    return ok
