from __future__ import annotations

from typing import Callable, Optional

import numpy as np


class Objective:
    """A known, deterministic cost S(x) that can be computed freely for any input vector.

    The wrapped function must be vectorized: it receives an array of shape (points, dims) and returns one cost per row
    """

    def __init__(
        self,
        name: str,
        func: Callable[[np.ndarray], np.ndarray],
        params: Optional[dict] = None,
        description: str = "",
    ) -> None:
        """
        Args:
            name (str): identifier of the closed-form objective (its provenance)
            func (Callable[[np.ndarray], np.ndarray]): vectorized cost function
            params (Optional[dict], optional): parameters the function was built with. Defaults to None.
            description (str, optional): human readable formula. Defaults to "".
        """
        self.name = name
        self.func = func
        self.params = params or {}
        self.description = description

    def __call__(self, inputs) -> np.ndarray:
        inputs = np.asarray(inputs, dtype=float)
        if inputs.ndim == 1:
            inputs = inputs[None, :]
        if inputs.shape[0] == 0:
            return np.empty(0)
        costs = np.asarray(self.func(inputs), dtype=float).reshape(-1)
        if not np.all(np.isfinite(costs)):
            raise ValueError(f"Objective {self.name} returned non-finite costs")
        return costs

    def to_dict(self) -> dict:
        return {"name": self.name, "params": self.params, "description": self.description}

    def __repr__(self) -> str:
        return f"Objective {self.name} {self.params}"
