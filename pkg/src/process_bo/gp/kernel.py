"""Squared-exponential kernel with one lengthscale per input dimension (ARD)"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.spatial.distance import cdist


@dataclass(frozen=True)
class KernelParams:
    lengthscales: tuple[float, ...]
    signal_variance: float
    noise_variance: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "lengthscales", tuple(float(v) for v in np.atleast_1d(self.lengthscales))
        )
        if not all(ls > 0 for ls in self.lengthscales):
            raise ValueError(f"Lengthscales must be positive, got {self.lengthscales}")
        if not self.signal_variance > 0:
            raise ValueError(f"Signal variance must be positive, got {self.signal_variance}")
        if not self.noise_variance >= 0:
            raise ValueError(f"Noise variance must be non-negative, got {self.noise_variance}")

    @staticmethod
    def default(n_dims: int, noise_variance: float = 0.0) -> KernelParams:
        """The untrained hyperparameters: unit lengthscales and unit signal variance"""
        return KernelParams((1.0,) * n_dims, 1.0, noise_variance)

    @property
    def n_dims(self) -> int:
        return len(self.lengthscales)

    def to_dict(self) -> dict:
        return {
            "lengthscales": list(self.lengthscales),
            "signal_variance": self.signal_variance,
            "noise_variance": self.noise_variance,
        }

    @staticmethod
    def from_dict(data: dict) -> KernelParams:
        return KernelParams(
            tuple(data["lengthscales"]),
            float(data["signal_variance"]),
            float(data.get("noise_variance", 0.0)),
        )


def se_ard(
    a: np.ndarray, b: np.ndarray, lengthscales: Sequence[float], signal_variance: float
) -> np.ndarray:
    """Covariance matrix k(a_i, b_j) = s^2 exp(-0.5 sum_d (a_id - b_jd)^2 / l_d^2)

    Args:
        a (np.ndarray): points of shape (n, dims)
        b (np.ndarray): points of shape (m, dims)
        lengthscales (Sequence[float]): one lengthscale per dimension
        signal_variance (float): the kernel amplitude s^2

    Returns:
        np.ndarray: the (n, m) covariance matrix
    """
    ls = np.asarray(lengthscales, dtype=float)
    sq = cdist(np.asarray(a, dtype=float) / ls, np.asarray(b, dtype=float) / ls, "sqeuclidean")
    return signal_variance * np.exp(-0.5 * sq)


def squared_differences(a: np.ndarray) -> np.ndarray:
    """Per-dimension squared differences between all pairs of rows, shape (dims, n, n)"""
    a = np.asarray(a, dtype=float)
    return (a.T[:, :, None] - a.T[:, None, :]) ** 2
