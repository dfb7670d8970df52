"""Closed-form campaign objectives, built from the descriptor stored in the campaign config

A descriptor is a dict with a `name` from `OBJECTIVES` plus that objective's parameters. Indices refer to columns of
the candidate vectors, so a status column appended after the controllable inputs is never part of the cost.
"""

from typing import Callable

import numpy as np

from ..exceptions import ConfigError
from ..resources import Objective


def _indices(descriptor: dict, n_dims: int) -> list[int]:
    indices = [int(i) for i in descriptor.get("indices", range(n_dims))]
    if not indices or any(not 0 <= i < n_dims for i in indices):
        raise ConfigError(f"Objective indices {indices} must refer to the {n_dims} controllable input(s)")
    return indices


def _weights(descriptor: dict, count: int) -> np.ndarray:
    weights = np.asarray(descriptor.get("weights", [1.0] * count), dtype=float)
    if weights.shape != (count,):
        raise ConfigError(f"Expected {count} objective weight(s), got {weights.shape[0]}")
    return weights


def _linear(descriptor: dict, n_dims: int) -> tuple[Callable, str]:
    indices = _indices(descriptor, n_dims)
    weights = _weights(descriptor, len(indices))
    offset = float(descriptor.get("offset", 0.0))

    def cost(x: np.ndarray) -> np.ndarray:
        return offset + x[:, indices] @ weights

    terms = " + ".join(f"{w:g} x{i + 1}" for w, i in zip(weights, indices))
    return cost, f"{offset:g} + {terms}"


def _stress_index(descriptor: dict, n_dims: int) -> tuple[Callable, str]:
    """offset + sum_i w_i x_i^p, a smooth positive wear index of the controllable inputs it names"""
    indices = _indices(descriptor, n_dims)
    weights = _weights(descriptor, len(indices))
    offset = float(descriptor.get("offset", 0.0))
    power = float(descriptor.get("power", 1.5))
    if np.any(weights < 0) or offset < 0:
        raise ConfigError("A stress index needs non-negative weights and offset")

    def cost(x: np.ndarray) -> np.ndarray:
        return offset + np.abs(x[:, indices]) ** power @ weights

    terms = " + ".join(f"{w:g} |x{i + 1}|^{power:g}" for w, i in zip(weights, indices))
    return cost, f"{offset:g} + {terms}"


def _print_time(descriptor: dict, n_dims: int) -> tuple[Callable, str]:
    """volume / (speed * rate): the time to deposit a fixed volume"""
    speed = int(descriptor.get("speed_index", 0))
    rate = int(descriptor.get("rate_index", 1))
    volume = float(descriptor.get("volume", 1.0))
    _indices({"indices": [speed, rate]}, n_dims)
    if volume <= 0:
        raise ConfigError("The printed volume must be positive")

    def cost(x: np.ndarray) -> np.ndarray:
        return volume / (x[:, speed] * x[:, rate])

    return cost, f"{volume:g} / (x{speed + 1} x{rate + 1})"


OBJECTIVES = {
    "linear": _linear,
    "stress_index": _stress_index,
    "print_time": _print_time,
}


def build_objective(descriptor: dict, n_dims: int) -> Objective:
    """Create the objective described by `descriptor` over vectors with `n_dims` controllable inputs"""
    name = descriptor.get("name")
    if name not in OBJECTIVES:
        raise ConfigError(f"Unknown objective {name}, expected one of {sorted(OBJECTIVES)}")
    func, formula = OBJECTIVES[name](descriptor, n_dims)
    params = {k: v for k, v in descriptor.items() if k != "name"}
    return Objective(name, func, params=params, description=formula)
