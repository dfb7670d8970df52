"""Synthetic processes standing in for physical experiments

Each output is a smooth response surface over the controllable inputs scaled to [0, 1]: a baseline, a linear trend
and a sum of Gaussian bumps. An optional status output models an equipment-dependent measurement whose value is
shifted by the drift of the current session. Measurement noise is seeded by the inputs themselves, so measuring the
same point twice in the same session gives the same values.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np


@dataclass(frozen=True)
class RadialBump:
    center: tuple[float, ...]
    width: float
    height: float

    def __call__(self, unit: np.ndarray) -> np.ndarray:
        sq = np.sum((unit - np.asarray(self.center)) ** 2, axis=1)
        return self.height * np.exp(-0.5 * sq / self.width**2)


@dataclass(frozen=True)
class ResponseSurface:
    baseline: float
    linear: tuple[float, ...] = ()
    quadratic: tuple[float, ...] = ()
    bumps: tuple[RadialBump, ...] = ()

    def __call__(self, unit: np.ndarray) -> np.ndarray:
        value = np.full(unit.shape[0], self.baseline)
        if self.linear:
            value = value + unit @ np.asarray(self.linear)
        if self.quadratic:
            value = value + unit**2 @ np.asarray(self.quadratic)
        for bump in self.bumps:
            value = value + bump(unit)
        return value


@dataclass(frozen=True)
class SyntheticProcessOracle:
    name: str
    lower: tuple[float, ...]
    upper: tuple[float, ...]
    outputs: tuple[ResponseSurface, ...]
    noise: tuple[float, ...]
    status: Optional[ResponseSurface] = None
    status_noise: float = 0.0
    drift: float = 0.0
    seed: int = 0

    @property
    def n_controllable(self) -> int:
        return len(self.lower)

    @property
    def has_status(self) -> bool:
        return self.status is not None

    def with_drift(self, drift: float) -> SyntheticProcessOracle:
        return replace(self, drift=drift)

    def _unit(self, controllable) -> np.ndarray:
        controllable = np.array(controllable, dtype=float, ndmin=2)[:, : self.n_controllable]
        return (controllable - np.asarray(self.lower)) / (np.asarray(self.upper) - np.asarray(self.lower))

    def true_outputs(self, controllable) -> np.ndarray:
        unit = self._unit(controllable)
        return np.stack([surface(unit) for surface in self.outputs], axis=1)

    def true_status(self, controllable) -> np.ndarray:
        if self.status is None:
            raise ValueError(f"The process {self.name} has no status output")
        return self.status(self._unit(controllable)) + self.drift

    def _rng(self, x: np.ndarray) -> np.random.Generator:
        return np.random.default_rng([self.seed, zlib.crc32(np.ascontiguousarray(x).tobytes())])

    def measure(self, controllable) -> tuple[np.ndarray, Optional[np.ndarray]]:
        """Noisy measurements of every output, and of the status when there is one

        Args:
            controllable (array-like): controllable inputs, shape (points, n_controllable). Extra columns are ignored.

        Returns:
            tuple[np.ndarray, Optional[np.ndarray]]: outputs of shape (points, outputs), and the status values
        """
        controllable = np.array(controllable, dtype=float, ndmin=2)[:, : self.n_controllable]
        outputs = self.true_outputs(controllable)
        status = self.true_status(controllable) if self.has_status else None
        for row, x in enumerate(controllable):
            rng = self._rng(x)
            outputs[row] += rng.normal(0.0, 1.0, outputs.shape[1]) * np.asarray(self.noise)
            if status is not None:
                status[row] += rng.normal(0.0, self.status_noise)
        return outputs, status

    def __call__(self, candidates) -> np.ndarray:
        outputs, _ = self.measure(candidates)
        return outputs


def aps_like(drift: float = 0.0, seed: int = 0) -> SyntheticProcessOracle:
    """Six spray parameters to microhardness and porosity, with the gun voltage as status.

    Inputs: current (A), argon (slpm), hydrogen (slpm), carrier gas (slpm), powder feed (g/min), spray distance (mm).
    """
    center = (0.6, 0.5, 0.6, 0.5, 0.5, 0.4)
    return SyntheticProcessOracle(
        name="aps_like",
        lower=(400.0, 30.0, 2.0, 2.0, 15.0, 80.0),
        upper=(700.0, 60.0, 14.0, 6.0, 45.0, 160.0),
        outputs=(
            ResponseSurface(
                600.0, (50.0, 0.0, 30.0, 0.0, 20.0, -25.0), bumps=(RadialBump(center, 0.3, 15.0),)
            ),
            ResponseSurface(
                10.0, (-3.0, 0.0, -2.0, 0.0, -1.0, 2.5), bumps=(RadialBump(center, 0.3, -1.0),)
            ),
        ),
        noise=(2.0, 0.1),
        status=ResponseSurface(55.0, (10.0, 8.0, 12.0, 0.0, 0.0, 0.0), quadratic=(-2.0, 0.0, -3.0, 0.0, 0.0, 0.0)),
        status_noise=0.05,
        drift=drift,
        seed=seed,
    )


def fdm_like(seed: int = 0) -> SyntheticProcessOracle:
    """Print speed (mm/s) and extrusion rate multiplier to surface roughness (um)"""
    return SyntheticProcessOracle(
        name="fdm_like",
        lower=(20.0, 0.8),
        upper=(80.0, 1.2),
        outputs=(
            ResponseSurface(
                6.4, (0.0, -3.2), quadratic=(6.0, 4.0), bumps=(RadialBump((0.3, 0.7), 0.15, 1.5),)
            ),
        ),
        noise=(0.3,),
        seed=seed,
    )


PRESETS = {"aps": aps_like, "fdm": fdm_like}


def preset_config(name: str) -> dict:
    """A campaign config document matching one of the synthetic presets (no initial data)"""
    if name == "aps":
        oracle = aps_like()
        names = ["current", "argon", "hydrogen", "carrier_gas", "powder_feed", "spray_distance"]
        return {
            "name": "aps-like synthetic campaign",
            "synthetic": "aps",
            "inputs": [
                {"name": n, "lower": lo, "upper": hi, "points": 4}
                for n, lo, hi in zip(names, oracle.lower, oracle.upper)
            ],
            "status": {"name": "voltage", "lower": 50.0, "upper": 90.0},
            "constraints": [
                {"name": "microhardness", "lower": 635.0, "upper": 675.0},
                {"name": "porosity", "lower": 6.0, "upper": 8.2},
            ],
            "objective": {
                "name": "stress_index",
                "indices": [0, 2],
                "weights": [0.005, 2.0],
                "offset": 20.0,
                "power": 1.5,
            },
            "batch": {"batch_size": 5, "pi": 0.4, "epsilon": 0.05, "max_batches": 50},
            "gp": {"restarts": 3},
            "append_baseline": True,
        }
    if name == "fdm":
        oracle = fdm_like()
        return {
            "name": "fdm-like synthetic campaign",
            "synthetic": "fdm",
            "inputs": [
                {"name": "speed", "lower": oracle.lower[0], "upper": oracle.upper[0], "points": 21},
                {"name": "extrusion_rate", "lower": oracle.lower[1], "upper": oracle.upper[1], "points": 21},
            ],
            "constraints": [{"name": "roughness", "upper": 10.0}],
            "objective": {"name": "print_time", "speed_index": 0, "rate_index": 1, "volume": 6000.0},
            "batch": {"batch_size": 1, "pi": 0.4, "epsilon": 0.05, "max_batches": 50},
            "gp": {"restarts": 3},
        }
    raise ValueError(f"Unknown preset {name}, expected one of {sorted(PRESETS)}")
