"""The set of evaluated experiments: input vectors paired with one measurement per constraint.

When the process has a status-dependent measurement (see `process_bo.calibration`), it is stored as the last input
column and named `v` in CSV files. Datasets are never mutated; every extension returns a new `Dataset`.
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np
import pandas as pd

from ..exceptions import MeasurementError, Message


class Dataset:
    def __init__(
        self,
        inputs,
        observations,
        has_status: bool = False,
        allow_duplicates: bool = False,
    ) -> None:
        """Creates a dataset from evaluated inputs and the corresponding constraint measurements

        Args:
            inputs (array-like): input vectors, shape (points, dims)
            observations (array-like): measurements, shape (points, constraints)
            has_status (bool, optional): whether the last input column is a status measurement. Defaults to False.
            allow_duplicates (bool, optional): accept bitwise identical input vectors. Defaults to False.
        """
        inputs = np.array(inputs, dtype=float, ndmin=2)
        observations = np.array(observations, dtype=float)
        if observations.ndim == 1 and observations.size:
            # a flat list is one value per point (single constraint) or one point's measurements
            observations = observations.reshape(inputs.shape[0], -1)
        observations = np.array(observations, ndmin=2)
        if inputs.shape[1] < 1:
            raise ValueError("Input vectors must have at least one dimension")
        if observations.shape[0] != inputs.shape[0]:
            raise ValueError(
                f"Got {inputs.shape[0]} input vector(s) but {observations.shape[0]} observation row(s)"
            )
        if has_status and inputs.shape[1] < 2:
            raise ValueError("A status column needs at least one controllable input beside it")

        self.inputs = inputs
        self.observations = observations
        self.has_status = has_status
        self.allow_duplicates = allow_duplicates
        self.inputs.setflags(write=False)
        self.observations.setflags(write=False)

        if not allow_duplicates and _has_duplicate_rows(inputs):
            raise ValueError("The dataset contains bitwise identical input vectors")

    @staticmethod
    def empty(
        n_dims: int, constraint_count: int, has_status: bool = False
    ) -> Dataset:
        return Dataset(
            np.empty((0, n_dims)), np.empty((0, constraint_count)), has_status=has_status
        )

    @property
    def n_dims(self) -> int:
        return self.inputs.shape[1]

    @property
    def constraint_count(self) -> int:
        return self.observations.shape[1]

    @property
    def controllable_inputs(self) -> np.ndarray:
        return self.inputs[:, :-1] if self.has_status else self.inputs

    @property
    def status(self) -> Optional[np.ndarray]:
        return self.inputs[:, -1] if self.has_status else None

    def targets(self, constraint_index: int) -> np.ndarray:
        return self.observations[:, constraint_index]

    def contains(self, x) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.any(np.all(self.inputs == x, axis=1)))

    def extend(self, inputs, observations) -> Dataset:
        """Create a new dataset with the given points appended

        Args:
            inputs (array-like): new input vectors, shape (points, dims)
            observations (array-like): their measurements, shape (points, constraints)

        Returns:
            Dataset: the extended dataset
        """
        inputs = np.array(inputs, dtype=float, ndmin=2)
        observations = np.array(observations, dtype=float, ndmin=2)
        if inputs.shape[0] == 0:
            return self
        if inputs.shape[1] != self.n_dims:
            raise ValueError(
                f"Expected input vectors of dimension {self.n_dims}, got {inputs.shape[1]}"
            )
        if observations.shape[1] != self.constraint_count:
            raise ValueError(
                f"Expected {self.constraint_count} measurement(s) per point, got {observations.shape[1]}"
            )
        return Dataset(
            np.vstack([self.inputs, inputs]),
            np.vstack([self.observations, observations]),
            has_status=self.has_status,
            allow_duplicates=self.allow_duplicates,
        )

    def head(self, count: int) -> Dataset:
        return Dataset(
            self.inputs[:count],
            self.observations[:count],
            has_status=self.has_status,
            allow_duplicates=self.allow_duplicates,
        )

    def header(self) -> list[str]:
        names = [f"x{i + 1}" for i in range(self.n_dims)]
        if self.has_status:
            names[-1] = "v"
        return names + [f"c{k + 1}" for k in range(self.constraint_count)]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(np.hstack([self.inputs, self.observations]), columns=self.header())

    def to_csv(self, path: str) -> None:
        self.to_frame().to_csv(path, index=False)

    @staticmethod
    def from_csv(path: str, allow_duplicates: bool = False) -> Dataset:
        """Read a dataset written by `to_csv` (header `x1,...,xn[,v],c1,...,cK`)

        Args:
            path (str): the CSV file
            allow_duplicates (bool, optional): accept bitwise identical input vectors. Defaults to False.

        Returns:
            Dataset: the dataset stored in the file
        """
        try:
            frame = pd.read_csv(path, float_precision="round_trip")
        except pd.errors.EmptyDataError:
            raise ValueError(f"{path} is empty") from None
        frame.columns = [str(h).strip() for h in frame.columns]
        header = list(frame.columns)
        input_cols = [h for h in header if h.startswith("x") or h == "v"]
        output_cols = [h for h in header if h.startswith("c")]
        if not input_cols or len(input_cols) + len(output_cols) != len(header):
            raise ValueError(f"Unrecognised dataset header in {path}: {header}")
        frame = frame.dropna(how="all")
        return Dataset(
            frame[input_cols].to_numpy(dtype=float).reshape(-1, len(input_cols)),
            frame[output_cols].to_numpy(dtype=float).reshape(-1, len(output_cols)),
            has_status=input_cols[-1] == "v",
            allow_duplicates=allow_duplicates,
        )

    def to_dict(self) -> dict:
        return {
            "inputs": self.inputs.tolist(),
            "observations": self.observations.tolist(),
            "n_dims": self.n_dims,
            "constraint_count": self.constraint_count,
            "has_status": self.has_status,
            "allow_duplicates": self.allow_duplicates,
        }

    @staticmethod
    def from_dict(data: dict) -> Dataset:
        inputs = np.array(data["inputs"], dtype=float).reshape(-1, data["n_dims"])
        observations = np.array(data["observations"], dtype=float).reshape(
            -1, data["constraint_count"]
        )
        return Dataset(
            inputs,
            observations,
            has_status=data.get("has_status", False),
            allow_duplicates=data.get("allow_duplicates", False),
        )

    def __len__(self) -> int:
        return self.inputs.shape[0]

    def __eq__(self, other: Dataset) -> bool:
        return (
            isinstance(other, Dataset)
            and self.has_status == other.has_status
            and np.array_equal(self.inputs, other.inputs)
            and np.array_equal(self.observations, other.observations)
        )

    def __repr__(self) -> str:
        return f"Dataset({len(self)} points, {self.n_dims} dims, {self.constraint_count} constraints)"


def _has_duplicate_rows(inputs: np.ndarray) -> bool:
    seen = set()
    for row in inputs:
        key = row.tobytes()
        if key in seen:
            return True
        seen.add(key)
    return False


def stack_measurements(rows: Sequence[Sequence[float]], constraint_count: int) -> np.ndarray:
    """Turn per-candidate measurement rows into a (points, constraints) array, rejecting non-finite values"""
    try:
        values = np.array(rows, dtype=float).reshape(-1, constraint_count)
    except ValueError:
        raise MeasurementError(Message.measurement_shape_error(constraint_count)) from None
    if not np.all(np.isfinite(values)):
        raise MeasurementError(Message.non_finite_measurement_error())
    return values
