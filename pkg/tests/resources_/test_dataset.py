import pytest
from contextlib import nullcontext

import numpy as np

from process_bo.exceptions import MeasurementError
from process_bo.resources import Dataset
from process_bo.resources.dataset import stack_measurements

from ..helpers import assert_dataset


@pytest.mark.parametrize("inputs, observations, has_status, err", [
    ([[0.1, 0.2]], [[1.0]], False, None),
    ([[0.1, 0.2], [0.3, 0.4]], [1.0, 2.0], False, None),  # one value per point
    ([[0.1, 0.2], [0.3, 0.4]], [[1.0]], False, ValueError),  # row count mismatch
    ([[0.1], [0.3]], [[1.0], [2.0]], True, ValueError),  # status needs a controllable input
    ([[0.1, 0.2], [0.1, 0.2]], [[1.0], [2.0]], False, ValueError),  # duplicate inputs
])
def test_dataset_validation(inputs, observations, has_status, err):
    with pytest.raises(err) if err else nullcontext():
        dataset = Dataset(inputs, observations, has_status=has_status)
        assert len(dataset) == len(inputs)
        assert dataset.constraint_count == 1


def test_dataset_duplicates_allowed():
    dataset = Dataset([[0.1, 0.2], [0.1, 0.2]], [[1.0], [1.5]], allow_duplicates=True)
    assert len(dataset) == 2
    assert len(dataset.extend([[0.1, 0.2]], [[2.0]])) == 3


def test_dataset_is_immutable(small_dataset):
    with pytest.raises(ValueError):
        small_dataset.inputs[0, 0] = 3.0

    extended = small_dataset.extend([[0.9, 0.9]], [[0.5]])
    assert len(small_dataset) == 4
    assert len(extended) == 5
    assert extended.contains([0.9, 0.9])
    assert not small_dataset.contains([0.9, 0.9])
    assert small_dataset.extend(np.empty((0, 2)), np.empty((0, 1))) is small_dataset


@pytest.mark.parametrize("inputs, observations", [
    ([[0.9, 0.9, 0.9]], [[0.5]]),
    ([[0.9, 0.9]], [[0.5, 0.1]]),
    ([[0.1, 0.2]], [[0.5]]),  # already evaluated
])
def test_dataset_extend_rejects(small_dataset, inputs, observations):
    with pytest.raises(ValueError):
        small_dataset.extend(inputs, observations)


def test_dataset_status_column():
    dataset = Dataset([[0.1, 0.2, 7.0], [0.4, 0.5, 8.0]], [[1.0, 2.0], [3.0, 4.0]], has_status=True)
    assert dataset.header() == ["x1", "x2", "v", "c1", "c2"]
    assert np.array_equal(dataset.status, [7.0, 8.0])
    assert dataset.controllable_inputs.shape == (2, 2)
    assert Dataset([[0.1]], [[1.0]]).status is None


def test_dataset_csv(tmp_path):
    dataset = Dataset([[0.1, 1 / 3, 7.25], [0.4, 0.5, 8.0]], [[1e-17, 2.0], [3.0, -4.5]], has_status=True)
    path = str(tmp_path / "data.csv")
    dataset.to_csv(path)

    with open(path, encoding="utf-8") as f:
        assert f.readline().strip() == "x1,x2,v,c1,c2"
    assert_dataset(Dataset.from_csv(path), dataset)


@pytest.mark.parametrize("content", ["", "a,b,c\n1,2,3\n", "c1,c2\n1,2\n"])
def test_dataset_csv_rejects(tmp_path, content):
    path = tmp_path / "bad.csv"
    path.write_text(content, encoding="utf-8")
    with pytest.raises(ValueError):
        Dataset.from_csv(str(path))


def test_dataset_dict(small_dataset):
    document = small_dataset.to_dict()
    assert document["n_dims"] == 2
    assert document["constraint_count"] == 1
    assert Dataset.from_dict(document) == small_dataset
    assert Dataset.from_dict(Dataset.empty(3, 2).to_dict()).n_dims == 3


def test_head(small_dataset):
    assert_dataset(small_dataset.head(2), Dataset(small_dataset.inputs[:2], small_dataset.observations[:2]))


@pytest.mark.parametrize("rows, count, err", [
    ([[1.0, 2.0], [3.0, 4.0]], 2, None),
    ([1.0, 2.0, 3.0], 1, None),
    ([[1.0, float("nan")]], 2, MeasurementError),
    ([[float("inf")]], 1, MeasurementError),
    ([[1.0, 2.0], [3.0]], 2, MeasurementError),
    ([1.0, 2.0, 3.0], 2, MeasurementError),
])
def test_stack_measurements(rows, count, err):
    with pytest.raises(err) if err else nullcontext():
        values = stack_measurements(rows, count)
        assert values.shape[1] == count
