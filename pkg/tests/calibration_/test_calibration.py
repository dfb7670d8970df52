import pytest
from contextlib import nullcontext

import numpy as np

from process_bo.calibration import (
    GridSpec,
    SessionOffset,
    append_baseline,
    compute_offset,
    fit_status_model,
    generate_candidates,
)
from process_bo.exceptions import CalibrationError, CandidateCapError
from process_bo.gp import FitConfig
from process_bo.resources import Dataset, Objective

FIT = FitConfig(restarts=2, noise_variance=None, seed=0)
COST = Objective("first", lambda x: x[:, 0])


def voltage(x):
    x = np.atleast_2d(x)
    return 55.0 + 10.0 * x[:, 0] + 8.0 * x[:, 1]


@pytest.fixture()
def status_dataset():
    axis = np.linspace(0, 1, 4)
    controllable = np.array([[a, b] for a in axis for b in axis])
    inputs = np.hstack([controllable, voltage(controllable)[:, None]])
    return Dataset(inputs, (controllable.sum(axis=1) - 1)[:, None], has_status=True)


@pytest.mark.parametrize("counts, expected", [
    ((5,), [[0.0], [0.25], [0.5], [0.75], [1.0]]),
    ((2, 3), [[0.0, 0.0], [0.0, 0.5], [0.0, 1.0], [1.0, 0.0], [1.0, 0.5], [1.0, 1.0]]),
])
def test_grid_points(counts, expected):
    grid = GridSpec((0.0,) * len(counts), (1.0,) * len(counts), counts)
    assert np.allclose(grid.points(), expected)
    assert grid.size == len(expected)
    assert GridSpec.from_dict(grid.to_dict()) == grid


@pytest.mark.parametrize("lower, upper, counts, err", [
    ((0.0,), (1.0,), (2,), None),
    ((0.0,), (1.0,), (1,), ValueError),
    ((1.0,), (1.0,), (3,), ValueError),
    ((0.0, 0.0), (1.0,), (3, 3), ValueError),
    ((0.0,), (float("inf"),), (3,), ValueError),
])
def test_grid_validation(lower, upper, counts, err):
    with pytest.raises(err) if err else nullcontext():
        GridSpec(lower, upper, counts)


def test_grid_cap():
    grid = GridSpec((0.0, 0.0), (1.0, 1.0), (10, 10), cap=50)
    with pytest.raises(CandidateCapError, match="at least 100"):
        grid.points()
    assert GridSpec((0.0, 0.0), (1.0, 1.0), (10, 10), cap=100).points().shape == (100, 2)


def test_status_model_of_constant_status():
    controllable = np.random.default_rng(0).random((8, 2))
    dataset = Dataset(np.hstack([controllable, np.full((8, 1), 62.5)]), np.zeros((8, 1)), has_status=True)
    model = fit_status_model(dataset, FIT)
    assert np.allclose(model.predict_many(np.random.default_rng(1).random((20, 2))), 62.5, atol=1e-6)


def test_status_model_tracks_linear_status():
    rng = np.random.default_rng(2)
    controllable = rng.random((20, 1))
    dataset = Dataset(
        np.hstack([controllable, 3.0 + 2.0 * controllable]), np.zeros((20, 1)), has_status=True
    )
    model = fit_status_model(dataset, FIT)
    for x in rng.uniform(0.1, 0.9, 10):
        prediction = model.predict([x])
        assert abs(prediction.mean - (3.0 + 2.0 * x)) <= 2 * prediction.std + 1e-3


def test_status_model_uses_initialization_head(status_dataset):
    extended = status_dataset.extend([[0.5, 0.5, 99.0]], [[0.0]])
    model = fit_status_model(extended, FIT, init_count=len(status_dataset))
    assert model.training_inputs.shape == (16, 2)
    assert not model.contains([0.5, 0.5])

    with pytest.raises(CalibrationError):
        fit_status_model(Dataset([[0.1, 0.2], [0.3, 0.4]], [[1.0], [2.0]]), FIT)


@pytest.mark.parametrize("drift", [0.0, 2.0, -0.8])
def test_offset_recovers_drift(status_dataset, drift):
    model = fit_status_model(status_dataset, FIT)
    baseline = status_dataset.controllable_inputs[5]
    offset = compute_offset(model, baseline, voltage(baseline)[0] + drift)
    assert offset.delta == pytest.approx(drift, abs=0.05)
    assert offset.delta == pytest.approx(offset.baseline_measured - offset.predicted, abs=1e-12)
    assert SessionOffset.from_dict(offset.to_dict()) == offset


def test_offset_zero_at_prediction(status_dataset):
    model = fit_status_model(status_dataset, FIT)
    baseline = status_dataset.controllable_inputs[3]
    assert compute_offset(model, baseline, model.predict(baseline).mean).delta == 0.0


def test_offset_outside_initialization(status_dataset):
    model = fit_status_model(status_dataset, FIT)
    with pytest.raises(CalibrationError):
        compute_offset(model, [0.5, 0.5], 64.0)
    offset = compute_offset(model, [0.5, 0.5], 64.0, allow_outside=True)
    assert offset.baseline_input == (0.5, 0.5)


def test_offsets_shift_the_status_column(status_dataset):
    model = fit_status_model(status_dataset, FIT)
    grid = GridSpec((0.0, 0.0), (1.0, 1.0), (7, 7))
    baseline = status_dataset.controllable_inputs[5]
    up = compute_offset(model, baseline, voltage(baseline)[0] + 2.0)
    down = compute_offset(model, baseline, voltage(baseline)[0] - 0.8)

    first = generate_candidates(grid, model, up, COST)
    second = generate_candidates(grid, model, down, COST)
    assert np.array_equal(first.inputs[:, :2], second.inputs[:, :2])
    assert np.allclose(first.inputs[:, 2] - second.inputs[:, 2], 2.8, atol=1e-9)
    assert np.array_equal(first.ids, second.ids)


def test_zero_offset_is_uncalibrated(status_dataset):
    model = fit_status_model(status_dataset, FIT)
    grid = GridSpec((0.0, 0.0), (1.0, 1.0), (5, 5))
    baseline = status_dataset.controllable_inputs[0]
    zero = SessionOffset(0.0, tuple(baseline), 55.0, 55.0)
    assert generate_candidates(grid, model, zero, COST) == generate_candidates(grid, model, None, COST)


def test_candidates_without_status():
    grid = GridSpec((0.0,), (1.0,), (5,))
    candidates = generate_candidates(grid, None, None, COST)
    assert candidates.inputs.ravel().tolist() == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert candidates.costs.tolist() == candidates.inputs.ravel().tolist()
    assert candidates.provenance == "first"


def test_candidates_exclude_evaluated_points(status_dataset):
    model = fit_status_model(status_dataset, FIT)
    grid = GridSpec((0.0, 0.0), (1.0, 1.0), (7, 7))
    evaluated = Dataset([[0.0, 0.0, 50.0], [0.5, 0.5, 60.0], [0.51, 0.5, 60.0]], np.zeros((3, 1)), has_status=True)

    exact = generate_candidates(grid, model, None, COST, dataset=evaluated)
    assert len(exact) == 47
    assert 0 not in exact.ids and 24 not in exact.ids

    loose = generate_candidates(grid, model, None, COST, dataset=evaluated, tolerance=0.02)
    assert len(loose) == 47

    with pytest.raises(ValueError):
        generate_candidates(grid, model, None, COST, dataset=Dataset([[0.1, 0.2, 0.3]], [[0.0]]))


def test_append_baseline(status_dataset):
    offset = SessionOffset(2.0, (0.2, 0.3), 61.0, 59.0)
    extended = append_baseline(status_dataset, offset, [0.4])
    assert extended.inputs[-1].tolist() == [0.2, 0.3, 61.0]
    assert extended.observations[-1].tolist() == [0.4]
    assert len(status_dataset) == 16
