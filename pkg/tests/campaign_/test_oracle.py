import pytest

import numpy as np

from process_bo.campaign import aps_like, fdm_like, preset_config


def test_measurements_are_seeded_by_inputs():
    process = aps_like(seed=2)
    x = np.array([[500.0, 40.0, 8.0, 3.0, 30.0, 110.0], [450.0, 45.0, 10.0, 3.5, 25.0, 120.0]])
    outputs, status = process.measure(x)
    again, status_again = process.measure(x[::-1])
    assert np.array_equal(outputs, again[::-1])
    assert np.array_equal(status, status_again[::-1])

    other, _ = aps_like(seed=3).measure(x)
    assert not np.array_equal(outputs, other)


def test_drift_shifts_only_the_status():
    process = aps_like(seed=2)
    x = np.array([process.lower, process.upper])
    outputs, status = process.measure(x)
    drifted_outputs, drifted_status = process.with_drift(2.0).measure(x)
    assert np.array_equal(outputs, drifted_outputs)
    assert np.allclose(drifted_status - status, 2.0)
    assert np.allclose(process.with_drift(-0.8).true_status(x) - process.true_status(x), -0.8)


def test_extra_columns_are_ignored():
    process = fdm_like()
    x = np.array([[50.0, 1.0]])
    assert np.array_equal(process(x), process(np.hstack([x, [[99.0]]])))


def test_status_is_optional():
    process = fdm_like()
    outputs, status = process.measure([[40.0, 0.9]])
    assert outputs.shape == (1, 1)
    assert status is None
    with pytest.raises(ValueError):
        process.true_status([[40.0, 0.9]])


def test_processes_are_feasible_somewhere():
    for name, process in (("aps", aps_like()), ("fdm", fdm_like())):
        document = preset_config(name)
        rng = np.random.default_rng(0)
        lower, upper = np.array(process.lower), np.array(process.upper)
        outputs = process.true_outputs(lower + rng.random((4000, len(lower))) * (upper - lower))
        feasible = np.ones(outputs.shape[0], dtype=bool)
        for column, spec in enumerate(document["constraints"]):
            feasible &= outputs[:, column] <= spec["upper"]
            if spec.get("lower") is not None:
                feasible &= outputs[:, column] >= spec["lower"]
        assert 0 < feasible.sum() < feasible.size


def test_unknown_preset():
    with pytest.raises(ValueError):
        preset_config("cvd")
