import pytest
from contextlib import nullcontext

import numpy as np

from process_bo.gp import KernelParams, se_ard
from process_bo.gp.kernel import squared_differences


@pytest.mark.parametrize("lengthscales, signal, noise, err", [
    ((1.0, 2.0), 1.0, 0.0, None), ((0.5,), 3.0, 0.1, None),  # Valid parameters
    ((0.0, 1.0), 1.0, 0.0, ValueError), ((-1.0,), 1.0, 0.0, ValueError),  # Non-positive lengthscales
    ((1.0,), 0.0, 0.0, ValueError), ((1.0,), 1.0, -1e-3, ValueError),  # Invalid variances
])
def test_kernel_params_validation(lengthscales, signal, noise, err):
    with pytest.raises(err) if err else nullcontext():
        params = KernelParams(lengthscales, signal, noise)
        assert params.n_dims == len(lengthscales)


def test_kernel_params_dict():
    params = KernelParams((0.3, 1.5), 2.0, 0.01)
    assert KernelParams.from_dict(params.to_dict()) == params
    assert KernelParams.default(3) == KernelParams((1.0, 1.0, 1.0), 1.0, 0.0)


def test_se_ard():
    rng = np.random.default_rng(0)
    a = rng.random((5, 2))
    k = se_ard(a, a, (0.5, 2.0), 1.7)

    assert k.shape == (5, 5)
    assert np.allclose(k, k.T)
    assert np.allclose(np.diag(k), 1.7)
    assert np.all(np.linalg.eigvalsh(k) > -1e-12)

    expected = 1.7 * np.exp(-0.5 * (((a[0] - a[1]) / np.array([0.5, 2.0])) ** 2).sum())
    assert k[0, 1] == pytest.approx(expected, rel=1e-12)


def test_squared_differences():
    a = np.array([[0.0, 1.0], [2.0, 4.0], [1.0, 1.0]])
    sq = squared_differences(a)

    assert sq.shape == (2, 3, 3)
    assert sq[0, 0, 1] == 4.0
    assert sq[1, 0, 1] == 9.0
    assert np.all(sq[:, [0, 1, 2], [0, 1, 2]] == 0)
