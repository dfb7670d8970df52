import numpy as np

from process_bo.batch import ProposedBatch
from process_bo.campaign import CampaignConfig, aps_like, fdm_like, preset_config
from process_bo.gp import GpModel
from process_bo.resources import Dataset


def dense_prediction(model: GpModel, queries) -> tuple[np.ndarray, np.ndarray]:
    """Posterior mean and variance by explicit inversion of the training covariance, without the cached factor

    Args:
        model (GpModel): the model whose hyperparameters, data and diagonal are used
        queries (array-like): shape (points, dims)

    Returns:
        tuple[np.ndarray, np.ndarray]: means and (unclamped) variances
    """
    params = model.params
    ls = np.asarray(params.lengthscales)
    x = (model.training_inputs - model.input_lower) / model.input_span / ls
    q = (np.array(queries, dtype=float, ndmin=2) - model.input_lower) / model.input_span / ls

    def kernel(a, b):
        sq = ((a[:, None, :] - b[None, :, :]) ** 2).sum(axis=2)
        return params.signal_variance * np.exp(-0.5 * sq)

    covariance = kernel(x, x) + model.diagonal * np.eye(x.shape[0])
    inverse = np.linalg.inv(covariance)
    cross = kernel(q, x)
    means = model.prior_mean + cross @ inverse @ (model.targets - model.prior_mean)
    variances = params.signal_variance - np.einsum("ij,jk,ik->i", cross, inverse, cross)
    return means, variances


def dense_log_likelihood(inputs, targets, lengthscales, signal_variance, noise_variance, prior_mean) -> float:
    """log N(y | mu, K + noise I) with an explicit determinant and inverse"""
    inputs = np.asarray(inputs, dtype=float) / np.asarray(lengthscales)
    sq = ((inputs[:, None, :] - inputs[None, :, :]) ** 2).sum(axis=2)
    covariance = signal_variance * np.exp(-0.5 * sq) + noise_variance * np.eye(inputs.shape[0])
    residuals = np.asarray(targets, dtype=float) - prior_mean
    _, logdet = np.linalg.slogdet(covariance)
    return float(
        -0.5 * residuals @ np.linalg.inv(covariance) @ residuals
        - 0.5 * logdet
        - 0.5 * inputs.shape[0] * np.log(2 * np.pi)
    )


def assert_dataset(d1: Dataset, d2: Dataset) -> None:
    """Performs an assert for each of the attributes of the dataset class
    The same as running assert ==, except since each attribute has its own assert statement
    it should be easier to see where any issues are

    Args:
        d1 (Dataset): The first dataset to compare
        d2 (Dataset): The second dataset to compare
    """
    assert d1.has_status == d2.has_status
    assert d1.inputs.shape == d2.inputs.shape
    assert np.array_equal(d1.inputs, d2.inputs)
    assert np.array_equal(d1.observations, d2.observations)


def assert_batch(b1: ProposedBatch, b2: ProposedBatch) -> None:
    """Performs an assert for each selection of two batches, so a failure points at the first differing selection

    Args:
        b1 (ProposedBatch): The first batch to compare
        b2 (ProposedBatch): The second batch to compare
    """
    assert len(b1) == len(b2)
    for s1, s2 in zip(b1.selections, b2.selections):
        assert s1.candidate_id == s2.candidate_id
        assert s1.inputs == s2.inputs
        assert s1.branch == s2.branch
        assert s1.fp == s2.fp
        assert s1.alpha == s2.alpha


def small_fdm_document(points: int = 6, init_count: int = 7, seed: int = 3) -> dict:
    """The FDM-like preset on a coarse grid with measured initial experiments inline"""
    document = preset_config("fdm")
    for spec in document["inputs"]:
        spec["points"] = points
    document["gp"] = {"restarts": 2}
    config = CampaignConfig.from_dict(document)
    rng = np.random.default_rng(seed)
    lower = np.array([i.lower for i in config.inputs])
    upper = np.array([i.upper for i in config.inputs])
    inputs = lower + rng.random((init_count, 2)) * (upper - lower)
    document["initial_data"] = {
        "inputs": inputs.tolist(),
        "observations": fdm_like(seed=seed)(inputs).tolist(),
    }
    return document


def small_aps_document(points: int = 2, init_count: int = 16, seed: int = 1) -> dict:
    """The APS-like preset on a coarse grid, with measured initial experiments (status column included) inline"""
    document = preset_config("aps")
    for spec in document["inputs"]:
        spec["points"] = points
    document["gp"] = {"restarts": 2}
    document["batch"]["batch_size"] = 3
    process = aps_like(seed=seed)
    rng = np.random.default_rng(seed)
    lower, upper = np.array(process.lower), np.array(process.upper)
    controllable = lower + rng.random((init_count, 6)) * (upper - lower)
    outputs, status = process.measure(controllable)
    document["initial_data"] = {
        "inputs": np.hstack([controllable, status[:, None]]).tolist(),
        "observations": outputs.tolist(),
    }
    return document
