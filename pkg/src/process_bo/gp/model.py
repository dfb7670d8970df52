"""Exact Gaussian process regression for a single constraint

A `GpModel` is immutable once built: fitting returns a new model, and `GpModel.condition` returns a new model trained on
other data with the same hyperparameters. The prior mean is constant and equal to the mean of the training targets.

Fitting works in a normalized space (inputs scaled to [0, 1] by the configured bounds, targets standardized), then
converts the hyperparameters back to the original output units so that predictions are always reported in those units.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import LinAlgError, cho_solve, cholesky, solve_triangular
from scipy.optimize import minimize

from ..config import Config
from ..exceptions import (
    DimensionMismatchError,
    IllConditionedKernelError,
    InsufficientDataError,
    Message,
)
from ..resources import Dataset
from .kernel import KernelParams, se_ard, squared_differences

logger = logging.getLogger(__name__)

_FAILED_FIT = 1e25


@dataclass(frozen=True)
class PosteriorPrediction:
    mean: float
    variance: float

    @property
    def std(self) -> float:
        return math.sqrt(self.variance)


@dataclass(frozen=True)
class FitConfig:
    """Settings of the hyperparameter search

    `noise_variance` set to None learns the noise; otherwise it is fixed to the given value (0 for a noiseless GP).
    Lengthscale bounds apply to the scaled inputs, variance bounds to the standardized targets.
    """

    lengthscale_bounds: tuple[float, float] = (1e-2, 1e2)
    signal_variance_bounds: tuple[float, float] = (1e-2, 1e2)
    noise_variance_bounds: tuple[float, float] = (1e-6, 1.0)
    noise_variance: Optional[float] = 0.0
    restarts: int = field(default_factory=lambda: Config.GP_RESTARTS)
    seed: int = field(default_factory=lambda: Config.RANDOM_SEED)
    input_bounds: Optional[tuple[tuple[float, float], ...]] = None
    standardize: bool = True
    jitter: float = field(default_factory=lambda: Config.GP_JITTER)
    max_jitter: float = field(default_factory=lambda: Config.GP_MAX_JITTER)
    variance_floor: float = field(default_factory=lambda: Config.VARIANCE_FLOOR)
    warm_start: Optional[KernelParams] = None

    def __post_init__(self) -> None:
        if self.restarts < 1:
            raise ValueError("At least one restart is required")
        if self.noise_variance is not None and self.noise_variance < 0:
            raise ValueError("A fixed noise variance must be non-negative")
        if self.input_bounds is not None:
            object.__setattr__(
                self,
                "input_bounds",
                tuple((float(lo), float(hi)) for lo, hi in self.input_bounds),
            )

    def replace(self, **changes) -> FitConfig:
        values = {name: getattr(self, name) for name in self.__dataclass_fields__}
        values.update(changes)
        return FitConfig(**values)


def _input_transform(
    input_bounds: Optional[Sequence[tuple[float, float]]], n_dims: int
) -> tuple[np.ndarray, np.ndarray]:
    if input_bounds is None:
        return np.zeros(n_dims), np.ones(n_dims)
    bounds = np.asarray(input_bounds, dtype=float)
    if bounds.shape != (n_dims, 2):
        raise DimensionMismatchError(
            Message.dimension_mismatch_error(n_dims, bounds.shape[0], "input bound list")
        )
    span = bounds[:, 1] - bounds[:, 0]
    if np.any(span <= 0):
        raise ValueError("Every input bound needs lower < upper")
    return bounds[:, 0], span


def factorize(
    covariance: np.ndarray, scale: float, jitter: float, max_jitter: float
) -> tuple[np.ndarray, float]:
    """Lower Cholesky factor of `covariance + jitter * scale * I`, escalating the jitter by 10x on failure

    Args:
        covariance (np.ndarray): the symmetric covariance matrix (noise already on the diagonal)
        scale (float): the signal variance the jitter is relative to
        jitter (float): initial relative jitter
        max_jitter (float): the largest relative jitter tried

    Returns:
        tuple[np.ndarray, float]: the lower factor and the relative jitter that was used
    """
    n = covariance.shape[0]
    current = jitter
    while current <= max_jitter * (1 + 1e-12):
        try:
            factor = cholesky(
                covariance + current * scale * np.eye(n), lower=True, check_finite=True
            )
            if current > jitter:
                logger.debug("Cholesky succeeded after raising the jitter to %g", current)
            return factor, current
        except (LinAlgError, ValueError):
            current *= 10
    raise IllConditionedKernelError(Message.ill_conditioned_error(max_jitter))


class GpModel:
    """A trained Gaussian process over one constraint, with its factorization cached"""

    def __init__(
        self,
        params: KernelParams,
        training_inputs: np.ndarray,
        targets: np.ndarray,
        prior_mean: float,
        input_lower: np.ndarray,
        input_span: np.ndarray,
        factorization: Optional[np.ndarray],
        alpha_vector: np.ndarray,
        jitter: float,
        base_jitter: float,
        max_jitter: float,
        variance_floor: float,
    ) -> None:
        self.params = params
        self.training_inputs = training_inputs
        self.targets = targets
        self.prior_mean = prior_mean
        self.input_lower = input_lower
        self.input_span = input_span
        self.factorization = factorization
        self.alpha_vector = alpha_vector
        self.jitter = jitter
        self.base_jitter = base_jitter
        self.max_jitter = max_jitter
        self.variance_floor = variance_floor
        for array in (self.training_inputs, self.targets, self.alpha_vector):
            array.setflags(write=False)

    @property
    def n_dims(self) -> int:
        return self.params.n_dims

    @property
    def diagonal(self) -> float:
        """Value added to the kernel diagonal: the noise variance plus the jitter actually used"""
        return self.params.noise_variance + self.jitter * self.params.signal_variance

    def _scale(self, inputs: np.ndarray) -> np.ndarray:
        return (inputs - self.input_lower) / self.input_span

    def predict_many(self, queries, clamp: bool = True) -> tuple[np.ndarray, np.ndarray]:
        """Posterior means and latent variances at many query points

        Args:
            queries (array-like): shape (points, dims)
            clamp (bool, optional): floor the variances at `variance_floor`. Defaults to True.

        Returns:
            tuple[np.ndarray, np.ndarray]: the means and variances, one per query
        """
        queries = np.array(queries, dtype=float, ndmin=2)
        if queries.shape[1] != self.n_dims:
            raise DimensionMismatchError(
                Message.dimension_mismatch_error(self.n_dims, queries.shape[1])
            )
        signal = self.params.signal_variance
        if self.factorization is None:
            means = np.full(queries.shape[0], self.prior_mean)
            variances = np.full(queries.shape[0], signal)
        else:
            cross = se_ard(
                self._scale(queries),
                self._scale(self.training_inputs),
                self.params.lengthscales,
                signal,
            )
            means = self.prior_mean + cross @ self.alpha_vector
            v = solve_triangular(self.factorization, cross.T, lower=True)
            variances = signal - np.einsum("ij,ij->j", v, v)
        if clamp:
            variances = np.maximum(variances, self.variance_floor)
        return means, variances

    def predict(self, query) -> PosteriorPrediction:
        query = np.asarray(query, dtype=float)
        if query.ndim != 1 or query.shape[0] != self.n_dims:
            raise DimensionMismatchError(
                Message.dimension_mismatch_error(self.n_dims, query.size)
            )
        means, variances = self.predict_many(query[None, :])
        return PosteriorPrediction(float(means[0]), float(variances[0]))

    def condition(self, inputs, targets) -> GpModel:
        """Retrain on other data with the hyperparameters frozen"""
        return build_model(
            self.params,
            inputs,
            targets,
            input_lower=self.input_lower,
            input_span=self.input_span,
            jitter=self.base_jitter,
            max_jitter=self.max_jitter,
            variance_floor=self.variance_floor,
        )

    def __repr__(self) -> str:
        return (
            f"GpModel({self.training_inputs.shape[0]} points, lengthscales={self.params.lengthscales}, "
            f"signal_variance={self.params.signal_variance:.4g}, noise_variance={self.params.noise_variance:.4g})"
        )


def build_model(
    params: KernelParams,
    inputs,
    targets,
    input_lower: Optional[np.ndarray] = None,
    input_span: Optional[np.ndarray] = None,
    prior_mean: Optional[float] = None,
    jitter: Optional[float] = None,
    max_jitter: Optional[float] = None,
    variance_floor: Optional[float] = None,
) -> GpModel:
    """Factorize the covariance of the given data under fixed hyperparameters.

    Zero training points are accepted and give the prior model.

    Args:
        params (KernelParams): the kernel hyperparameters, in original output units
        inputs (array-like): training inputs, shape (points, dims)
        targets (array-like): training targets, shape (points,)
        input_lower (Optional[np.ndarray], optional): lower bounds used to scale inputs. Defaults to zeros.
        input_span (Optional[np.ndarray], optional): widths used to scale inputs. Defaults to ones.
        prior_mean (Optional[float], optional): constant prior mean. Defaults to the mean of the targets.

    Returns:
        GpModel: the conditioned model
    """
    inputs = np.array(inputs, dtype=float, ndmin=2)
    targets = np.array(targets, dtype=float).reshape(-1)
    n_dims = params.n_dims
    if inputs.shape[0] == 0:
        inputs = inputs.reshape(0, n_dims)
    if inputs.shape[1] != n_dims:
        raise DimensionMismatchError(
            Message.dimension_mismatch_error(n_dims, inputs.shape[1])
        )
    if targets.shape[0] != inputs.shape[0]:
        raise ValueError("Every training input needs exactly one target")
    jitter = Config.GP_JITTER if jitter is None else jitter
    max_jitter = Config.GP_MAX_JITTER if max_jitter is None else max_jitter
    variance_floor = Config.VARIANCE_FLOOR if variance_floor is None else variance_floor
    input_lower = np.zeros(n_dims) if input_lower is None else np.asarray(input_lower, dtype=float)
    input_span = np.ones(n_dims) if input_span is None else np.asarray(input_span, dtype=float)
    if prior_mean is None:
        prior_mean = float(targets.mean()) if targets.size else 0.0

    if inputs.shape[0] == 0:
        return GpModel(
            params, inputs.copy(), targets.copy(), prior_mean, input_lower, input_span,
            None, np.empty(0), jitter, jitter, max_jitter, variance_floor,
        )

    scaled = (inputs - input_lower) / input_span
    covariance = se_ard(scaled, scaled, params.lengthscales, params.signal_variance)
    covariance[np.diag_indices_from(covariance)] += params.noise_variance
    factor, used = factorize(covariance, params.signal_variance, jitter, max_jitter)
    alpha = cho_solve((factor, True), targets - prior_mean)
    return GpModel(
        params, inputs.copy(), targets.copy(), prior_mean, input_lower, input_span,
        factor, alpha, used, jitter, max_jitter, variance_floor,
    )


def _negative_lml(
    theta: np.ndarray,
    sq_diffs: np.ndarray,
    residuals: np.ndarray,
    fixed_noise: Optional[float],
    jitter: float,
    max_jitter: float,
) -> tuple[float, np.ndarray]:
    """Negative log marginal likelihood and its gradient over log hyperparameters

    `theta` holds log lengthscales, then log signal variance, then log noise variance when it is learnt.
    """
    n_dims = sq_diffs.shape[0]
    n = residuals.shape[0]
    lengthscales = np.exp(theta[:n_dims])
    signal = math.exp(theta[n_dims])
    noise = fixed_noise if fixed_noise is not None else math.exp(theta[n_dims + 1])

    scaled = sq_diffs / lengthscales[:, None, None] ** 2
    correlation = np.exp(-0.5 * scaled.sum(axis=0))
    covariance = signal * correlation + noise * np.eye(n)
    try:
        factor, used = factorize(covariance, signal, jitter, max_jitter)
    except IllConditionedKernelError:
        return _FAILED_FIT, np.zeros_like(theta)

    alpha = cho_solve((factor, True), residuals)
    lml = (
        -0.5 * residuals @ alpha
        - np.log(np.diag(factor)).sum()
        - 0.5 * n * math.log(2 * math.pi)
    )
    if not np.isfinite(lml):
        return _FAILED_FIT, np.zeros_like(theta)

    inner = np.outer(alpha, alpha) - cho_solve((factor, True), np.eye(n))
    weighted = signal * correlation
    grad = np.empty_like(theta)
    for d in range(n_dims):
        grad[d] = 0.5 * np.sum(inner * weighted * scaled[d])
    grad[n_dims] = 0.5 * (np.sum(inner * weighted) + used * signal * np.trace(inner))
    if fixed_noise is None:
        grad[n_dims + 1] = 0.5 * noise * np.trace(inner)
    return -lml, -grad


def fit(dataset: Dataset, constraint_index: int, fit_config: Optional[FitConfig] = None) -> GpModel:
    """Fit a GP to one constraint by maximizing the log marginal likelihood with multi-start L-BFGS-B

    The first start is the warm start if one is given, then the untrained hyperparameters (unit lengthscales, unit
    signal variance in original units); further starts are drawn uniformly in log space from the seeded generator.

    Args:
        dataset (Dataset): the evaluated points
        constraint_index (int): which constraint column to model
        fit_config (Optional[FitConfig], optional): search settings. Defaults to FitConfig().

    Returns:
        GpModel: the fitted model, in original output units
    """
    cfg = fit_config or FitConfig()
    count = len(dataset)
    if count < 2:
        raise InsufficientDataError(Message.insufficient_data_error(count))

    inputs = dataset.inputs
    targets = dataset.targets(constraint_index)
    n_dims = dataset.n_dims
    input_lower, input_span = _input_transform(cfg.input_bounds, n_dims)
    prior_mean = float(targets.mean())
    scale = float(targets.std()) if cfg.standardize else 1.0
    if not scale > 0:
        scale = 1.0
    residuals = (targets - prior_mean) / scale
    sq_diffs = squared_differences((inputs - input_lower) / input_span)

    fixed_noise = None if cfg.noise_variance is None else cfg.noise_variance / scale**2
    bounds = [tuple(np.log(cfg.lengthscale_bounds))] * n_dims
    bounds.append(tuple(np.log(cfg.signal_variance_bounds)))
    if fixed_noise is None:
        bounds.append(tuple(np.log(cfg.noise_variance_bounds)))
    bounds = np.array(bounds)

    def to_theta(params: KernelParams) -> np.ndarray:
        theta = list(np.log(params.lengthscales)) + [math.log(params.signal_variance / scale**2)]
        if fixed_noise is None:
            noise = max(params.noise_variance / scale**2, cfg.noise_variance_bounds[0])
            theta.append(math.log(noise))
        return np.clip(np.array(theta), bounds[:, 0], bounds[:, 1])

    default_noise = cfg.noise_variance if cfg.noise_variance is not None else 1e-2 * scale**2
    starts = []
    if cfg.warm_start is not None:
        starts.append(to_theta(cfg.warm_start))
    starts.append(to_theta(KernelParams.default(n_dims, default_noise)))
    rng = np.random.default_rng(cfg.seed)
    while len(starts) < cfg.restarts:
        starts.append(rng.uniform(bounds[:, 0], bounds[:, 1]))
    starts = starts[: max(cfg.restarts, 1)]

    best_theta, best_value = None, np.inf
    for i, start in enumerate(starts):
        result = minimize(
            _negative_lml,
            start,
            args=(sq_diffs, residuals, fixed_noise, cfg.jitter, cfg.max_jitter),
            jac=True,
            method="L-BFGS-B",
            bounds=bounds,
        )
        logger.debug("Restart %d: negative log likelihood %.6g", i, result.fun)
        if np.isfinite(result.fun) and result.fun < best_value:
            best_theta, best_value = result.x, float(result.fun)

    if best_theta is None or best_value >= _FAILED_FIT:
        raise IllConditionedKernelError(Message.ill_conditioned_error(cfg.max_jitter))

    lengthscales = tuple(np.exp(best_theta[:n_dims]))
    signal = math.exp(best_theta[n_dims]) * scale**2
    noise = (
        cfg.noise_variance
        if cfg.noise_variance is not None
        else math.exp(best_theta[n_dims + 1]) * scale**2
    )
    params = KernelParams(lengthscales, signal, noise)
    logger.debug("Fitted constraint %d: %s", constraint_index, params)
    return build_model(
        params,
        inputs,
        targets,
        input_lower=input_lower,
        input_span=input_span,
        prior_mean=prior_mean,
        jitter=cfg.jitter,
        max_jitter=cfg.max_jitter,
        variance_floor=cfg.variance_floor,
    )


def fit_models(
    dataset: Dataset,
    fit_config: Optional[FitConfig] = None,
    warm_starts: Optional[Sequence[KernelParams]] = None,
) -> list[GpModel]:
    """Fit one independent GP per constraint column

    With fewer than two points nothing can be fitted, so the untrained hyperparameters are conditioned on whatever data
    there is.

    Args:
        dataset (Dataset): the evaluated points
        fit_config (Optional[FitConfig], optional): search settings. Defaults to FitConfig().
        warm_starts (Optional[Sequence[KernelParams]], optional): previous hyperparameters, one per constraint.

    Returns:
        list[GpModel]: one model per constraint
    """
    cfg = fit_config or FitConfig()
    if len(dataset) < 2:
        return [
            prior_model(dataset.n_dims, cfg).condition(dataset.inputs, dataset.targets(k))
            for k in range(dataset.constraint_count)
        ]
    models = []
    for k in range(dataset.constraint_count):
        warm = warm_starts[k] if warm_starts is not None else cfg.warm_start
        models.append(fit(dataset, k, cfg.replace(warm_start=warm)))
    return models


def prior_model(
    n_dims: int, fit_config: Optional[FitConfig] = None, prior_mean: float = 0.0
) -> GpModel:
    """The untrained model used before any data is available"""
    cfg = fit_config or FitConfig()
    input_lower, input_span = _input_transform(cfg.input_bounds, n_dims)
    noise = cfg.noise_variance if cfg.noise_variance is not None else 0.0
    return build_model(
        KernelParams.default(n_dims, noise),
        np.empty((0, n_dims)),
        np.empty(0),
        input_lower=input_lower,
        input_span=input_span,
        prior_mean=prior_mean,
        jitter=cfg.jitter,
        max_jitter=cfg.max_jitter,
        variance_floor=cfg.variance_floor,
    )


def predict(model: GpModel, query) -> PosteriorPrediction:
    return model.predict(query)


def log_marginal_likelihood(
    dataset: Dataset,
    constraint_index: int,
    params: KernelParams,
    prior_mean: Optional[float] = None,
    input_bounds: Optional[Sequence[tuple[float, float]]] = None,
) -> float:
    """Gaussian log marginal likelihood of one constraint column under the given hyperparameters

    Args:
        dataset (Dataset): at least two evaluated points
        constraint_index (int): the constraint column
        params (KernelParams): hyperparameters in original output units
        prior_mean (Optional[float], optional): constant prior mean. Defaults to the mean of the targets.
        input_bounds (Optional[Sequence[tuple[float, float]]], optional): bounds used to scale the inputs. Defaults to
            no scaling.

    Returns:
        float: log p(y | X, params)
    """
    count = len(dataset)
    if count < 2:
        raise InsufficientDataError(Message.insufficient_data_error(count))
    if params.n_dims != dataset.n_dims:
        raise DimensionMismatchError(
            Message.dimension_mismatch_error(dataset.n_dims, params.n_dims, "hyperparameter set")
        )
    targets = dataset.targets(constraint_index)
    mean = float(targets.mean()) if prior_mean is None else prior_mean
    lower, span = _input_transform(input_bounds, dataset.n_dims)
    theta = np.log([*params.lengthscales, params.signal_variance])
    noise = params.noise_variance
    value, _ = _negative_lml(
        theta,
        squared_differences((dataset.inputs - lower) / span),
        targets - mean,
        noise,
        Config.GP_JITTER,
        Config.GP_MAX_JITTER,
    )
    if value >= _FAILED_FIT:
        raise IllConditionedKernelError(Message.ill_conditioned_error(Config.GP_MAX_JITTER))
    return -value
