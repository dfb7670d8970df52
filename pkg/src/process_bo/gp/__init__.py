"""Gaussian process surrogates for the black-box constraints, one independent model per constraint"""

from .kernel import KernelParams, se_ard
from .model import (
    FitConfig,
    GpModel,
    PosteriorPrediction,
    build_model,
    fit,
    fit_models,
    log_marginal_likelihood,
    predict,
    prior_model,
)

__all__ = [
    "KernelParams",
    "se_ard",
    "FitConfig",
    "GpModel",
    "PosteriorPrediction",
    "build_model",
    "fit",
    "fit_models",
    "log_marginal_likelihood",
    "predict",
    "prior_model",
]
