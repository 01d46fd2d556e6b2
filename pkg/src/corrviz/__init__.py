"""Correlation-aware statistics and plots for data with correlated uncertainties."""

from corrviz.estimators import CorrelationPCA, MahalanobisGOF
from corrviz.examples import ExampleSpec, generate
from corrviz.ingest import load_dataset, save_dataset
from corrviz.stats import (
    CorrelationDecomposition,
    DataSet,
    GofReport,
    ReducedCovariance,
    conditional_sigmas,
    correlation_from_covariance,
    gof,
    mahalanobis_sq,
    reduce_components,
)

__version__ = "0.1.0"

__all__ = [
    "CorrelationDecomposition",
    "CorrelationPCA",
    "DataSet",
    "ExampleSpec",
    "GofReport",
    "MahalanobisGOF",
    "ReducedCovariance",
    "conditional_sigmas",
    "correlation_from_covariance",
    "generate",
    "gof",
    "load_dataset",
    "mahalanobis_sq",
    "reduce_components",
    "save_dataset",
]
