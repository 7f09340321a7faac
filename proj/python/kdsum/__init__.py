"""Kernel dissimilarity for mixed-type data."""

from ._kdsum import (
    NumericalError,
    ValidationError,
    ari,
    baseline_matrix,
    cluster,
    clustering_accuracy,
    distance_matrix,
    hac,
    mscv_objective,
    select_bandwidths,
    simulate,
)

__all__ = [
    "NumericalError",
    "ValidationError",
    "ari",
    "baseline_matrix",
    "cluster",
    "clustering_accuracy",
    "distance_matrix",
    "hac",
    "mscv_objective",
    "select_bandwidths",
    "simulate",
]
