"""Scatter and shape estimators."""
from src.estimators.scatter import (
    DROP_FACTOR,
    ScatterEstimate,
    coordinatewise_median,
    corrected_sscm,
    sample_covariance_shape,
    spatial_signs,
    sscm,
    tyler,
    tyler_residuals,
)

__all__ = [
    "DROP_FACTOR",
    "ScatterEstimate",
    "coordinatewise_median",
    "corrected_sscm",
    "sample_covariance_shape",
    "spatial_signs",
    "sscm",
    "tyler",
    "tyler_residuals",
]
