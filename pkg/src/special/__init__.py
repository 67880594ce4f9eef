"""Hypergeometric functions and closed-form efficiencies."""
from src.special.hypergeometric import Hyp2F1Params, hyp2f1
from src.special.efficiency import (
    RHO_MIN,
    TwoDimensionalConstants,
    are_curve,
    are_hypergeometric,
    are_limit_rho0,
    are_vs_sample_covariance,
    sigma1_sample_covariance,
    two_dimensional_closed_forms,
    tyler_efficiency_vs,
)

__all__ = [
    "Hyp2F1Params",
    "RHO_MIN",
    "TwoDimensionalConstants",
    "are_curve",
    "are_hypergeometric",
    "are_limit_rho0",
    "are_vs_sample_covariance",
    "hyp2f1",
    "sigma1_sample_covariance",
    "two_dimensional_closed_forms",
    "tyler_efficiency_vs",
]
