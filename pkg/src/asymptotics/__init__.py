"""Asymptotic theory of SSCM and Tyler eigenprojections."""
from src.asymptotics.expectations import (
    OracleEstimate,
    chi_square_oracle,
    invert_phi_map,
    invert_phi_map_grouped,
    phi_map,
    phi_values,
    psi_jk,
    psi_table,
    psi_value,
)
from src.asymptotics.covariance import (
    AsymptoticCoefficients,
    TwoGroupShape,
    alpha_sscm,
    alpha_tyler,
    asymptotic_coefficients,
    eigenprojection_covariance,
    projection_pair_operator,
    spherical_shape_covariance,
    two_group_coefficients,
    two_group_phi_psi,
    two_group_spectrum,
)

__all__ = [
    "AsymptoticCoefficients",
    "OracleEstimate",
    "TwoGroupShape",
    "alpha_sscm",
    "alpha_tyler",
    "asymptotic_coefficients",
    "chi_square_oracle",
    "eigenprojection_covariance",
    "invert_phi_map",
    "invert_phi_map_grouped",
    "phi_map",
    "phi_values",
    "projection_pair_operator",
    "psi_jk",
    "psi_table",
    "psi_value",
    "spherical_shape_covariance",
    "two_group_coefficients",
    "two_group_phi_psi",
    "two_group_spectrum",
]
