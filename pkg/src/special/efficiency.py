"""Closed-form asymptotic relative efficiencies for two-group scatter shapes."""
from dataclasses import dataclass
from typing import Optional, Sequence

from src.errors import DegenerateSpectrumError, DomainError, InvalidInputError
from src.sampling.radial import RadialLaw
from src.special.hypergeometric import hyp2f1

RHO_MIN = 1e-6


def _check_dims(d: int, d1: int) -> None:
    if int(d) != d or int(d1) != d1 or not 1 <= d1 < d:
        raise InvalidInputError(f"need integers 1 <= d1 < d, got d={d}, d1={d1}")


def _check_rho(rho: float, rho_min: float) -> None:
    if rho == 0.0:
        raise DomainError("rho = 0 is a limit; use are_limit_rho0(d, d1)")
    if not 0.0 < rho <= 1.0:
        raise DomainError(f"rho={rho} must lie in (0, 1]")
    if rho < rho_min:
        raise DomainError(
            f"rho={rho:g} is below the supported floor {rho_min:g}; use are_limit_rho0(d, d1)"
        )


def are_hypergeometric(
    d: int,
    d1: int,
    rho: float,
    sigma1: Optional[float] = None,
    rho_min: float = RHO_MIN,
) -> float:
    """Asymptotic efficiency of the SSCM eigenprojection relative to Tyler's.

    For Gamma with eigenvalue lambda_1 of multiplicity d1 and lambda_2 of
    multiplicity d - d1, with rho^2 = lambda_2 / lambda_1 and kappa = 1 - rho^2,

        ARE = 2F1(1, (d2+2)/2; (d+4)/2; kappa)^2 / 2F1(2, (d2+2)/2; (d+4)/2; kappa).

    Args:
        d: Dimension.
        d1: Multiplicity of the larger eigenvalue.
        rho: Square root of the eigenvalue ratio, in (0, 1].
        sigma1: Optional scalar of another affine equivariant estimate; the
            result is then relative to that estimate, i.e. multiplied by
            sigma1 * d / (d + 2).
        rho_min: Smallest supported rho.

    Raises:
        InvalidInputError: If d1 is not in [1, d).
        DomainError: If rho is zero, outside (0, 1] or below rho_min.
    """
    _check_dims(d, d1)
    _check_rho(rho, rho_min)
    if sigma1 is not None and not sigma1 > 0:
        raise InvalidInputError(f"sigma1 must be positive, got {sigma1}")
    d2 = d - d1
    kappa = 1.0 - rho * rho
    numerator = hyp2f1(1.0, (d2 + 2) / 2.0, (d + 4) / 2.0, kappa)
    denominator = hyp2f1(2.0, (d2 + 2) / 2.0, (d + 4) / 2.0, kappa)
    are = numerator * numerator / denominator
    if sigma1 is not None:
        are *= tyler_efficiency_vs(sigma1, d)
    return are


def are_limit_rho0(d: int, d1: int) -> float:
    """Limit of the efficiency as rho -> 0: (1 + 2/d)(1 - 2/d1) for d1 > 2, else 0."""
    _check_dims(d, d1)
    if d1 <= 2:
        return 0.0
    return (1.0 + 2.0 / d) * (1.0 - 2.0 / d1)


def are_curve(
    d: int,
    d1: int,
    rho_grid: Sequence[float],
    sigma1: Optional[float] = None,
    rho_min: float = RHO_MIN,
) -> list[tuple[float, float]]:
    """Efficiency at each rho of a grid, as (rho, are) pairs."""
    return [(float(rho), are_hypergeometric(d, d1, float(rho), sigma1, rho_min)) for rho in rho_grid]


def tyler_efficiency_vs(sigma1: float, d: int) -> float:
    """Efficiency of Tyler's shape relative to an estimate with scalar sigma1."""
    if not sigma1 > 0:
        raise InvalidInputError(f"sigma1 must be positive, got {sigma1}")
    return sigma1 * d / (d + 2.0)


def sigma1_sample_covariance(d: int, radial: RadialLaw) -> float:
    """Scalar sigma1 of the sample covariance under an elliptical law.

    Normalized to one under multivariate normality:
    sigma1 = d / (d + 2) * E[R^4] / E[R^2]^2.
    """
    if int(d) != d or d < 1:
        raise InvalidInputError(f"dimension must be a positive integer, got {d}")
    return d / (d + 2.0) * radial.moment_ratio(d)


def are_vs_sample_covariance(d: int, d1: int, rho: float, radial: RadialLaw) -> float:
    """Efficiency of the SSCM eigenprojection relative to the sample covariance's."""
    return are_hypergeometric(d, d1, rho, sigma1=sigma1_sample_covariance(d, radial))


@dataclass(frozen=True)
class TwoDimensionalConstants:
    """Closed forms for d = 2, d1 = 1."""

    rho: float
    phi1: float
    phi2: float
    psi12: float
    alpha_tyler: float
    alpha_sscm: float
    are: float


def two_dimensional_closed_forms(rho: float) -> TwoDimensionalConstants:
    """Spectral constants and efficiency in the plane for Lambda = diag(1, rho^2).

    Raises:
        DegenerateSpectrumError: At rho = 1, where the alphas have a pole.
    """
    if not 0.0 < rho <= 1.0:
        raise DomainError(f"rho={rho} must lie in (0, 1]")
    if rho == 1.0:
        raise DegenerateSpectrumError("equal eigenvalues: eigenprojection variance undefined")
    return TwoDimensionalConstants(
        rho=rho,
        phi1=1.0 / (1.0 + rho),
        phi2=rho / (1.0 + rho),
        psi12=rho / (2.0 * (1.0 + rho) ** 2),
        alpha_tyler=4.0 * rho**2 / (1.0 - rho**2) ** 2,
        alpha_sscm=rho / (1.0 - rho) ** 2,
        are=4.0 * rho / (1.0 + rho) ** 2,
    )
