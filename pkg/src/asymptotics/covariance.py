"""Alpha coefficients and asymptotic covariances of eigenprojections."""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.errors import DegenerateSpectrumError, DomainError, InvalidInputError, NumericalError
from src.linalg import Spectrum, TensorMatrix, commutation_matrix, kron, symmetrizer, vec
from src.special import hyp2f1
from src.asymptotics.expectations import phi_map, phi_values, psi_table

DEGENERATE_GAP = 1e-10
ESTIMATORS = ("tyler", "sscm")


@dataclass(frozen=True)
class TwoGroupShape:
    """Shape with eigenvalue lambda_1 of multiplicity d1 and lambda_2 of multiplicity d - d1.

    Attributes:
        d: Dimension.
        d1: Multiplicity of the larger eigenvalue.
        rho: sqrt(lambda_2 / lambda_1), in (0, 1].
    """

    d: int
    d1: int
    rho: float

    def __post_init__(self):
        if int(self.d) != self.d or int(self.d1) != self.d1 or not 1 <= self.d1 < self.d:
            raise InvalidInputError(f"need integers 1 <= d1 < d, got d={self.d}, d1={self.d1}")
        if not 0.0 < self.rho <= 1.0:
            raise DomainError(f"rho={self.rho} must lie in (0, 1]")

    @property
    def d2(self) -> int:
        return self.d - self.d1

    @property
    def gamma(self) -> float:
        """Eigenvalue ratio lambda_1 / lambda_2 = 1 / rho^2."""
        return 1.0 / (self.rho * self.rho)

    @property
    def kappa(self) -> float:
        return 1.0 - self.rho * self.rho

    @classmethod
    def from_gamma(cls, d: int, d1: int, gamma: float) -> "TwoGroupShape":
        if not gamma >= 1.0:
            raise DomainError(f"gamma={gamma} must be at least 1")
        return cls(d, d1, float(1.0 / np.sqrt(gamma)))


@dataclass(frozen=True)
class AsymptoticCoefficients:
    """Per-group phi and pairwise psi and alpha tables of one spectrum.

    Diagonal entries of the pairwise tables are NaN.
    """

    multiplicities: tuple
    phi: np.ndarray
    psi: np.ndarray
    alpha_tyler: np.ndarray
    alpha_sscm: np.ndarray

    def __post_init__(self):
        trace = float(np.dot(self.phi, self.multiplicities))
        if abs(trace - 1.0) > 1e-9:
            raise NumericalError(f"phi values do not sum to one (trace {trace:.12g})")

    def are(self, j: int, k: int) -> float:
        """Efficiency alpha_T / alpha_S of the SSCM eigenprojection for the pair (j, k)."""
        return float(self.alpha_tyler[j, k] / self.alpha_sscm[j, k])


def _check_gap(a: float, b: float, what: str) -> None:
    if abs(a - b) <= DEGENERATE_GAP * max(abs(a), abs(b)):
        raise DegenerateSpectrumError(
            f"{what} {a:.12g} and {b:.12g} coincide; eigenprojection variance is undefined"
        )


def alpha_tyler(lambda_j: float, lambda_k: float, d: int) -> float:
    """alpha_T = (d+2)/d * 2 lambda_j lambda_k / (lambda_j - lambda_k)^2.

    Raises:
        DomainError: If an eigenvalue is not positive.
        DegenerateSpectrumError: If the eigenvalues coincide.
    """
    if not (lambda_j > 0 and lambda_k > 0):
        raise DomainError(f"eigenvalues must be positive, got {lambda_j}, {lambda_k}")
    _check_gap(lambda_j, lambda_k, "eigenvalues")
    return (d + 2.0) / d * 2.0 * lambda_j * lambda_k / (lambda_j - lambda_k) ** 2


def _alpha_sscm_from(phi_j: float, phi_k: float, psi: float) -> float:
    _check_gap(phi_j, phi_k, "phi values")
    return 2.0 * psi / (phi_j - phi_k) ** 2


def alpha_sscm(spectrum: Spectrum, j: int, k: int) -> float:
    """alpha_S = 2 psi_jk / (phi_j - phi_k)^2 for groups j != k (0-based)."""
    if j == k:
        raise InvalidInputError("alpha is only defined for distinct groups j != k")
    for index in (j, k):
        spectrum.group_slice(index)
    _check_gap(spectrum.distinct_values[j], spectrum.distinct_values[k], "eigenvalues")
    phi = phi_map(spectrum)
    psi = psi_table(spectrum.distinct_values, spectrum.multiplicities)
    return _alpha_sscm_from(phi[j], phi[k], psi[j, k])


def _tables(values, sizes, phi: np.ndarray, psi: np.ndarray) -> AsymptoticCoefficients:
    d = int(sum(sizes))
    m = len(values)
    a_t = np.full((m, m), np.nan)
    a_s = np.full((m, m), np.nan)
    for j in range(m):
        for k in range(j + 1, m):
            a_t[j, k] = a_t[k, j] = alpha_tyler(values[j], values[k], d)
            a_s[j, k] = a_s[k, j] = _alpha_sscm_from(phi[j], phi[k], psi[j, k])
    return AsymptoticCoefficients(tuple(int(s) for s in sizes), phi, psi, a_t, a_s)


def asymptotic_coefficients(spectrum: Spectrum) -> AsymptoticCoefficients:
    """phi, psi and both alpha tables of a spectrum with at least two groups.

    Raises:
        InvalidInputError: If the spectrum has a single group.
        DegenerateSpectrumError: If two groups are numerically equal.
    """
    if spectrum.groups < 2:
        raise InvalidInputError("alpha coefficients need at least two eigenvalue groups")
    spectrum = spectrum.normalized()
    phi = phi_values(spectrum.distinct_values, spectrum.multiplicities)
    psi = psi_table(spectrum.distinct_values, spectrum.multiplicities)
    return _tables(spectrum.distinct_values, spectrum.multiplicities, phi, psi)


def two_group_spectrum(shape: TwoGroupShape) -> Spectrum:
    """Trace-one spectrum (gamma, ..., gamma, 1, ..., 1) / (d1 gamma + d2) with identity basis.

    At rho = 1 the two groups merge into a single group of size d.
    """
    if shape.rho == 1.0:
        return Spectrum.from_groups([1.0 / shape.d], [shape.d])
    scale = shape.d1 * shape.gamma + shape.d2
    return Spectrum.from_groups([shape.gamma / scale, 1.0 / scale], [shape.d1, shape.d2])


def two_group_phi_psi(shape: TwoGroupShape) -> tuple[np.ndarray, float]:
    """(phi_1, phi_2) and psi_12 from the hypergeometric closed forms.

    With kappa = 1 - rho^2,
        phi_1  = 2F1(1, d2/2; (d+2)/2; kappa) / d
        phi_2  = rho^2 2F1(1, (d2+2)/2; (d+2)/2; kappa) / d
        psi_12 = rho^2 2F1(2, (d2+2)/2; (d+4)/2; kappa) / (d (d+2))
    Valid at rho = 1, where they reduce to the spherical constants.
    """
    d, d2, kappa, r2 = shape.d, shape.d2, shape.kappa, shape.rho * shape.rho
    phi1 = hyp2f1(1.0, d2 / 2.0, (d + 2) / 2.0, kappa) / d
    phi2 = r2 * hyp2f1(1.0, (d2 + 2) / 2.0, (d + 2) / 2.0, kappa) / d
    psi12 = r2 * hyp2f1(2.0, (d2 + 2) / 2.0, (d + 4) / 2.0, kappa) / (d * (d + 2.0))
    return np.array([phi1, phi2]), psi12


def two_group_coefficients(shape: TwoGroupShape) -> AsymptoticCoefficients:
    """Coefficients of a two-group shape from the hypergeometric forms.

    Raises:
        DegenerateSpectrumError: At rho = 1.
    """
    if shape.rho == 1.0:
        raise DegenerateSpectrumError("rho = 1 merges the two eigenvalue groups")
    spectrum = two_group_spectrum(shape)
    phi, psi12 = two_group_phi_psi(shape)
    psi = np.array([[np.nan, psi12], [psi12, np.nan]])
    return _tables(spectrum.distinct_values, spectrum.multiplicities, phi, psi)


def projection_pair_operator(spectrum: Spectrum, j: int, k: int) -> TensorMatrix:
    """M_jk = 1/2 (I + K)(P_j (x) P_k + P_k (x) P_j), symmetric and idempotent."""
    if j == k:
        raise InvalidInputError("M_jk needs distinct groups j != k")
    P_j, P_k = spectrum.projector(j), spectrum.projector(k)
    return TensorMatrix(0.5 * symmetrizer(spectrum.dim) @ (kron(P_j, P_k) + kron(P_k, P_j)))


def eigenprojection_covariance(spectrum: Spectrum, j: int, estimator: str) -> TensorMatrix:
    """Asymptotic covariance of sqrt(n) vec(P_hat_j - P_j).

    Args:
        spectrum: Spectrum of the shape matrix, all groups distinct.
        j: Group index (0-based).
        estimator: "tyler" or "sscm".

    Returns:
        V = sum_{k != j} alpha_jk M_jk, of rank d_j (d - d_j).

    Raises:
        InvalidInputError: For an unknown estimator or a single-group spectrum.
        DegenerateSpectrumError: If two groups are numerically equal.
    """
    if estimator not in ESTIMATORS:
        raise InvalidInputError(f"unknown estimator {estimator!r}; expected one of {ESTIMATORS}")
    spectrum.group_slice(j)
    coefficients = asymptotic_coefficients(spectrum)
    table = coefficients.alpha_tyler if estimator == "tyler" else coefficients.alpha_sscm
    d = spectrum.dim
    V = np.zeros((d * d, d * d))
    for k in range(spectrum.groups):
        if k != j:
            V += table[j, k] * projection_pair_operator(spectrum, j, k).entries
    return TensorMatrix(V)


def spherical_shape_covariance(d: int, estimator: str = "sscm", sigma1: Optional[float] = None) -> TensorMatrix:
    """Asymptotic covariance of vec of a trace-one shape estimate at a spherical law.

    With M = I + K - (2/d) vec(I) vec(I)^T the SSCM gives M / (d (d+2)) and an
    affine equivariant estimate with scalar sigma1 gives sigma1 M / d^2; Tyler's
    estimate has sigma1 = (d+2)/d.

    Args:
        d: Dimension, at least 2.
        estimator: "sscm", "tyler" or "affine".
        sigma1: Scalar of the affine equivariant estimate; required for "affine".
    """
    if int(d) != d or d < 2:
        raise InvalidInputError(f"dimension must be an integer >= 2, got {d}")
    d = int(d)
    identity = vec(np.eye(d))
    M = np.eye(d * d) + commutation_matrix(d).entries - (2.0 / d) * np.outer(identity, identity)
    if estimator == "sscm":
        return TensorMatrix(M / (d * (d + 2.0)))
    if estimator == "tyler":
        sigma1 = (d + 2.0) / d
    elif estimator != "affine":
        raise InvalidInputError(f"unknown estimator {estimator!r}")
    if sigma1 is None or not sigma1 > 0:
        raise InvalidInputError(f"affine estimator needs a positive sigma1, got {sigma1}")
    return TensorMatrix(sigma1 * M / (d * d))
