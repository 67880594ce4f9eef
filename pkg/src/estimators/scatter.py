"""Trace-one shape estimators: SSCM, Tyler's M-estimate and the corrected SSCM."""
import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from src.asymptotics import invert_phi_map
from src.errors import ConvergenceError, DegenerateDataError, ExistenceError, InvalidInputError, RankDeficiencyError
from src.linalg import Spectrum, SymMatrix, spectrum_of, sym_eig
from src.sampling import Dataset

logger = logging.getLogger(__name__)

DROP_FACTOR = 1e-12
TAGS = ("sscm", "tyler", "corrected_sscm", "sample_covariance")


@dataclass(frozen=True)
class ScatterEstimate:
    """A trace-one scatter estimate and how it was obtained.

    Attributes:
        matrix: Estimated shape, trace one.
        estimator_tag: Which estimator produced it.
        iterations: IRLS iterations (Tyler only).
        residual: Final relative change of the IRLS iteration (Tyler only).
        n_used: Observations retained after dropping those at the center.
    """

    matrix: SymMatrix
    estimator_tag: str
    iterations: Optional[int] = None
    residual: Optional[float] = None
    n_used: int = 0

    def __post_init__(self):
        if self.estimator_tag not in TAGS:
            raise InvalidInputError(f"unknown estimator tag {self.estimator_tag!r}")

    @property
    def dim(self) -> int:
        return self.matrix.dim

    def spectrum(self, multiplicities: Optional[Sequence[int]] = None) -> Spectrum:
        return spectrum_of(self.matrix, multiplicities=multiplicities)


def _shape(matrix: np.ndarray) -> SymMatrix:
    return SymMatrix(matrix / np.trace(matrix))


def _centered(data: Dataset, center: Sequence[float]) -> np.ndarray:
    mu = np.asarray(center, dtype=float).ravel()
    if mu.shape != (data.d,) or not np.all(np.isfinite(mu)):
        raise InvalidInputError(f"center must be a finite vector of length {data.d}")
    return data.rows - mu


def _retained(data: Dataset, center: Sequence[float], drop_factor: float) -> tuple[np.ndarray, np.ndarray]:
    diffs = _centered(data, center)
    norms = np.linalg.norm(diffs, axis=1)
    nonzero = norms[norms > 0]
    if nonzero.size == 0:
        raise DegenerateDataError("all observations coincide with the center")
    keep = norms >= drop_factor * np.median(nonzero)
    dropped = int(norms.size - keep.sum())
    if dropped:
        logger.warning("dropped %d observation(s) at the center", dropped)
    return diffs[keep], norms[keep]


def spatial_signs(data: Dataset, center: Sequence[float], drop_factor: float = DROP_FACTOR) -> np.ndarray:
    """Unit directions theta_i = (x_i - mu) / ||x_i - mu|| of the retained observations.

    Observations closer to the center than drop_factor times the median
    non-zero distance are dropped.

    Raises:
        DegenerateDataError: If every observation sits at the center.
    """
    diffs, norms = _retained(data, center, drop_factor)
    return diffs / norms[:, None]


def sscm(data: Dataset, center: Sequence[float], drop_factor: float = DROP_FACTOR) -> ScatterEstimate:
    """Spatial sign covariance matrix (1/n) sum theta_i theta_i^T about a known center.

    Args:
        data: Observations.
        center: Location mu the signs are taken about.
        drop_factor: Relative distance below which an observation is dropped.

    Returns:
        ScatterEstimate tagged "sscm"; its trace is one by construction.

    Raises:
        DegenerateDataError: If all observations sit at the center.
    """
    theta = spatial_signs(data, center, drop_factor)
    S = theta.T @ theta / theta.shape[0]
    return ScatterEstimate(_shape(S), "sscm", n_used=theta.shape[0])


def _tyler_step(theta: np.ndarray, T: np.ndarray) -> np.ndarray:
    n, d = theta.shape
    weights = np.einsum("ij,ji->i", theta, np.linalg.solve(T, theta.T))
    update = (d / n) * (theta / weights[:, None]).T @ theta
    return update / np.trace(update)


def tyler(
    data: Dataset,
    center: Sequence[float],
    tol: float = 1e-10,
    max_iter: int = 1000,
    drop_factor: float = DROP_FACTOR,
) -> ScatterEstimate:
    """Tyler's distribution-free M-estimate of shape, by IRLS.

    Iterates T <- (d/n) sum theta theta^T / (theta^T T^-1 theta) from T = I/d,
    renormalizing to trace one, until the relative Frobenius change is below tol.
    With exactly d retained observations every theta W theta^T solves the
    equation; the solution returned then is the sample covariance shape, with
    zero iterations.

    Raises:
        ExistenceError: If the retained directions do not span R^d.
        ConvergenceError: If max_iter iterations are not enough.
    """
    diffs, norms = _retained(data, center, drop_factor)
    theta = diffs / norms[:, None]
    n, d = theta.shape
    if n < d or np.linalg.matrix_rank(theta) < d:
        raise ExistenceError(f"{n} retained directions do not span R^{d}; Tyler's estimate does not exist")
    if n == d:
        T = diffs.T @ diffs
        T /= np.trace(T)
        residual = float(np.linalg.norm(_tyler_step(theta, T) - T) / np.linalg.norm(T))
        return ScatterEstimate(_shape(T), "tyler", 0, residual, n)

    T = np.eye(d) / d
    residual = np.inf
    for iteration in range(1, max_iter + 1):
        T_new = _tyler_step(theta, T)
        T_new = 0.5 * (T_new + T_new.T)
        residual = float(np.linalg.norm(T_new - T) / np.linalg.norm(T))
        T = T_new
        if residual < tol:
            logger.debug("tyler converged in %d iterations (residual %.3e)", iteration, residual)
            return ScatterEstimate(_shape(T), "tyler", iteration, residual, n)
    raise ConvergenceError("Tyler IRLS did not converge", max_iter, residual)


def tyler_residuals(data: Dataset, center: Sequence[float], iterations: int) -> list[float]:
    """Relative change of each of the first IRLS iterations, for diagnostics."""
    theta = spatial_signs(data, center)
    d = theta.shape[1]
    T = np.eye(d) / d
    history = []
    for _ in range(iterations):
        T_new = _tyler_step(theta, T)
        history.append(float(np.linalg.norm(T_new - T) / np.linalg.norm(T)))
        T = T_new
    return history


def corrected_sscm(
    data: Dataset,
    center: Sequence[float],
    step: float = 0.5,
    tol: float = 1e-10,
    max_iter: int = 10_000,
) -> ScatterEstimate:
    """Consistency-corrected SSCM h^-1(S): SSCM eigenvectors with inverted eigenvalues.

    Raises:
        RankDeficiencyError: If an SSCM eigenvalue is zero.
        ConvergenceError: If the eigenvalue inversion does not converge.
    """
    estimate = sscm(data, center)
    values, Q = sym_eig(estimate.matrix)
    if values[-1] <= 1e-14:
        raise RankDeficiencyError(
            f"SSCM has a zero eigenvalue ({values[-1]:.3e}); the correction is undefined"
        )
    corrected = invert_phi_map(values / values.sum(), step, tol, max_iter)
    matrix = (Q * corrected) @ Q.T
    return ScatterEstimate(_shape(matrix), "corrected_sscm", n_used=estimate.n_used)


def coordinatewise_median(data: Dataset) -> np.ndarray:
    """Componentwise median of the observations."""
    return np.median(data.rows, axis=0)


def sample_covariance_shape(data: Dataset, center: Sequence[float]) -> ScatterEstimate:
    """Trace-one (1/n) sum (x - mu)(x - mu)^T about a known center."""
    diffs = _centered(data, center)
    C = diffs.T @ diffs / diffs.shape[0]
    if np.trace(C) <= 0:
        raise DegenerateDataError("all observations coincide with the center")
    return ScatterEstimate(_shape(C), "sample_covariance", n_used=diffs.shape[0])
