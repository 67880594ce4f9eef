"""Chi-square ratio expectations phi and psi, and the inverse of the bias map h.

With S = sum_r lambda_r chi2_r (chi2_r on d_r degrees of freedom),
1/S = int_0^inf exp(-tS) dt and 1/S^2 = int_0^inf t exp(-tS) dt turn

    phi_j    = (1/d_j) E[lambda_j chi2_j / S]
    psi_jk   = (1/(d_j d_k)) E[lambda_j lambda_k chi2_j chi2_k / S^2]

into one-dimensional integrals of products (1 + 2 lambda_r t)^(-d_r/2 - e_r),
where e_r = 1 for the groups that appear in the numerator. The integrals
are taken in s = log t, with breakpoints at -log(2 lambda_r).
"""
import logging
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import integrate

from src.errors import ConvergenceError, DomainError, InvalidInputError, NumericalError
from src.linalg import Spectrum
from src.sampling import SeedSpec, chi_square_draws

logger = logging.getLogger(__name__)

QUAD_EPSABS = 1e-13
QUAD_EPSREL = 1e-11
_TAIL = 45.0
_MAX_QUAD_RELERR = 1e-9


def _check_groups(values: Sequence[float], multiplicities: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
    lam = np.asarray(values, dtype=float)
    sizes = np.asarray(multiplicities, dtype=float)
    if lam.ndim != 1 or lam.shape != sizes.shape or lam.size == 0:
        raise InvalidInputError("eigenvalues and multiplicities must be aligned non-empty vectors")
    if np.any(sizes < 1) or np.any(sizes != np.round(sizes)):
        raise InvalidInputError(f"multiplicities must be positive integers, got {list(multiplicities)}")
    if not np.all(np.isfinite(lam)) or np.any(lam <= 0):
        raise DomainError(f"eigenvalues must be positive, got {lam.tolist()}")
    return lam / float(np.dot(lam, sizes)), sizes


def _laplace_integrals(
    lam: np.ndarray,
    sizes: np.ndarray,
    extra: np.ndarray,
    t_power: int,
    epsabs: float,
    epsrel: float,
) -> np.ndarray:
    """Vector of int_0^inf t^p prod_r (1 + 2 lam_r t)^(-sizes_r/2 - extra[i, r]) dt, one per row of extra.

    Rows are integrated separately, each against a relative error gate.
    """
    base = sizes / 2.0
    breaks = np.unique(-np.log(2.0 * lam))
    lo, hi = breaks[0] - _TAIL, breaks[-1] + _TAIL
    values = np.empty(extra.shape[0])
    for row, exponents in enumerate(base[None, :] + extra):

        def integrand(s: float, exponents=exponents) -> float:
            t = np.exp(s)
            return float(np.exp((t_power + 1) * s - exponents @ np.log1p(2.0 * lam * t)))

        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            value, error = integrate.quad_vec(
                integrand, lo, hi, epsabs=epsabs, epsrel=epsrel, points=list(breaks), limit=500
            )
        for w in caught:
            logger.debug("quadrature warning: %s", w.message)
        value = float(np.asarray(value))
        if not np.isfinite(value) or value <= 0 or error > _MAX_QUAD_RELERR * value:
            raise NumericalError(
                f"quadrature failed to reach tolerance (error estimate {error:.3e} on {value:.3e})"
            )
        values[row] = value
    return values


def phi_values(
    values: Sequence[float],
    multiplicities: Sequence[int],
    epsabs: float = QUAD_EPSABS,
    epsrel: float = QUAD_EPSREL,
) -> np.ndarray:
    """phi_(j) for every group of an eigenvalue vector; ties between groups are allowed."""
    lam, sizes = _check_groups(values, multiplicities)
    extra = np.eye(lam.size)
    return lam * _laplace_integrals(lam, sizes, extra, 0, epsabs, epsrel)


def psi_table(
    values: Sequence[float],
    multiplicities: Sequence[int],
    epsabs: float = QUAD_EPSABS,
    epsrel: float = QUAD_EPSREL,
) -> np.ndarray:
    """Symmetric m x m table of psi_(j,k); the diagonal is undefined and set to NaN."""
    lam, sizes = _check_groups(values, multiplicities)
    m = lam.size
    pairs = [(j, k) for j in range(m) for k in range(j + 1, m)]
    table = np.full((m, m), np.nan)
    if not pairs:
        return table
    extra = np.zeros((len(pairs), m))
    for row, (j, k) in enumerate(pairs):
        extra[row, j] = extra[row, k] = 1.0
    integrals = _laplace_integrals(lam, sizes, extra, 1, epsabs, epsrel)
    for (j, k), value in zip(pairs, integrals):
        table[j, k] = table[k, j] = lam[j] * lam[k] * value
    return table


def psi_value(values: Sequence[float], multiplicities: Sequence[int], j: int, k: int) -> float:
    """psi_(j,k) for a single pair of groups."""
    if j == k:
        raise InvalidInputError("psi is only defined for distinct groups j != k")
    m = len(values)
    if not (0 <= j < m and 0 <= k < m):
        raise InvalidInputError(f"group indices ({j}, {k}) out of range for {m} groups")
    return float(psi_table(values, multiplicities)[j, k])


def phi_map(spectrum: Spectrum) -> np.ndarray:
    """Eigenvalues phi_(j) of Xi = E[theta theta^T], one per eigenvalue group.

    Args:
        spectrum: Spectrum of Gamma; it is trace-normalized internally.

    Returns:
        Array of per-group values with sum_j d_j phi_j = 1.

    Raises:
        DomainError: If an eigenvalue is not positive.
    """
    return phi_values(spectrum.distinct_values, spectrum.multiplicities)


def psi_jk(spectrum: Spectrum, j: int, k: int) -> float:
    """psi_(j,k) for groups j != k of a spectrum (0-based indices)."""
    return psi_value(spectrum.distinct_values, spectrum.multiplicities, j, k)


@dataclass(frozen=True)
class OracleEstimate:
    """Monte Carlo estimates of phi and psi with their standard errors."""

    phi: np.ndarray
    phi_se: np.ndarray
    psi: np.ndarray
    psi_se: np.ndarray
    draws: int


def chi_square_oracle(
    values: Sequence[float],
    multiplicities: Sequence[int],
    n_draws: int = 10_000_000,
    master_seed: int = 0,
    chunk: int = 1_000_000,
) -> OracleEstimate:
    """Estimate phi and psi by direct chi-square simulation.

    Draws are generated in chunks, chunk i from stream (master_seed, i).
    """
    lam, sizes = _check_groups(values, multiplicities)
    m = lam.size
    first = np.zeros(m)
    first_sq = np.zeros(m)
    second = np.zeros((m, m))
    second_sq = np.zeros((m, m))
    done = 0
    index = 0
    while done < n_draws:
        size = min(chunk, n_draws - done)
        weighted = chi_square_draws(sizes.astype(int), size, SeedSpec(master_seed, index)) * lam
        total = weighted.sum(axis=1)
        ratios = weighted / total[:, None]
        phi_samples = ratios / sizes
        first += phi_samples.sum(axis=0)
        first_sq += (phi_samples**2).sum(axis=0)
        for j in range(m):
            for k in range(j + 1, m):
                sample = ratios[:, j] * ratios[:, k] / (sizes[j] * sizes[k])
                second[j, k] += sample.sum()
                second_sq[j, k] += (sample**2).sum()
        done += size
        index += 1

    def mean_and_se(total_sum, total_sq):
        mean = total_sum / done
        var = np.maximum(total_sq / done - mean**2, 0.0) * done / max(done - 1, 1)
        return mean, np.sqrt(var / done)

    phi, phi_se = mean_and_se(first, first_sq)
    psi, psi_se = mean_and_se(second, second_sq)
    psi = psi + psi.T
    psi_se = psi_se + psi_se.T
    np.fill_diagonal(psi, np.nan)
    np.fill_diagonal(psi_se, np.nan)
    return OracleEstimate(phi, phi_se, psi, psi_se, done)


def invert_phi_map_grouped(
    phi_hat: Sequence[float],
    multiplicities: Sequence[int],
    step: float = 0.5,
    tol: float = 1e-10,
    max_iter: int = 10_000,
) -> np.ndarray:
    """Group eigenvalues Lambda (trace one) with h(Lambda) = phi_hat.

    Damped multiplicative fixed point
    lambda_j <- lambda_j * (phi_hat_j / phi_j(Lambda))^step, renormalized to
    trace one after every step.

    Raises:
        InvalidInputError: If phi_hat is not positive, descending and of unit trace.
        ConvergenceError: If the residual does not fall below tol within max_iter.
    """
    target = np.asarray(phi_hat, dtype=float)
    sizes = np.asarray(multiplicities, dtype=float)
    if target.shape != sizes.shape or target.size == 0:
        raise InvalidInputError("phi_hat and multiplicities must be aligned non-empty vectors")
    if not np.all(np.isfinite(target)) or np.any(target <= 0):
        raise InvalidInputError(f"phi_hat must be positive, got {target.tolist()}")
    if np.any(np.diff(target) > 0):
        raise InvalidInputError("phi_hat must be in descending order")
    trace = float(np.dot(target, sizes))
    if abs(trace - 1.0) > 1e-6:
        raise InvalidInputError(f"phi_hat must have trace 1 within 1e-6, got {trace:.9f}")
    target = target / trace

    lam = target.copy()
    residual = np.inf
    for iteration in range(1, max_iter + 1):
        current = phi_values(lam, sizes)
        residual = float(np.max(np.abs(current - target)))
        if residual < tol:
            logger.debug("phi inversion converged in %d iterations", iteration)
            return lam
        lam = lam * (target / current) ** step
        lam /= float(np.dot(lam, sizes))
    raise ConvergenceError("phi-map inversion did not converge", max_iter, residual)


def invert_phi_map(
    phi_hat: Sequence[float],
    step: float = 0.5,
    tol: float = 1e-10,
    max_iter: int = 10_000,
) -> np.ndarray:
    """Eigenvalue vector Lambda (trace one) whose image under h is phi_hat."""
    target = np.asarray(phi_hat, dtype=float)
    return invert_phi_map_grouped(target, np.ones(target.size), step, tol, max_iter)
