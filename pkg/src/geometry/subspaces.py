"""Subspaces, eigenprojections and principal angles."""
import logging
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from src.errors import InvalidInputError
from src.linalg import SymMatrix, as_symmetric, singular_values, sym_eig

logger = logging.getLogger(__name__)

SMALL_ANGLE_COSINE = 1.0 - 1e-6
_SPLIT_TOL = 1e-8


@dataclass(frozen=True)
class Subspace:
    """Linear subspace of R^d given by an orthonormal basis (columns)."""

    basis: np.ndarray = field(repr=False)

    def __post_init__(self):
        basis = np.array(self.basis, dtype=float)
        if basis.ndim == 1:
            basis = basis.reshape(-1, 1)
        if basis.ndim != 2 or not 1 <= basis.shape[1] <= basis.shape[0]:
            raise InvalidInputError(f"basis must be d x l with 1 <= l <= d, got shape {basis.shape}")
        if not np.all(np.isfinite(basis)):
            raise InvalidInputError("basis has non-finite entries")
        if np.max(np.abs(basis.T @ basis - np.eye(basis.shape[1]))) > 1e-10:
            raise InvalidInputError("basis columns are not orthonormal")
        basis.setflags(write=False)
        object.__setattr__(self, "basis", basis)

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.T

    def rotated(self, Q: np.ndarray) -> "Subspace":
        return Subspace(np.asarray(Q, dtype=float) @ self.basis)

    @classmethod
    def spanned_by(cls, vectors, orthonormalize: bool = True) -> "Subspace":
        """Subspace spanned by the columns of vectors, QR-orthonormalized by default."""
        vectors = np.array(vectors, dtype=float)
        if vectors.ndim == 1:
            vectors = vectors.reshape(-1, 1)
        if orthonormalize:
            if np.linalg.matrix_rank(vectors) < vectors.shape[1]:
                raise InvalidInputError("spanning vectors are linearly dependent")
            vectors = np.linalg.qr(vectors)[0]
        return cls(vectors)


@dataclass(frozen=True)
class AngleSet:
    """Principal angles in ascending order, each in [0, pi/2]."""

    angles: tuple

    def __post_init__(self):
        angles = tuple(float(a) for a in self.angles)
        if any(not 0.0 <= a <= np.pi / 2 for a in angles):
            raise InvalidInputError(f"principal angles must lie in [0, pi/2], got {angles}")
        if any(b < a for a, b in zip(angles, angles[1:])):
            raise InvalidInputError("principal angles must be ascending")
        object.__setattr__(self, "angles", angles)

    def __len__(self) -> int:
        return len(self.angles)

    def sum_of_squares(self) -> float:
        return float(np.sum(np.square(self.angles)))


def eigenprojection(estimate, group_sizes: Sequence[int], j: int) -> tuple[Subspace, SymMatrix]:
    """Estimated eigenspace and eigenprojection of group j (0-based).

    Args:
        estimate: A ScatterEstimate or a symmetric matrix.
        group_sizes: Multiplicities of the eigenvalue groups, largest eigenvalues first.
        j: Group index.

    Returns:
        The eigenspace and its projector sum_k q_k q_k^T over the group's eigenvectors.
    """
    matrix = getattr(estimate, "matrix", estimate)
    values, Q = sym_eig(matrix)
    sizes = [int(k) for k in group_sizes]
    if sum(sizes) != len(values) or any(k < 1 for k in sizes):
        raise InvalidInputError(f"group sizes {sizes} do not partition dimension {len(values)}")
    if not 0 <= j < len(sizes):
        raise InvalidInputError(f"group index {j} out of range for {len(sizes)} groups")
    bounds = np.cumsum([0] + sizes)
    scale = max(abs(values[0]), np.finfo(float).tiny)
    for b in bounds[1:-1]:
        if values[b - 1] - values[b] < _SPLIT_TOL * scale:
            logger.warning(
                "group boundary after eigenvalue %d splits numerically equal eigenvalues (%.12g, %.12g)",
                b, values[b - 1], values[b],
            )
    basis = Q[:, bounds[j] : bounds[j + 1]]
    return Subspace(basis), SymMatrix(basis @ basis.T)


def principal_angles(L: Subspace, M: Subspace) -> AngleSet:
    """Principal angles between two subspaces of the same space.

    cos(theta_i) are the singular values of Q_M^T Q_L. Angles whose cosine
    exceeds 1 - 1e-6 are recomputed from the sines, the singular values of
    (I - P_M) Q_L, which keeps small angles accurate.

    Raises:
        InvalidInputError: If the ambient dimensions differ.
    """
    if L.ambient_dim != M.ambient_dim:
        raise InvalidInputError(
            f"subspaces live in different spaces (R^{L.ambient_dim} vs R^{M.ambient_dim})"
        )
    if L.dim > M.dim:
        L, M = M, L
    cosines = singular_values(M.basis.T @ L.basis, orthonormal_product=True)
    angles = np.arccos(cosines)
    small = cosines > SMALL_ANGLE_COSINE
    if np.any(small):
        residual = L.basis - M.basis @ (M.basis.T @ L.basis)
        sines = np.sort(np.clip(np.linalg.svd(residual, compute_uv=False), 0.0, 1.0))
        angles[small] = np.arcsin(sines[: L.dim][small])
    return AngleSet(tuple(np.clip(np.sort(angles), 0.0, np.pi / 2)))


def squared_angle_loss(
    P_hat: Union[SymMatrix, np.ndarray],
    P_true: Union[SymMatrix, np.ndarray],
    d1: int,
    trace_tol: float = 1e-6,
) -> float:
    """Sum of squared principal angles between the ranges of two rank-d1 projectors.

    The cosines are square roots of the eigenvalues of the d1 x d1 block
    Q1^T P_hat Q1, with Q1 spanning the range of P_true; small angles use
    the sines from the block Q1^T (I - P_hat) Q1.

    Raises:
        InvalidInputError: If either projector's trace differs from d1.
    """
    P_hat = as_symmetric(P_hat).entries
    P_true = as_symmetric(P_true).entries
    if P_hat.shape != P_true.shape:
        raise InvalidInputError(f"projectors have different shapes {P_hat.shape} and {P_true.shape}")
    for name, P in (("P_hat", P_hat), ("P_true", P_true)):
        if abs(np.trace(P) - d1) > trace_tol:
            raise InvalidInputError(f"{name} has trace {np.trace(P):.9g}, expected {d1}")
    _, Q = sym_eig(P_true)
    Q1 = Q[:, :d1]
    cos2 = np.clip(np.linalg.eigvalsh(Q1.T @ P_hat @ Q1), 0.0, 1.0)
    complement = np.eye(P_hat.shape[0]) - P_hat
    sin2 = np.clip(np.linalg.eigvalsh(Q1.T @ complement @ Q1), 0.0, 1.0)
    cosines = np.sqrt(cos2)[::-1]
    angles = np.arccos(cosines)
    small = cosines > SMALL_ANGLE_COSINE
    angles[small] = np.arcsin(np.sqrt(sin2[small]))
    return float(np.sum(angles**2))
