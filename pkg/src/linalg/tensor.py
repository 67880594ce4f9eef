"""vec, Kronecker products and the commutation matrix on d^2 x d^2 tensors."""
from dataclasses import dataclass

import numpy as np

from src.errors import InvalidInputError


@dataclass(frozen=True)
class TensorMatrix:
    """A d^2 x d^2 real matrix acting on vec of d x d matrices."""

    entries: np.ndarray

    def __post_init__(self):
        array = np.array(self.entries, dtype=float)
        n = array.shape[0] if array.ndim == 2 else -1
        root = int(round(np.sqrt(max(n, 0))))
        if array.ndim != 2 or array.shape != (n, n) or root * root != n or n < 1:
            raise InvalidInputError(f"expected a d^2 x d^2 matrix, got shape {array.shape}")
        if not np.all(np.isfinite(array)):
            raise InvalidInputError("tensor matrix has non-finite entries")
        array.setflags(write=False)
        object.__setattr__(self, "entries", array)

    @property
    def dim(self) -> int:
        """Size d^2 of the matrix."""
        return self.entries.shape[0]

    @property
    def base_dim(self) -> int:
        """The d of the underlying d x d matrices."""
        return int(round(np.sqrt(self.dim)))

    def trace(self) -> float:
        return float(np.trace(self.entries))

    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues of the symmetric part, descending."""
        sym = 0.5 * (self.entries + self.entries.T)
        return np.sort(np.linalg.eigvalsh(sym))[::-1]

    def rank(self, threshold: float = 1e-8) -> int:
        return int(np.sum(np.abs(self.eigenvalues()) > threshold))


def _matrix(A, name: str) -> np.ndarray:
    array = np.asarray(A, dtype=float)
    if array.ndim != 2:
        raise InvalidInputError(f"{name} must be a matrix, got {array.ndim} dimensions")
    if not np.all(np.isfinite(array)):
        raise InvalidInputError(f"{name} has non-finite entries")
    return array


def vec(A) -> np.ndarray:
    """Stack the columns of A into one vector."""
    return _matrix(A, "A").reshape(-1, order="F")


def unvec(v, rows: int) -> np.ndarray:
    """Inverse of vec for a matrix with the given number of rows."""
    v = np.asarray(v, dtype=float).ravel()
    if rows < 1 or v.size % rows:
        raise InvalidInputError(f"cannot reshape {v.size} entries into {rows} rows")
    return v.reshape((rows, v.size // rows), order="F")


def kron(A, B) -> np.ndarray:
    """Kronecker product A (x) B."""
    return np.kron(_matrix(A, "A"), _matrix(B, "B"))


def commutation_matrix(d: int) -> TensorMatrix:
    """Commutation matrix K_{d,d}, with K vec(A) = vec(A^T) and K^2 = I.

    Args:
        d: Size of the square matrices it acts on.
    """
    if int(d) != d or d < 1:
        raise InvalidInputError(f"commutation matrix needs a positive integer size, got {d}")
    d = int(d)
    K = np.zeros((d * d, d * d))
    i, j = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    K[(i + j * d).ravel(), (j + i * d).ravel()] = 1.0
    return TensorMatrix(K)


def symmetrizer(d: int) -> np.ndarray:
    """I + K_{d,d}, the operator that appears in every eigenprojection covariance."""
    return np.eye(d * d) + commutation_matrix(d).entries
