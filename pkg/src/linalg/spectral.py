"""Dense symmetric matrices, their spectra and singular values."""
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from src.errors import InvalidInputError, NumericalError


ArrayLike = Union[np.ndarray, Sequence[Sequence[float]]]


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class SymMatrix:
    """Dense symmetric d x d matrix of reals.

    The stored entries are the symmetric part of the input, so
    ``entries[i, j] == entries[j, i]`` holds exactly. The array is
    read-only; use ``to_array`` for a writable copy.
    """

    entries: np.ndarray

    def __post_init__(self):
        array = np.array(self.entries, dtype=float)
        if array.ndim != 2 or array.shape[0] != array.shape[1] or array.shape[0] < 1:
            raise InvalidInputError(f"expected a non-empty square matrix, got shape {array.shape}")
        if not np.all(np.isfinite(array)):
            raise InvalidInputError("matrix has non-finite entries")
        object.__setattr__(self, "entries", _frozen(0.5 * (array + array.T)))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def trace(self) -> float:
        return float(np.trace(self.entries))

    def to_array(self) -> np.ndarray:
        return self.entries.copy()

    @classmethod
    def identity(cls, d: int) -> "SymMatrix":
        return cls(np.eye(d))

    @classmethod
    def diagonal(cls, values: Sequence[float]) -> "SymMatrix":
        return cls(np.diag(np.asarray(values, dtype=float)))


def as_symmetric(A: Union[SymMatrix, ArrayLike]) -> SymMatrix:
    """Accept a SymMatrix or anything numpy can turn into one."""
    if isinstance(A, SymMatrix):
        return A
    return SymMatrix(np.asarray(A, dtype=float))


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues grouped into distinct values, plus an orthonormal basis.

    Attributes:
        distinct_values: Strictly decreasing distinct eigenvalues.
        multiplicities: Size of each eigenvalue group, summing to d.
        basis: Orthogonal d x d matrix whose columns are grouped by eigenvalue.
    """

    distinct_values: tuple
    multiplicities: tuple
    basis: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = tuple(float(v) for v in self.distinct_values)
        sizes = tuple(int(k) for k in self.multiplicities)
        basis = np.array(self.basis, dtype=float)
        if len(values) != len(sizes) or not values:
            raise InvalidInputError("distinct_values and multiplicities must be non-empty and aligned")
        if any(k < 1 for k in sizes):
            raise InvalidInputError(f"multiplicities must be positive, got {sizes}")
        d = sum(sizes)
        if basis.shape != (d, d):
            raise InvalidInputError(f"basis must be {d}x{d}, got {basis.shape}")
        if any(b >= a for a, b in zip(values, values[1:])):
            raise InvalidInputError(f"distinct values must be strictly decreasing, got {values}")
        if not np.all(np.isfinite(values)):
            raise InvalidInputError("spectrum has non-finite eigenvalues")
        if np.max(np.abs(basis.T @ basis - np.eye(d))) > 1e-10:
            raise InvalidInputError("basis is not orthonormal")
        object.__setattr__(self, "distinct_values", values)
        object.__setattr__(self, "multiplicities", sizes)
        object.__setattr__(self, "basis", _frozen(basis))

    @property
    def dim(self) -> int:
        return sum(self.multiplicities)

    @property
    def groups(self) -> int:
        return len(self.multiplicities)

    @property
    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues expanded by multiplicity, descending."""
        return np.repeat(self.distinct_values, self.multiplicities)

    def group_slice(self, j: int) -> slice:
        """Columns of the basis that belong to group j (0-based)."""
        if not 0 <= j < self.groups:
            raise InvalidInputError(f"group index {j} out of range for {self.groups} groups")
        start = sum(self.multiplicities[:j])
        return slice(start, start + self.multiplicities[j])

    def projector(self, j: int) -> np.ndarray:
        """Eigenprojection P_j onto the eigenspace of group j."""
        Q = self.basis[:, self.group_slice(j)]
        return Q @ Q.T

    def reconstruct(self) -> np.ndarray:
        return sum(lam * self.projector(j) for j, lam in enumerate(self.distinct_values))

    def normalized(self) -> "Spectrum":
        """The same spectrum rescaled to trace one."""
        total = float(np.dot(self.distinct_values, self.multiplicities))
        if total <= 0:
            raise InvalidInputError("cannot trace-normalize a spectrum with non-positive trace")
        return Spectrum(
            tuple(v / total for v in self.distinct_values), self.multiplicities, self.basis
        )

    @classmethod
    def from_groups(
        cls,
        values: Sequence[float],
        multiplicities: Sequence[int],
        basis: Optional[np.ndarray] = None,
    ) -> "Spectrum":
        """Build a spectrum from group values, using the identity basis by default."""
        d = int(sum(multiplicities))
        return cls(tuple(values), tuple(multiplicities), np.eye(d) if basis is None else basis)


def sym_eig(A: Union[SymMatrix, ArrayLike]) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a symmetric matrix.

    Args:
        A: Symmetric matrix with finite entries.

    Returns:
        Tuple ``(eigenvalues, Q)`` with eigenvalues in descending order and
        orthonormal eigenvector columns, so that ``A = Q diag(eigenvalues) Q^T``.

    Raises:
        InvalidInputError: If A is not square or has non-finite entries.
    """
    S = as_symmetric(A)
    values, vectors = np.linalg.eigh(S.entries)
    order = np.argsort(values)[::-1]
    return values[order], vectors[:, order]


def group_eigenvalues(values: np.ndarray, tol: float = 1e-8) -> list[int]:
    """Split descending eigenvalues into groups of numerically equal values.

    Consecutive values merge when their gap is below ``tol * max(|lambda_1|, 1)``.
    """
    values = np.asarray(values, dtype=float)
    threshold = tol * max(abs(float(values[0])), 1.0)
    sizes = [1]
    for previous, current in zip(values, values[1:]):
        if previous - current < threshold:
            sizes[-1] += 1
        else:
            sizes.append(1)
    return sizes


def spectrum_of(
    A: Union[SymMatrix, ArrayLike],
    tol: float = 1e-8,
    multiplicities: Optional[Sequence[int]] = None,
) -> Spectrum:
    """Spectral decomposition of A grouped into distinct eigenvalues.

    Args:
        A: Symmetric matrix.
        tol: Relative gap below which consecutive eigenvalues are merged.
        multiplicities: Optional forced group sizes; each group's value is the
            mean of its eigenvalues.

    Returns:
        The grouped Spectrum.
    """
    values, Q = sym_eig(A)
    if multiplicities is None:
        sizes = group_eigenvalues(values, tol)
    else:
        sizes = [int(k) for k in multiplicities]
        if sum(sizes) != len(values) or any(k < 1 for k in sizes):
            raise InvalidInputError(
                f"multiplicities {sizes} do not partition dimension {len(values)}"
            )
    bounds = np.cumsum([0] + sizes)
    distinct = [float(np.mean(values[a:b])) for a, b in zip(bounds, bounds[1:])]
    return Spectrum(tuple(distinct), tuple(sizes), Q)


def singular_values(B: ArrayLike, orthonormal_product: bool = False) -> np.ndarray:
    """Singular values of a rectangular matrix, descending.

    Args:
        B: Finite matrix (a vector is treated as a single row).
        orthonormal_product: Declare that B is a product of orthonormal bases,
            so its singular values are cosines and are clamped to [0, 1].

    Raises:
        InvalidInputError: If B has non-finite entries.
        NumericalError: If B is declared an orthonormal product but a singular
            value exceeds one by more than rounding.
    """
    B = np.atleast_2d(np.asarray(B, dtype=float))
    if B.ndim != 2 or not np.all(np.isfinite(B)):
        raise InvalidInputError("singular_values expects a finite matrix")
    sigma = np.linalg.svd(B, compute_uv=False)
    if orthonormal_product:
        if np.any(sigma > 1.0 + 1e-8):
            raise NumericalError(
                f"cosine {sigma.max():.12g} exceeds one; inputs are not orthonormal bases"
            )
        sigma = np.clip(sigma, 0.0, 1.0)
    return sigma
