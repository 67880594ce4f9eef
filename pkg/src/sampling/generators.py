"""Reproducible normal, elliptical and angular central Gaussian samples.

Each draw is driven by a SeedSpec. A (master_seed, stream_id) pair maps
to its own PCG64 stream through numpy's SeedSequence spawn keys, so a
replicate gets the same numbers no matter which worker runs it or in
what order.
"""
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from src.errors import DomainError, InvalidInputError
from src.linalg import SymMatrix, as_symmetric, sym_eig
from src.sampling.radial import RadialLaw

_U64 = 2**64
_U32 = 2**32


@dataclass(frozen=True)
class SeedSpec:
    """Master seed plus stream index of one random stream."""

    master_seed: int
    stream_id: int = 0

    def __post_init__(self):
        for name in ("master_seed", "stream_id"):
            value = getattr(self, name)
            if int(value) != value or not 0 <= value < _U64:
                raise InvalidInputError(f"{name} must be an unsigned 64-bit integer, got {value}")

    def generator(self) -> np.random.Generator:
        sequence = np.random.SeedSequence(int(self.master_seed), spawn_key=(int(self.stream_id),))
        return np.random.Generator(np.random.PCG64(sequence))


def stream_for(master_seed: int, *keys: int) -> SeedSpec:
    """SeedSpec whose stream id packs up to two 32-bit keys, e.g. (n, replicate)."""
    if not 1 <= len(keys) <= 2:
        raise InvalidInputError(f"stream_for takes one or two keys, got {len(keys)}")
    stream_id = 0
    for key in keys:
        if int(key) != key or not 0 <= key < _U32:
            raise InvalidInputError(f"stream key {key} is not an unsigned 32-bit integer")
        stream_id = stream_id * _U32 + int(key)
    return SeedSpec(master_seed, stream_id)


@dataclass(frozen=True)
class Dataset:
    """n observations in d dimensions, with an optional known center."""

    rows: np.ndarray = field(repr=False)
    center: Optional[np.ndarray] = None

    def __post_init__(self):
        rows = np.array(self.rows, dtype=float)
        if rows.ndim == 1:
            rows = rows.reshape(1, -1)
        if rows.ndim != 2 or rows.shape[0] < 1 or rows.shape[1] < 1:
            raise InvalidInputError(f"dataset must be a non-empty n x d array, got shape {rows.shape}")
        if not np.all(np.isfinite(rows)):
            raise InvalidInputError("dataset has non-finite entries")
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)
        if self.center is not None:
            center = np.array(self.center, dtype=float).ravel()
            if center.shape != (rows.shape[1],) or not np.all(np.isfinite(center)):
                raise InvalidInputError(f"center must be a finite vector of length {rows.shape[1]}")
            center.setflags(write=False)
            object.__setattr__(self, "center", center)

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    @property
    def d(self) -> int:
        return self.rows.shape[1]


def pd_sqrt(Gamma: Union[SymMatrix, np.ndarray]) -> np.ndarray:
    """Unique positive definite square root Q diag(sqrt(lambda)) Q^T.

    Raises:
        DomainError: If Gamma is not positive definite.
    """
    values, Q = sym_eig(Gamma)
    if values[-1] <= 0:
        raise DomainError(f"scatter matrix is not positive definite (smallest eigenvalue {values[-1]:.3e})")
    return (Q * np.sqrt(values)) @ Q.T


def _prepare(n: int, Gamma) -> tuple[int, np.ndarray]:
    if int(n) != n or n < 1:
        raise InvalidInputError(f"sample size must be a positive integer, got {n}")
    return int(n), pd_sqrt(as_symmetric(Gamma))


def sample_normal(n: int, Gamma, seed: SeedSpec) -> Dataset:
    """n i.i.d. rows from Normal_d(0, Gamma)."""
    n, root = _prepare(n, Gamma)
    z = seed.generator().standard_normal((n, root.shape[0]))
    return Dataset(z @ root, center=np.zeros(root.shape[0]))


def sample_elliptical(n: int, Gamma, radial: RadialLaw, seed: SeedSpec) -> Dataset:
    """n i.i.d. rows R * Gamma^(1/2) u with u uniform on the sphere.

    The direction u and, for the chi law, the radius come from the same
    standard normal draws, so ``RadialLaw.chi()`` reproduces sample_normal.
    """
    n, root = _prepare(n, Gamma)
    d = root.shape[0]
    rng = seed.generator()
    z = rng.standard_normal((n, d))
    norms = np.linalg.norm(z, axis=1)
    radii = radial.draw(rng, norms, d)
    u = z / norms[:, None]
    return Dataset((radii[:, None] * u) @ root, center=np.zeros(d))


def sample_acg(n: int, Gamma, seed: SeedSpec) -> Dataset:
    """n unit vectors z / ||z|| with z ~ Normal_d(0, Gamma)."""
    n, root = _prepare(n, Gamma)
    z = seed.generator().standard_normal((n, root.shape[0])) @ root
    return Dataset(z / np.linalg.norm(z, axis=1)[:, None], center=np.zeros(root.shape[0]))


def chi_square_draws(dofs: Sequence[int], n: int, seed: SeedSpec) -> np.ndarray:
    """n x m array of independent chi-square draws, column r on dofs[r] degrees of freedom."""
    if any(k <= 0 for k in dofs):
        raise DomainError(f"degrees of freedom must be positive, got {list(dofs)}")
    rng = seed.generator()
    return np.column_stack([rng.chisquare(float(k), size=int(n)) for k in dofs])
