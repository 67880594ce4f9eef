"""Dense symmetric linear algebra and tensor identities."""
from src.linalg.spectral import (
    SymMatrix,
    Spectrum,
    as_symmetric,
    group_eigenvalues,
    singular_values,
    spectrum_of,
    sym_eig,
)
from src.linalg.tensor import TensorMatrix, commutation_matrix, kron, symmetrizer, unvec, vec

__all__ = [
    "SymMatrix",
    "Spectrum",
    "TensorMatrix",
    "as_symmetric",
    "commutation_matrix",
    "group_eigenvalues",
    "kron",
    "singular_values",
    "spectrum_of",
    "sym_eig",
    "symmetrizer",
    "unvec",
    "vec",
]
