"""Eigenprojections and principal angles between subspaces."""
from src.geometry.subspaces import (
    AngleSet,
    Subspace,
    eigenprojection,
    principal_angles,
    squared_angle_loss,
)

__all__ = [
    "AngleSet",
    "Subspace",
    "eigenprojection",
    "principal_angles",
    "squared_angle_loss",
]
