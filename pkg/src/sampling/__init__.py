"""Seeded random generation for elliptical and directional data."""
from src.sampling.radial import RadialLaw
from src.sampling.generators import (
    Dataset,
    SeedSpec,
    chi_square_draws,
    pd_sqrt,
    sample_acg,
    sample_elliptical,
    sample_normal,
    stream_for,
)

__all__ = [
    "Dataset",
    "RadialLaw",
    "SeedSpec",
    "chi_square_draws",
    "pd_sqrt",
    "sample_acg",
    "sample_elliptical",
    "sample_normal",
    "stream_for",
]
