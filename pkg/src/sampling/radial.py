"""Radial laws R for elliptical samples x = R * Gamma^(1/2) u + mu."""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.errors import DomainError, InvalidInputError


@dataclass(frozen=True)
class RadialLaw:
    """Distribution of the radius R of an elliptical vector.

    Attributes:
        kind: One of "constant", "chi" or "student_t".
        parameter: The radius for "constant", the degrees of freedom for
            "student_t"; unused for "chi".
    """

    kind: str
    parameter: Optional[float] = None

    KINDS = ("constant", "chi", "student_t")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise InvalidInputError(f"unknown radial law {self.kind!r}; expected one of {self.KINDS}")
        if self.kind == "constant" and not (self.parameter or 0) > 0:
            raise DomainError(f"constant radius must be positive, got {self.parameter}")
        if self.kind == "student_t" and not (self.parameter or 0) > 0:
            raise DomainError(f"student_t needs nu > 0, got {self.parameter}")

    @classmethod
    def constant(cls, radius: float = 1.0) -> "RadialLaw":
        return cls("constant", float(radius))

    @classmethod
    def chi(cls) -> "RadialLaw":
        """R = ||z|| for z standard normal: the multivariate normal case."""
        return cls("chi")

    @classmethod
    def student_t(cls, nu: float) -> "RadialLaw":
        return cls("student_t", float(nu))

    @classmethod
    def parse(cls, text: str) -> "RadialLaw":
        """Parse "normal", "chi", "constant[:r]" or "t:<nu>"."""
        name, _, value = text.strip().lower().partition(":")
        try:
            if name in ("normal", "chi"):
                return cls.chi()
            if name == "constant":
                return cls.constant(float(value) if value else 1.0)
            if name in ("t", "student_t"):
                return cls.student_t(float(value))
        except ValueError as e:
            raise InvalidInputError(f"bad radial law {text!r}: {e}") from e
        raise InvalidInputError(f"unknown radial law {text!r}")

    def draw(self, rng: np.random.Generator, norms: np.ndarray, d: int) -> np.ndarray:
        """Radii for rows whose underlying standard normal draws have the given norms."""
        n = norms.shape[0]
        if self.kind == "constant":
            return np.full(n, self.parameter)
        if self.kind == "chi":
            return norms
        w = rng.chisquare(self.parameter, size=n)
        return norms / np.sqrt(w / self.parameter)

    def moment_ratio(self, d: int) -> float:
        """E[R^4] / E[R^2]^2 in dimension d.

        Raises:
            DomainError: For student_t with nu <= 4, where the fourth moment is infinite.
        """
        if self.kind == "constant":
            return 1.0
        if self.kind == "chi":
            return (d + 2.0) / d
        nu = self.parameter
        if nu <= 4:
            raise DomainError(f"student_t fourth moment is infinite for nu={nu} <= 4")
        return (d + 2.0) / d * (nu - 2.0) / (nu - 4.0)
