"""Exception hierarchy shared by the library and the command line.

Every error carries the exit code the CLI reports for it: 2 for bad
input, 1 for numerical or convergence failures.
"""
from typing import Optional


class ScatterLabError(Exception):
    """Base class for all scatterlab errors."""

    exit_code = 1


class InvalidInputError(ScatterLabError, ValueError):
    """Arguments violate a documented precondition."""

    exit_code = 2


class DomainError(InvalidInputError):
    """A parameter lies outside the supported mathematical domain."""


class ConfigError(InvalidInputError):
    """A configuration file failed validation.

    Args:
        problems: Every validation failure found, reported together.
    """

    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("invalid configuration:\n  - " + "\n  - ".join(self.problems))


class DataParseError(InvalidInputError):
    """An input file could not be parsed."""

    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


class NumericalError(ScatterLabError, ArithmeticError):
    """A numerical procedure failed."""

    exit_code = 1


class ConvergenceError(NumericalError):
    """An iteration did not reach its tolerance within its budget."""

    def __init__(self, message: str, iterations: int, residual: float):
        self.iterations = iterations
        self.residual = residual
        super().__init__(f"{message} (iterations={iterations}, residual={residual:.3e})")


class DegenerateSpectrumError(NumericalError):
    """Eigenvalue groups that must be distinct coincide."""


class DegenerateDataError(NumericalError):
    """The data carry no usable directions."""


class ExistenceError(NumericalError):
    """The estimator is not defined for the given data."""


class RankDeficiencyError(NumericalError):
    """A matrix that must be positive definite is singular."""


class ReplicateFailureError(NumericalError):
    """Too many simulation replicates failed."""

    def __init__(self, failed: int, total: int, limit: float):
        self.failed = failed
        self.total = total
        super().__init__(
            f"{failed} of {total} replicates failed, above the allowed fraction {limit:g}"
        )
