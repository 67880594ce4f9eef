"""Gauss hypergeometric function 2F1(a, b; c; kappa) on 0 <= kappa < 1.

For kappa <= 0.5 the defining power series is summed directly. Above
that, the function is rewritten in powers of w = 1 - kappa through the
standard connection formulas, with the logarithmic form when c - a - b
is an integer. Every series therefore runs with a ratio of at most 1/2.
"""
import math
from dataclasses import dataclass

from scipy import special as sp

from src.errors import ConvergenceError, DomainError

DEFAULT_MAX_TERMS = 1_000_000
_SWITCH = 0.5
_EPS = 1e-17
_INT_TOL = 1e-9


def _is_nonpositive_integer(x: float) -> bool:
    return x <= 0 and abs(x - round(x)) < _INT_TOL


def _is_integer(x: float) -> bool:
    return abs(x - round(x)) < _INT_TOL


@dataclass(frozen=True)
class Hyp2F1Params:
    """Arguments of 2F1(a, b; c; kappa).

    Raises:
        DomainError: If c is a non-positive integer or kappa is outside [0, 1).
    """

    a: float
    b: float
    c: float
    kappa: float

    def __post_init__(self):
        if _is_nonpositive_integer(self.c):
            raise DomainError(f"2F1 is undefined for non-positive integer c={self.c}")
        if not 0.0 <= self.kappa < 1.0:
            raise DomainError(f"2F1 argument kappa={self.kappa} must lie in [0, 1)")

    def value(self, max_terms: int = DEFAULT_MAX_TERMS) -> float:
        return hyp2f1(self.a, self.b, self.c, self.kappa, max_terms=max_terms)


def _power_series(a: float, b: float, c: float, z: float, max_terms: int) -> float:
    """Sum sum_k (a)_k (b)_k / ((c)_k k!) z^k with compensated summation."""
    terms = [1.0]
    term = 1.0
    running = 1.0
    for k in range(max_terms):
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z
        if term == 0.0:
            return math.fsum(terms)
        terms.append(term)
        running += term
        # the ratio test only means something once the ratio has settled below one
        if abs(term) <= _EPS * abs(running) and abs((a + k) * (b + k) * z) < abs((c + k) * (k + 1.0)):
            return math.fsum(terms)
    raise ConvergenceError(
        f"2F1({a:g}, {b:g}; {c:g}; {z:.17g}) series did not converge", max_terms, abs(term)
    )


def _connection_nonint(a: float, b: float, c: float, w: float, max_terms: int) -> float:
    """Two-term connection formula in w = 1 - z when s = c - a - b is not an integer."""
    s = c - a - b
    first = sp.gamma(c) * sp.gamma(s) * sp.rgamma(c - a) * sp.rgamma(c - b)
    second = sp.gamma(c) * sp.gamma(-s) * sp.rgamma(a) * sp.rgamma(b)
    total = first * _power_series(a, b, 1.0 - s, w, max_terms)
    if second != 0.0:
        total += second * w**s * _power_series(c - a, c - b, 1.0 + s, w, max_terms)
    return float(total)


def _connection_log(a: float, b: float, m: int, w: float, max_terms: int) -> float:
    """Logarithmic connection formula for c = a + b + m with integer m >= 0."""
    c = a + b + m
    finite = [
        sp.poch(a, n) * sp.poch(b, n) * math.factorial(m - n - 1) / math.factorial(n) * (-w) ** n
        for n in range(m)
    ]
    head = sp.gamma(c) * sp.rgamma(a + m) * sp.rgamma(b + m) * math.fsum(finite)

    log_w = math.log(w)
    psi_1 = sp.digamma(1.0)
    psi_2 = sp.digamma(m + 1.0)
    psi_3 = sp.digamma(a + m)
    psi_4 = sp.digamma(b + m)
    coef = 1.0 / math.factorial(m)
    terms = []
    running = 0.0
    for n in range(max_terms):
        term = coef * (log_w - psi_1 - psi_2 + psi_3 + psi_4)
        terms.append(term)
        running += term
        if n > 0 and abs(term) <= _EPS * max(abs(running), abs(terms[0])):
            break
        coef *= (a + m + n) * (b + m + n) / ((n + 1.0) * (n + m + 1.0)) * w
        psi_1 += 1.0 / (n + 1.0)
        psi_2 += 1.0 / (n + m + 1.0)
        psi_3 += 1.0 / (a + m + n)
        psi_4 += 1.0 / (b + m + n)
    else:
        raise ConvergenceError(
            f"2F1 logarithmic series for a={a:g}, b={b:g}, m={m} did not converge",
            max_terms,
            abs(terms[-1]),
        )
    tail = -sp.gamma(c) * sp.rgamma(a) * sp.rgamma(b) * (-w) ** m * math.fsum(terms)
    return float(head + tail)


def hyp2f1(a: float, b: float, c: float, kappa: float, max_terms: int = DEFAULT_MAX_TERMS) -> float:
    """Evaluate the Gauss hypergeometric function 2F1(a, b; c; kappa).

    Args:
        a, b, c: Real parameters; c must not be a non-positive integer.
        kappa: Argument in [0, 1).
        max_terms: Term budget for each series.

    Returns:
        The function value.

    Raises:
        DomainError: If kappa is outside [0, 1) or c is a non-positive integer.
        ConvergenceError: If a series exhausts its term budget.
    """
    Hyp2F1Params(a, b, c, kappa)
    a, b, c, z = float(a), float(b), float(c), float(kappa)
    if z == 0.0:
        return 1.0
    if z <= _SWITCH or _is_nonpositive_integer(a) or _is_nonpositive_integer(b):
        return _power_series(a, b, c, z, max_terms)

    w = 1.0 - z
    s = c - a - b
    if not _is_integer(s):
        return _connection_nonint(a, b, c, w, max_terms)
    m = int(round(s))
    if m >= 0:
        return _connection_log(a, b, m, w, max_terms)
    # Euler: 2F1(a,b;c;z) = (1-z)^(c-a-b) 2F1(c-a,c-b;c;z), which flips the sign of m
    return w**m * _connection_log(c - a, c - b, -m, w, max_terms)
