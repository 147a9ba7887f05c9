"""The corner kernel, its power series at the origin and the cutoff splitting
used to continue its Mellin symbol."""
import csv
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb

import numpy as np

from .errors import DomainError
from .quadrature import cutoff, cutoff_log_derivative

# Number of series terms used wherever the kernel series replaces the kernel.
SERIES_TERMS = 64


def _check_alpha(alpha):
    if not (0.0 < alpha < np.pi):
        raise DomainError(f"angle {alpha!r} outside (0, pi)")


def kernel_eval(alpha, tau):
    """(4 sin^2(alpha) + (sqrt(tau) - 1/sqrt(tau))^2)^(-1/4) for tau > 0."""
    _check_alpha(alpha)
    tau = np.asarray(tau, dtype=float)
    if np.any(~(tau > 0)):
        raise DomainError("kernel argument must be positive")
    s = np.sqrt(tau)
    return (4.0 * np.sin(alpha) ** 2 + (s - 1.0 / s) ** 2) ** -0.25


def kernel_log(alpha, t):
    """Kernel as a function of t = log(tau); accepts complex t.

    Uses 4 sinh^2(t/2) + 4 sin^2(alpha), which equals 2(cosh t - cos 2 alpha)
    without the cancellation near t = 0.
    """
    t = np.asarray(t)
    return (4.0 * np.sinh(0.5 * t) ** 2 + 4.0 * np.sin(alpha) ** 2) ** -0.25


def singular_kernel_log(u):
    """Degenerate kernel for a zero angle, |2 sinh(u/2)|^(-1/2); singular at u = 0."""
    return np.abs(2.0 * np.sinh(0.5 * np.asarray(u, dtype=float))) ** -0.5


def gegenbauer_coefficients(alpha, n):
    """Series coefficients kappa_0..kappa_{n-1} by the three-term recurrence.

    The kernel is tau^(1/4) (1 - 2x tau + tau^2)^(-1/4) with x = cos(2 alpha),
    the generating function of Gegenbauer polynomials of index 1/4.
    """
    x = np.cos(2.0 * alpha)
    c = np.empty(n)
    c[0] = 1.0
    if n > 1:
        c[1] = 0.5 * x
    for k in range(2, n):
        c[k] = (2.0 * x * (k - 0.75) * c[k - 1] - (k - 1.5) * c[k - 2]) / k
    return c


@lru_cache(maxsize=None)
def _rational_tables(n):
    # b_k = Gamma(k+1/4) / (k! Gamma(1/4)) as exact fractions
    b = [Fraction(1)]
    for k in range(1, n):
        b.append(b[-1] * (Fraction(k - 1) + Fraction(1, 4)) / k)
    # kappa_q = sum_k b_k C(k, q-k) (-1)^(q-k) c^(2k-q), c = 2cos(2 alpha)
    tables = []
    for q in range(n):
        terms = []
        for k in range((q + 1) // 2, q + 1):
            coef = b[k] * comb(k, q - k) * (-1) ** (q - k)
            terms.append((2 * k - q, coef))
        tables.append(terms)
    return tables


def exact_series_coefficients(alpha, n):
    """Coefficients from the binomial series composed with x = c tau - tau^2.

    The sum is carried out in exact rational arithmetic on the binary value of
    c = 2 cos(2 alpha); only the final result is rounded.
    """
    c = Fraction(2.0 * np.cos(2.0 * alpha))
    out = np.empty(n)
    for q, terms in enumerate(_rational_tables(n)):
        out[q] = float(sum(coef * c ** power for power, coef in terms))
    return out


def radius_of_validity(alpha, cap=0.2, margin=0.9):
    """Largest delta <= cap with sup over tau <= delta of |c tau - tau^2| <= margin."""
    c = 2.0 * np.cos(2.0 * alpha)

    def sup_abs(d):
        cand = [d]
        if 0.0 < c / 2.0 < d:
            cand.append(c / 2.0)
        return max(abs(c * s - s * s) for s in cand)

    d = cap
    while sup_abs(d) > margin:
        d *= 0.5
    return d


@dataclass(frozen=True)
class KernelSeries:
    """Truncated series tau^(1/4) * sum_q coefficients[q] tau^q, with coefficients[0] = 1."""

    alpha: float
    order: int
    coefficients: np.ndarray
    radius: float

    def partial_sum(self, tau):
        tau = np.asarray(tau, dtype=float)
        q = np.arange(self.order)
        return np.sum(self.coefficients * tau[..., None] ** (q + 0.25), axis=-1)

    def to_csv(self, path):
        """Write the (q, coefficient) table."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["q", "coefficient"])
            for q, c in enumerate(self.coefficients):
                w.writerow([q, repr(float(c))])

    def tail_bound(self, tau):
        """Bound on |kernel - partial_sum| for 0 < tau < 1.

        Uses |kappa_n| <= 1, valid since Gegenbauer polynomials of index 1/4
        are bounded by their value at 1, which is at most 1.
        """
        tau = np.asarray(tau, dtype=float)
        return tau ** (self.order + 0.25) / (1.0 - tau)


def series_coefficients(alpha, Q):
    """Series of order Q: coefficients kappa_0..kappa_{Q-1} and the radius delta_0."""
    _check_alpha(alpha)
    if Q < 2:
        raise DomainError("series order must be at least 2")
    coeffs = exact_series_coefficients(alpha, Q)
    coeffs.setflags(write=False)
    return KernelSeries(float(alpha), int(Q), coeffs, radius_of_validity(alpha))


@dataclass
class PoleDecomposition:
    """Splitting kernel = remainder + head(tau) + head(1/tau).

    head(tau) = tau^(1/4) * sum_{q<Q} kappa_q tau^q * cutoff(tau) carries all
    the low-order behaviour at 0; the remainder is O(tau^(Q+1/4)) at 0 and
    O(tau^(-Q-1/4)) at infinity.
    """

    alpha: float
    Q: int
    kappa: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        _check_alpha(self.alpha)
        if self.Q < 2:
            raise DomainError("series order must be at least 2")
        self.kappa = gegenbauer_coefficients(self.alpha, SERIES_TERMS)

    def _poly(self, tau, lo, hi):
        q = np.arange(lo, hi)
        return np.sum(self.kappa[lo:hi] * tau[..., None] ** (q + 0.25), axis=-1)

    def head(self, tau):
        tau = np.asarray(tau, dtype=float)
        return self._poly(tau, 0, self.Q) * cutoff(tau)

    def upsilon(self, tau):
        return cutoff_log_derivative(tau)

    def remainder(self, tau):
        tau = np.asarray(tau, dtype=float)
        out = np.empty_like(tau)
        small = tau <= 0.25
        large = tau >= 4.0
        mid = ~(small | large)
        # outside [1/4, 4] the cutoffs are 0 or 1 and the remainder is a series tail
        out[small] = self._poly(tau[small], self.Q, SERIES_TERMS)
        out[large] = self._poly(1.0 / tau[large], self.Q, SERIES_TERMS)
        tm = tau[mid]
        out[mid] = kernel_eval(self.alpha, tm) - self.head(tm) - self.head(1.0 / tm)
        return out


def pole_decomposition(alpha, Q):
    return PoleDecomposition(float(alpha), int(Q))
