"""Quadrature rules, the exp-based smoothstep and smooth test bumps."""
from dataclasses import dataclass
from functools import lru_cache

import numpy as np


@lru_cache(maxsize=None)
def _leggauss(n):
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre(n, a=-1.0, b=1.0):
    """Nodes and weights of the n-point Gauss-Legendre rule on [a, b]."""
    x, w = _leggauss(int(n))
    half = 0.5 * (b - a)
    return half * x + 0.5 * (a + b), half * w


def composite_gauss(breaks, n):
    """Gauss rule of order n on every panel [breaks[k], breaks[k+1]]."""
    breaks = np.asarray(breaks, dtype=float)
    x, w = _leggauss(int(n))
    lo, hi = breaks[:-1, None], breaks[1:, None]
    half = 0.5 * (hi - lo)
    nodes = (half * x + 0.5 * (lo + hi)).ravel()
    weights = (half * w).ravel()
    return nodes, weights


def _f(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    m = t > 0
    out[m] = np.exp(-1.0 / t[m])
    return out


def _df(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    m = t > 0
    out[m] = np.exp(-1.0 / t[m]) / t[m] ** 2
    return out


def smoothstep(t):
    """C-infinity step: 0 for t <= 0, 1 for t >= 1."""
    a, b = _f(t), _f(1.0 - np.asarray(t, dtype=float))
    return a / (a + b)


def smoothstep_derivative(t):
    t = np.asarray(t, dtype=float)
    a, b = _f(t), _f(1.0 - t)
    return (_df(t) * b + a * _df(1.0 - t)) / (a + b) ** 2


def cutoff(tau):
    """Smooth cutoff equal to 1 for tau <= 1/4 and 0 for tau >= 1/2."""
    return smoothstep(4.0 * (0.5 - np.asarray(tau, dtype=float)))


def cutoff_log_derivative(tau):
    """tau * d/dtau of ``cutoff``; supported in [1/4, 1/2]."""
    tau = np.asarray(tau, dtype=float)
    return -4.0 * tau * smoothstep_derivative(4.0 * (0.5 - tau))


def radial_cutoff(r, radius):
    """Profile equal to 1 for r <= radius/4 and 0 for r >= radius/2."""
    r = np.asarray(r, dtype=float)
    return smoothstep((0.5 * radius - r) / (0.25 * radius))


@dataclass(frozen=True)
class Bump:
    """Smooth bump c*exp(-1/(1-((r-a)/w)^2)) supported on [a-w, a+w]."""

    center: float
    halfwidth: float
    amplitude: float = 1.0

    @property
    def support(self):
        return (self.center - self.halfwidth, self.center + self.halfwidth)

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        s = (r - self.center) / self.halfwidth
        out = np.zeros_like(s)
        m = np.abs(s) < 1.0
        out[m] = self.amplitude * np.exp(-1.0 / (1.0 - s[m] ** 2))
        return out

    def scaled(self, a):
        """The bump r -> self(a*r)."""
        return Bump(self.center / a, self.halfwidth / a, self.amplitude)

    def times(self, c):
        return Bump(self.center, self.halfwidth, self.amplitude * c)

    def l2_norm(self, n=200):
        x, w = gauss_legendre(n, *self.support)
        return float(np.sqrt(np.sum(w * self(x) ** 2)))

    @classmethod
    def random(cls, rng, center=(0.6, 2.0), rel_width=(0.2, 0.8), amplitude=(0.5, 2.0)):
        """Draw a bump with center, relative half-width and amplitude uniform in the given ranges."""
        a = rng.uniform(*center)
        w = a * rng.uniform(*rel_width)
        c = rng.uniform(*amplitude)
        return cls(float(a), float(w), float(c))


class ProductFunction:
    """Pointwise product of a bump with a radial profile; keeps the bump's support."""

    def __init__(self, bump, profile):
        self.bump = bump
        self.profile = profile
        self.support = bump.support

    def __call__(self, r):
        return self.bump(r) * self.profile(np.asarray(r, dtype=float))
