"""Numerical Mellin transform on the positive half-line.

With r = exp(t) the transform u_hat(lam) = int u(r) r^(-lam) dr/r becomes the
Fourier transform of t -> u(exp t) exp(-beta t) on the line Re lam = beta, so
all quadratures here are uniform trapezoid sums in t.
"""
import csv
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from . import _backend
from .errors import ResolutionError, StripError, SupportError
from .quadrature import composite_gauss


@dataclass(frozen=True)
class LogGrid:
    """Uniform grid in t = log r."""

    t_min: float
    t_max: float
    n: int

    def __post_init__(self):
        if self.n < 2 or not self.t_min < self.t_max:
            raise ValueError("LogGrid needs n >= 2 and t_min < t_max")

    @classmethod
    def from_r(cls, r_min, r_max, n):
        return cls(float(np.log(r_min)), float(np.log(r_max)), int(n))

    @classmethod
    def covering(cls, lo, hi, per_unit=200, min_n=65):
        """Grid on [lo, hi] with about ``per_unit`` nodes per unit of log r."""
        t0, t1 = np.log(lo), np.log(hi)
        n = max(min_n, int(np.ceil((t1 - t0) * per_unit)) + 1)
        return cls(float(t0), float(t1), n)

    @property
    def h(self):
        return (self.t_max - self.t_min) / (self.n - 1)

    @property
    def t(self):
        return np.linspace(self.t_min, self.t_max, self.n)

    @property
    def r(self):
        return np.exp(self.t)

    @property
    def weights(self):
        w = np.full(self.n, self.h)
        w[0] = w[-1] = 0.5 * self.h
        return w

    @property
    def center(self):
        return 0.5 * (self.t_min + self.t_max)


@dataclass(frozen=True)
class Tail:
    """Declared power behaviour u(r) ~ coefficient * r^exponent beyond a grid end."""

    exponent: float
    coefficient: complex = 1.0


@dataclass
class GridFunction:
    """Samples of u on a LogGrid.

    ``left``/``right`` declare power tails below/above the grid. When a tail
    is None the function is taken to vanish (or be negligible) beyond that
    end. ``support`` optionally records a compact support [lo, hi] in r.
    """

    grid: LogGrid
    values: np.ndarray
    left: Optional[Tail] = None
    right: Optional[Tail] = None
    support: Optional[Tuple[float, float]] = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (self.grid.n,):
            raise ValueError("values do not match the grid")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("grid function values must be finite")
        if self.support is not None:
            lo, hi = self.support
            r = self.grid.r
            outside = (r < lo) | (r > hi)
            if np.any(self.values[outside] != 0):
                raise SupportError("nonzero samples outside the declared support")

    @classmethod
    def from_callable(cls, f, grid, support=None, left=None, right=None):
        vals = np.asarray(f(grid.r), dtype=complex)
        if support is not None:
            r = grid.r
            vals = np.where((r >= support[0]) & (r <= support[1]), vals, 0.0)
        return cls(grid, vals, left, right, support)

    @classmethod
    def from_bump(cls, bump, n=1301, grid=None):
        """Samples of a bump on a log grid spanning exactly its support.

        A bump's transform decays on the scale 1/(log-width of its support),
        so a fixed node count resolves it to 1e-12 whatever its width.
        """
        lo, hi = bump.support
        if grid is None:
            grid = LogGrid.from_r(lo, hi, n)
        return cls.from_callable(bump, grid, support=(lo, hi))

    @property
    def is_real(self):
        return bool(np.all(self.values.imag == 0))

    def strip(self):
        """Open interval of beta for which u(r) r^(-beta-1) is integrable."""
        lo = -np.inf if self.right is None else self.right.exponent
        hi = np.inf if self.left is None else self.left.exponent
        return lo, hi

    def check_line(self, beta):
        lo, hi = self.strip()
        if not lo < beta < hi:
            raise StripError(f"line Re lam = {beta} outside the strip ({lo}, {hi})")

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["r", "re", "im"])
            for r, v in zip(self.grid.r, self.values):
                w.writerow([repr(float(r)), repr(float(v.real)), repr(float(v.imag))])


@dataclass(frozen=True)
class VerticalLine:
    """Samples xi_k on [-xi_max, xi_max] of the line Re lam = beta; m odd."""

    beta: float
    xi_max: float
    m: int

    def __post_init__(self):
        if self.m < 3 or self.m % 2 == 0:
            raise ValueError("VerticalLine needs an odd sample count m >= 3")
        if not self.xi_max > 0:
            raise ValueError("xi_max must be positive")

    @property
    def xi(self):
        return np.linspace(-self.xi_max, self.xi_max, self.m)

    @property
    def dxi(self):
        return 2.0 * self.xi_max / (self.m - 1)

    @property
    def lam(self):
        return self.beta + 1j * self.xi

    @property
    def window(self):
        """Length in t of the window the line samples can reconstruct."""
        return 2.0 * np.pi / self.dxi


@dataclass
class MellinSamples:
    line: VerticalLine
    values: np.ndarray
    t_center: float = 0.0

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["xi", "re", "im"])
            for x, v in zip(self.line.xi, self.values):
                w.writerow([repr(float(x)), repr(float(v.real)), repr(float(v.imag))])


def _tail_terms(u, lam):
    lam = np.asarray(lam, dtype=complex)
    out = np.zeros(lam.shape, dtype=complex)
    g = u.grid
    if u.left is not None:
        a = u.left.exponent - lam
        out += u.left.coefficient * np.exp(a * g.t_min) / a
    if u.right is not None:
        b = u.right.exponent - lam
        out -= u.right.coefficient * np.exp(b * g.t_max) / b
    return out


def mellin_at(u, lam, backend=None):
    """u_hat at arbitrary points lam sharing one real part."""
    lam = np.atleast_1d(np.asarray(lam, dtype=complex))
    betas = np.unique(lam.real)
    out = np.empty(lam.shape, dtype=complex)
    for beta in betas:
        u.check_line(beta)
        sel = lam.real == beta
        g = u.grid
        coef = g.weights * u.values * np.exp(-beta * g.t)
        out[sel] = _backend.exp_sum(g.t, coef, lam[sel].imag, -1.0, backend)
        out[sel] += _tail_terms(u, lam[sel])
    return out


def mellin_forward(u, line, backend=None):
    """Samples of u_hat on ``line`` by the trapezoid rule in t = log r."""
    u.check_line(line.beta)
    xi = line.xi
    if u.is_real and u.left is None and u.right is None:
        # conjugate symmetry: u_hat(beta - i xi) = conj(u_hat(beta + i xi))
        half = xi[line.m // 2:]
        vals_half = mellin_at(u, line.beta + 1j * half, backend)
        vals = np.concatenate([np.conj(vals_half[:0:-1]), vals_half])
    else:
        vals = mellin_at(u, line.lam, backend)
    return MellinSamples(line, vals, u.grid.center)


def line_weights(line):
    """Trapezoid weights in xi for the samples of a vertical line."""
    w = np.full(line.m, line.dxi)
    w[0] = w[-1] = 0.5 * line.dxi
    return w


def mellin_inverse(samples, r_points, backend=None):
    """(1/2 pi) int u_hat(beta + i xi) r^(beta + i xi) d xi by the trapezoid rule in xi.

    Points farther than half the reconstruction window from the samples'
    center raise ResolutionError.
    """
    line = samples.line
    r = np.atleast_1d(np.asarray(r_points, dtype=float))
    if np.any(r <= 0):
        raise ResolutionError("inverse Mellin transform needs positive r")
    t = np.log(r)
    if np.any(np.abs(t - samples.t_center) > 0.5 * line.window):
        raise ResolutionError(
            f"points outside the resolvable window of length {line.window:.3g} in log r")
    coef = line_weights(line) * samples.values
    vals = _backend.exp_sum(line.xi, coef, t, 1.0, backend)
    return vals * np.exp(line.beta * t) / (2.0 * np.pi)


def weighted_norm(u, beta):
    """Norm of u in L^2(r^(-2 beta) dr/r)."""
    g = u.grid
    lo, hi = u.strip()
    if not lo < beta < hi:
        raise StripError(f"weighted norm with beta = {beta} diverges for the declared tails")
    total = np.sum(g.weights * np.abs(u.values) ** 2 * np.exp(-2.0 * beta * g.t))
    if u.left is not None:
        a = 2.0 * (u.left.exponent - beta)
        total += abs(u.left.coefficient) ** 2 * np.exp(a * g.t_min) / a
    if u.right is not None:
        b = 2.0 * (u.right.exponent - beta)
        total -= abs(u.right.coefficient) ** 2 * np.exp(b * g.t_max) / b
    return float(np.sqrt(total))


def choose_line(u, beta, tol=1e-12, m=None, window_factor=2.0):
    """Line on which u_hat has decayed below ``tol`` relative to its peak.

    The sample spacing resolves a window of ``window_factor`` times the grid
    span, which is exact for line integrals of |u_hat|^2 when u vanishes
    beyond the grid.
    """
    g = u.grid
    nyquist = np.pi / g.h
    span = g.t_max - g.t_min
    xi = np.linspace(0.0, 0.9 * nyquist, 2001)
    mag = np.abs(mellin_at(u, beta + 1j * xi))
    peak = mag.max()
    if peak == 0:
        return VerticalLine(beta, 1.0, 3 if m is None else m)
    above = np.nonzero(mag > tol * peak)[0]
    k = above[-1] + 1
    if k >= len(xi):
        raise ResolutionError("transform has not decayed below tolerance within the grid's Nyquist range")
    xi_max = max(xi[k], 1.0)
    if m is None:
        dxi = 2.0 * np.pi / (window_factor * span)
        m = 2 * int(np.ceil(xi_max / dxi)) + 1
    return VerticalLine(beta, float(xi_max), int(m))


def line_norm_squared(samples):
    """(1/2 pi) int |u_hat|^2 d xi by the trapezoid rule."""
    line = samples.line
    return float(np.sum(line_weights(line) * np.abs(samples.values) ** 2) / (2.0 * np.pi))


def weighted_line_integral(u, weight, beta=0.0, order=20, tol=1e-9):
    """(1/2 pi) int weight(xi) |u_hat(beta + i xi)|^2 d xi for real u.

    Uses |u_hat(beta - i xi)| = |u_hat(beta + i xi)| and composite Gauss
    panels on [0, xi_max], so weights with a kink at xi = 0 (like |xi|) are
    integrated to full accuracy.
    """
    if not u.is_real:
        raise ValueError("weighted line integrals need a real function")
    # |u_hat|^2 enters, so an amplitude tolerance of 1e-9 leaves tails near 1e-18
    line = choose_line(u, beta, tol=tol)
    width = min(2.0, 3.0 / max(u.grid.t_max - u.grid.t_min, 1e-12))
    n_pan = int(np.ceil(line.xi_max / width))
    xi, w = composite_gauss(np.linspace(0.0, line.xi_max, n_pan + 1), order)
    vals = mellin_at(u, beta + 1j * xi)
    return float(2.0 * np.sum(w * weight(xi) * np.abs(vals) ** 2) / (2.0 * np.pi))


def parseval_residual(u, beta, line=None):
    """(lhs, rhs, |lhs - rhs|) for ||u||^2 in L^2_beta against the line integral of |u_hat|^2."""
    lhs = weighted_norm(u, beta) ** 2
    if lhs == 0:
        return 0.0, 0.0, 0.0
    if line is None:
        line = choose_line(u, beta)
    rhs = line_norm_squared(mellin_forward(u, line))
    return lhs, rhs, abs(lhs - rhs)


def hardy_sup_diagnostic(u, beta, side, alphas):
    """Line norms ||u_hat||_{L^2(Re lam = alpha)} for alpha on the Hardy side of beta.

    side='right' requires u to vanish on (0, 1] and alpha > beta;
    side='left' requires u to vanish on [1, inf) and alpha < beta.
    """
    r = u.grid.r
    if side == "right":
        bad = (r <= 1.0) & (u.values != 0)
        if np.any(bad) or u.left is not None:
            raise SupportError("right Hardy diagnostic needs support in (1, inf)")
    elif side == "left":
        bad = (r >= 1.0) & (u.values != 0)
        if np.any(bad) or u.right is not None:
            raise SupportError("left Hardy diagnostic needs support in (0, 1)")
    else:
        raise ValueError("side must be 'left' or 'right'")
    out = []
    for a in alphas:
        if (side == "right" and a < beta) or (side == "left" and a > beta):
            raise StripError(f"alpha = {a} is not on the {side} side of beta = {beta}")
        if not np.any(u.values):
            out.append(0.0)
            continue
        out.append(float(np.sqrt(line_norm_squared(mellin_forward(u, choose_line(u, a))))))
    return out
