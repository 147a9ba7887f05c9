"""Mellin symbol of the corner kernel: strip evaluation, meromorphic
continuation, residues, decay along vertical lines and sup moduli.

The symbol is K_hat(lam) = int_0^inf K(tau) tau^(-lam-1) d tau
                         = int_R (4 sinh^2(t/2) + 4 sin^2 alpha)^(-1/4) e^(-lam t) dt,
analytic for |Re lam| < 1/4, even in lam, with simple poles at +-(q + 1/4).
"""
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ContourError, PoleProximityError, StripError, WindowError
from .kernel import SERIES_TERMS, gegenbauer_coefficients, kernel_log
from .quadrature import cutoff, cutoff_log_derivative, gauss_legendre

STRIP_MARGIN = 1e-3
POLE_EXCLUSION = 1e-2
CONTOUR_RADIUS = 1e-2
CONTOUR_NODES = 64
# the series head/tail is used for tau below this radius (and above its inverse)
SERIES_RADIUS = 0.2
PANEL_ORDER = 20
# Gauss order for the cutoff-derivative transform and the remainder panels
CONTINUATION_ORDER = 120


@lru_cache(maxsize=64)
def _kappa(alpha):
    k = gegenbauer_coefficients(alpha, SERIES_TERMS)
    k.setflags(write=False)
    return k


def _half_angle(alpha):
    # the kernel depends on sin^2(alpha) only
    return min(alpha, np.pi - alpha)


def _strip_panels(d, xi, t_end):
    """Breakpoints on [-t_end, t_end]: geometric near 0 from d/2, then uniform."""
    width = min(0.5, 8.0 / xi) if xi > 0 else 0.5
    bps = [0.0]
    s = 0.5 * d
    while s < width and s < t_end:
        bps.append(s)
        s *= 2.0
    x = bps[-1]
    while x < t_end:
        x = min(x + width, t_end)
        bps.append(x)
    bps = np.asarray(bps)
    return np.concatenate([-bps[:0:-1], bps])


def _direct_scaled(alpha, lam):
    """(value * exp(xi*eta), eta*xi) for Im lam = xi >= 0.

    The contour is shifted to Im t = -eta, eta < 2a, where the nearest branch
    points of the kernel in t sit at +-2ia (a = min(alpha, pi - alpha)); the
    factor exp(-xi*eta) is the size of the result and is returned separately.
    """
    xi = lam.imag
    a = _half_angle(alpha)
    eta = 2.0 * a * (a * xi) / (1.0 + a * xi)
    d = 2.0 * a - eta
    t1 = np.log(SERIES_RADIUS)
    t2 = -t1
    kap = _kappa(alpha)
    n = np.arange(len(kap))
    z1 = n + 0.25 - lam
    head = np.sum(kap * np.exp(z1 * complex(t1, -eta) + xi * eta) / z1)
    z2 = n + 0.25 + lam
    tail = np.sum(kap * np.exp(-z2 * complex(t2, -eta) + xi * eta) / z2)
    bps = _strip_panels(d, xi, t2)
    x, w = gauss_legendre(PANEL_ORDER)
    lo, hi = bps[:-1, None], bps[1:, None]
    xs = (0.5 * (hi - lo) * x + 0.5 * (hi + lo)).ravel()
    ws = (0.5 * (hi - lo) * w).ravel()
    t = xs - 1j * eta
    mid = np.sum(ws * kernel_log(alpha, t) * np.exp(-lam * t + xi * eta))
    return head + tail + mid, xi * eta


def _check_strip(lam):
    if abs(lam.real) > 0.25 - STRIP_MARGIN:
        raise StripError(f"Re lam = {lam.real} outside the strip |Re lam| < 1/4 - {STRIP_MARGIN}")


def symbol_direct(alpha, lam):
    """K_hat_alpha(lam) for |Re lam| < 1/4 by quadrature along a shifted contour."""
    lam = complex(lam)
    _check_strip(lam)
    if lam.imag < 0:
        return np.conj(symbol_direct(alpha, np.conj(lam)))
    val, shift = _direct_scaled(alpha, lam)
    return complex(val * np.exp(-shift))


def symbol_direct_logabs(alpha, lam):
    """log |K_hat_alpha(lam)|, finite even where the value underflows."""
    lam = complex(lam)
    _check_strip(lam)
    if lam.imag < 0:
        lam = np.conj(lam)
    val, shift = _direct_scaled(alpha, lam)
    return float(np.log(abs(val)) - shift)


@lru_cache(maxsize=32)
def _rule(a, b, n):
    x, w = gauss_legendre(n, a, b)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def _order_for(xi, length):
    return CONTINUATION_ORDER + 2 * int(abs(xi) * length)


def cutoff_transform(lam):
    """Mellin transform of the cutoff's log-derivative, supported in [1/4, 1/2]."""
    lam = np.atleast_1d(np.asarray(lam, dtype=complex))
    lo, hi = np.log(0.25), np.log(0.5)
    out = np.empty(lam.shape, dtype=complex)
    for i, l in enumerate(lam.ravel()):
        t, w = _rule(lo, hi, _order_for(l.imag, hi - lo))
        out.flat[i] = np.sum(w * cutoff_log_derivative(np.exp(t)) * np.exp(-l * t))
    return out


def cutoff_mellin(lam):
    """Mellin transform of the cutoff: its log-derivative transform over lam."""
    lam = np.asarray(lam, dtype=complex)
    return cutoff_transform(lam) / lam


def _remainder_transform(kernel, kap, Q, lam):
    """Mellin transform of kernel - head(tau) - head(1/tau) where head holds kap[:Q]."""
    q = np.arange(Q)
    qq = np.arange(Q, len(kap))
    # tau < 1/4 and tau > 4: series tails integrate in closed form
    val = np.sum(kap[Q:] * 0.25 ** (qq + 0.25 - lam) / (qq + 0.25 - lam))
    val += np.sum(kap[Q:] * 0.25 ** (qq + 0.25 + lam) / (qq + 0.25 + lam))
    l4, l2 = np.log(4.0), np.log(2.0)
    for a, b in ((-l4, -l2), (-l2, l2), (l2, l4)):
        t, w = _rule(a, b, _order_for(lam.imag, b - a))
        tau = np.exp(t)
        head = np.sum(kap[:Q, None] * tau[None, :] ** (q[:, None] + 0.25), axis=0) * cutoff(tau)
        itau = 1.0 / tau
        tail = np.sum(kap[:Q, None] * itau[None, :] ** (q[:, None] + 0.25), axis=0) * cutoff(itau)
        val += np.sum(w * (kernel(t) - head - tail) * np.exp(-lam * t))
    return val


def _head_transform(kap, Q, lam, start=0):
    q = np.arange(start, Q)
    return np.sum(kap[start:Q] * cutoff_mellin(lam - q - 0.25))


def default_order(lam):
    return max(3, int(np.ceil(abs(complex(lam).real))) + 1)


def nearest_pole(lam):
    lam = complex(lam)
    s = 1.0 if lam.real >= 0 else -1.0
    q = max(0, int(round(abs(lam.real) - 0.25)))
    return s * (q + 0.25)


def _extended_unchecked(alpha, lam, Q):
    kap = _kappa(alpha)
    return complex(_remainder_transform(lambda t: kernel_log(alpha, t), kap, Q, lam)
                   + _head_transform(kap, Q, lam) + _head_transform(kap, Q, -lam))


def _check_window(lam, Q, exclusion):
    if abs(lam.real) >= Q + 0.25:
        raise WindowError(f"|Re lam| = {abs(lam.real)} needs a continuation order above {Q}")
    p = nearest_pole(lam)
    if abs(lam - p) < exclusion:
        raise PoleProximityError(f"lam = {lam} lies within {exclusion} of the pole {p}", p)


def symbol_extended(alpha, lam, Q=None):
    """K_hat_alpha(lam) on C minus the poles via remainder + cutoff heads.

    Valid for |Re lam| < Q + 1/4 at distance at least POLE_EXCLUSION from the
    poles +-(q + 1/4).
    """
    lam = complex(lam)
    if Q is None:
        Q = default_order(lam)
    _check_window(lam, Q, POLE_EXCLUSION)
    return _extended_unchecked(alpha, lam, Q)


def symbol_difference(alpha, lam, Q=None, reference=np.pi / 2):
    """K_hat_alpha(lam) - K_hat_reference(lam), analytic for |Re lam| < 5/4.

    The leading cutoff heads of the two symbols are identical and are dropped
    before any evaluation, so no pole terms at +-1/4 appear.
    """
    lam = complex(lam)
    if Q is None:
        Q = default_order(lam)
    if abs(lam.real) >= Q + 0.25:
        raise WindowError(f"|Re lam| = {abs(lam.real)} needs a continuation order above {Q}")
    if abs(lam.real) >= 1.0:
        p = nearest_pole(lam)
        if abs(lam - p) < POLE_EXCLUSION:
            raise PoleProximityError(f"lam = {lam} lies within {POLE_EXCLUSION} of the pole {p}", p)
    kap = _kappa(alpha) - _kappa(reference)

    def kern(t):
        return kernel_log(alpha, t) - kernel_log(reference, t)

    return complex(_remainder_transform(kern, kap, Q, lam)
                   + _head_transform(kap, Q, lam, 1) + _head_transform(kap, Q, -lam, 1))


def symbol(alpha, lam, Q=None):
    """Direct evaluation inside the strip, continuation outside it."""
    lam = complex(lam)
    if abs(lam.real) <= 0.25 - STRIP_MARGIN:
        return symbol_direct(alpha, lam)
    return symbol_extended(alpha, lam, Q)


def residue_at(alpha, pole, Q=None, radius=CONTOUR_RADIUS, nodes=CONTOUR_NODES):
    """Residue at a pole by the mean of (lam - pole) K_hat(lam) over a circle."""
    pole = float(pole)
    if abs(abs(pole) - 0.25 - round(abs(pole) - 0.25)) > 1e-12:
        raise ValueError(f"{pole} is not a pole of the symbol")
    if Q is None:
        Q = int(round(abs(pole) - 0.25)) + 1
    if abs(pole) + radius >= Q + 0.25:
        raise WindowError(f"pole {pole} is outside the window of order {Q}")
    if radius >= 0.5:
        raise ContourError("contour of radius >= 1/2 encloses a neighbouring pole")
    th = 2.0 * np.pi * np.arange(nodes) / nodes
    z = pole + radius * np.exp(1j * th)
    vals = [(zz - pole) * _extended_unchecked(alpha, zz, Q) for zz in z]
    return complex(np.mean(vals))


def regularized(alpha, lam, Q=None, radius=2 * CONTOUR_RADIUS, nodes=CONTOUR_NODES):
    """(lam - p) K_hat(lam) for lam near a pole p, by Cauchy's formula on a circle."""
    lam = complex(lam)
    p = nearest_pole(lam)
    if Q is None:
        Q = default_order(p)
    if abs(lam - p) >= radius:
        return (lam - p) * symbol(alpha, lam, Q)
    th = 2.0 * np.pi * np.arange(nodes) / nodes
    z = p + radius * np.exp(1j * th)
    g = np.array([(zz - p) * _extended_unchecked(alpha, zz, Q) for zz in z])
    # (1/2 pi i) int g(z)/(z - lam) dz with dz = i (z - p) d theta
    return complex(np.mean(g * (z - p) / (z - lam)))


@dataclass
class MellinSymbol:
    """Symbol of the corner kernel at angle alpha with continuation order Q."""

    alpha: float
    Q: int = 3

    def __call__(self, lam):
        return symbol(self.alpha, lam, max(self.Q, default_order(lam)))

    @property
    def poles(self):
        """Poles inside the window |Re lam| < Q + 1/4."""
        q = np.arange(self.Q)
        return np.sort(np.concatenate([-(q + 0.25), q + 0.25]))

    def residues(self):
        return {float(p): residue_at(self.alpha, p, self.Q) for p in self.poles}


def line_logabs(alpha, mu, xi):
    """log |K_hat(mu + i xi)| on a line; underflow-safe inside the strip."""
    xi = np.asarray(xi, dtype=float)
    out = np.empty(xi.shape)
    inside = abs(mu) <= 0.25 - STRIP_MARGIN
    for i, x in enumerate(xi.ravel()):
        lam = complex(mu, x)
        if inside:
            out.flat[i] = symbol_direct_logabs(alpha, lam)
        else:
            p = nearest_pole(lam)
            if abs(lam - p) < 2 * CONTOUR_RADIUS:
                g = regularized(alpha, lam)
                out.flat[i] = np.log(abs(g)) - np.log(abs(lam - p)) if lam != p else np.inf
            else:
                out.flat[i] = np.log(abs(symbol_extended(alpha, lam)))
    return out


@dataclass
class SymbolLineProfile:
    alpha: float
    mu: float
    p: int
    xi: np.ndarray
    logabs: np.ndarray
    xi0: float

    @property
    def magnitude(self):
        return np.exp(self.logabs)

    @property
    def log_weighted(self):
        """log of |K_hat|^2 |xi|^(2p); -inf at xi = 0 when p >= 1."""
        if self.p == 0:
            return 2.0 * self.logabs
        with np.errstate(divide="ignore"):
            return 2.0 * self.logabs + 2.0 * self.p * np.log(np.abs(self.xi))

    @property
    def weighted(self):
        return np.exp(self.log_weighted)

    def rows(self):
        return list(zip(self.xi.tolist(), self.magnitude.tolist(), self.weighted.tolist()))


def decay_profile(alpha, mu, p, xi_grid):
    """Weighted profile |K_hat(mu + i xi)|^2 |xi|^(2p) and the onset xi0 of monotone decay."""
    xi = np.asarray(xi_grid, dtype=float)
    la = line_logabs(alpha, mu, xi)
    prof = SymbolLineProfile(float(alpha), float(mu), int(p), xi, la, 0.0)
    lw = prof.log_weighted
    order = np.argsort(xi)
    lw_sorted = lw[order]
    inc = np.nonzero(np.diff(lw_sorted) >= 0)[0]
    k0 = 0 if len(inc) == 0 else inc[-1] + 1
    prof.xi0 = float(xi[order][k0])
    return prof


def _golden_max(f, a, b, tol=1e-8, maxit=200):
    g = (np.sqrt(5.0) - 1.0) / 2.0
    c, d = b - g * (b - a), a + g * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(maxit):
        if b - a < tol * max(1.0, abs(a) + abs(b)):
            break
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - g * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + g * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def line_sup(f, xi_max=60.0, n=241):
    """sup over xi in [0, xi_max] of f: coarse grid, then golden-section refinement."""
    xi = np.linspace(0.0, xi_max, n)
    vals = np.array([f(x) for x in xi])
    k = int(np.argmax(vals))
    a = xi[max(k - 1, 0)]
    b = xi[min(k + 1, n - 1)]
    x, v = _golden_max(f, a, b)
    if vals[k] >= v:
        x, v = xi[k], vals[k]
    return float(x), float(v), vals


@dataclass
class Moduli:
    alpha: float
    mu: float
    m0: float
    m1: float
    m_diff: float
    xi0: float
    tail_ratio: float


def continuity_moduli(alpha, mu=0.0, xi_max=60.0, n=241):
    """Sup moduli of the symbol along vertical lines.

    m0 = sup |K_hat(i xi)|, m1 = sup |K_hat(mu + i xi)|^2 xi^2 / (1 + |xi|),
    m_diff = sup over Re lam = +-1/4 of |K_hat_alpha - K_hat_{pi/2}|. The symbol
    is even and real on the real axis, so only xi >= 0 on the +1/4 line is needed.
    ``tail_ratio`` is the largest end value over the sup, certifying that
    the truncation at xi_max is harmless.
    """
    def f0(x):
        return abs(symbol(alpha, complex(0.0, x)))

    def f1(x):
        lam = complex(mu, x)
        p = nearest_pole(lam)
        if abs(lam - p) < 2 * CONTOUR_RADIUS:
            # |K_hat| |xi| = |(lam - p) K_hat| when p lies on the line
            g = abs(regularized(alpha, lam))
            if p == mu:
                return g ** 2 / (1.0 + abs(x))
            return (g / abs(lam - p)) ** 2 * x * x / (1.0 + abs(x))
        return abs(symbol(alpha, lam)) ** 2 * x * x / (1.0 + abs(x))

    def fd(x):
        if alpha == np.pi / 2:
            return 0.0
        return abs(symbol_difference(alpha, complex(0.25, x)))

    _, m0, v0 = line_sup(f0, xi_max, n)
    _, m1, v1 = line_sup(f1, xi_max, n)
    _, md, vd = line_sup(fd, xi_max, n)
    tails = [v0[-1] / m0 if m0 else 0.0, v1[-1] / m1 if m1 else 0.0, vd[-1] / md if md else 0.0]
    xi = np.linspace(0.0, xi_max, n)
    prof = decay_profile(alpha, 0.0, 1, xi[1:])
    return Moduli(float(alpha), float(mu), m0, m1, md, prof.xi0, float(max(tails)))
