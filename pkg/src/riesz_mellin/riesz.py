"""The Riesz potential with kernel |x-y|^(-1/2) on polygon boundaries and
its corner model on a cone of two rays.

On a cone with half-aperture theta the form splits into two half-line
forms with kernels (K_0(t/s) +- K_theta(t/s)) (st)^(-1/4) acting on the
symmetric and antisymmetric parts of a function; see ``theta_map``.
"""
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.io as sio

from .errors import AssemblyError, GridError, SupportError
from .kernel import kernel_log
from .mellin import GridFunction, LogGrid, MellinSamples, VerticalLine, mellin_at, mellin_inverse
from .quadrature import Bump, composite_gauss
from .sobolev import (_scatter, gram_matrices, geometric_nodes, halfline_space, l2_norm,
                      slobodeckii_seminorm, tilde_half_norm, cone_space)
from .symbol import symbol_direct
from . import _core_py

SQRT2 = np.sqrt(2.0)
DEFAULT_R_RANGE = (1e-4, 1e2)


class Combination:
    """a*f + b*g for half-line functions carrying a ``support`` attribute."""

    def __init__(self, f, g, a=1.0, b=1.0):
        self.f, self.g, self.a, self.b = f, g, a, b
        sf, sg = _support(f), _support(g)
        if sf is None:
            self.support = sg
        elif sg is None:
            self.support = sf
        else:
            self.support = (min(sf[0], sg[0]), max(sf[1], sg[1]))

    def __call__(self, r):
        return self.a * _eval(self.f, r) + self.b * _eval(self.g, r)


class Scaled:
    """Product of a half-line function with a radial profile."""

    def __init__(self, f, profile):
        self.f, self.profile = f, profile
        self.support = _support(f)

    def __call__(self, r):
        return _eval(self.f, r) * self.profile(np.asarray(r, dtype=float))


def _support(f):
    if f is None or f == 0:
        return None
    return getattr(f, "support", None)


def _eval(f, r):
    r = np.asarray(r, dtype=float)
    if f is None or (not callable(f) and f == 0):
        return np.zeros_like(r)
    return np.asarray(f(r), dtype=float)


def _is_zero(f):
    return f is None or (not callable(f) and f == 0)


@dataclass
class ConeFunction:
    """A function on the two rays of a corner: values on Gamma_+ and Gamma_-."""

    frame: object
    plus: object
    minus: object

    def on_ray(self, side, t):
        return _eval(self.plus if side > 0 else self.minus, t)


def theta_map(p, p_tilde, frame):
    """Theta(p, p~)(c + t e_+-) = (p(t) +- p~(t)) / sqrt(2).

    Accepts GridFunctions on a common grid or callables on (0, inf).
    """
    if isinstance(p, GridFunction) or isinstance(p_tilde, GridFunction):
        if not (isinstance(p, GridFunction) and isinstance(p_tilde, GridFunction)):
            raise GridError("both components must be grid functions")
        if p.grid != p_tilde.grid:
            raise GridError("components live on different grids")
        return ConeFunction(frame, GridFunction(p.grid, (p.values + p_tilde.values) / SQRT2),
                            GridFunction(p.grid, (p.values - p_tilde.values) / SQRT2))
    return ConeFunction(frame, Combination(p, p_tilde, 1 / SQRT2, 1 / SQRT2),
                        Combination(p, p_tilde, 1 / SQRT2, -1 / SQRT2))


def theta_inverse(u):
    """Recover (p, p~) = ((u_+ + u_-)/sqrt 2, (u_+ - u_-)/sqrt 2)."""
    if isinstance(u.plus, GridFunction):
        g = u.plus.grid
        return (GridFunction(g, (u.plus.values + u.minus.values) / SQRT2),
                GridFunction(g, (u.plus.values - u.minus.values) / SQRT2))
    return (Combination(u.plus, u.minus, 1 / SQRT2, 1 / SQRT2),
            Combination(u.plus, u.minus, 1 / SQRT2, -1 / SQRT2))


def _log_support(f):
    s = _support(f)
    if s is None:
        raise SupportError("half-line functions must declare a compact support")
    if s[0] <= 0:
        raise SupportError("support must stay away from the origin")
    return np.log(s[0]), np.log(s[1])


def _log_density(f, a):
    # p(e^a) e^(3a/4): the half-line form becomes int int k(b - a) P(a) Q(b) da db
    return _eval(f, np.exp(a)) * np.exp(0.75 * a)


def _cross_correlation(p, q, u, n_inner=40, panels=4):
    """C(u) = int P(a) Q(a + u) da for an array of shifts u."""
    a0, a1 = _log_support(p)
    b0, b1 = _log_support(q)
    lo = np.maximum(a0, b0 - u)
    hi = np.minimum(a1, b1 - u)
    ok = hi > lo
    x, w = composite_gauss(np.linspace(0.0, 1.0, panels + 1), n_inner)
    out = np.zeros(len(u))
    L = (hi - lo)[ok]
    a = lo[ok, None] + L[:, None] * x[None, :]
    vals = _log_density(p, a) * _log_density(q, a + u[ok, None])
    out[ok] = np.sum(vals * w[None, :], axis=1) * L
    return out


def _shift_rule(u0, u1, n=40, panels=6):
    """Nodes/weights in u on [u0, u1] with u = +-w^2 near u = 0 when 0 is inside or an end."""
    nodes, weights = [], []
    for lo, hi, sgn in ((0.0, max(u1, 0.0), 1.0), (0.0, max(-u0, 0.0), -1.0)):
        if hi <= 0:
            continue
        start = min(max(sgn * u0, 0.0), hi) if sgn > 0 else min(max(-u1, 0.0), hi)
        ws, ww = composite_gauss(np.linspace(np.sqrt(start), np.sqrt(hi), panels + 1), n)
        nodes.append(sgn * ws ** 2)
        weights.append(2.0 * ws * ww)
    return np.concatenate(nodes), np.concatenate(weights), np.concatenate(
        [np.sqrt(np.abs(x)) for x in nodes])


def _scaled_singular_kernel(w):
    """2 w K_0(e^(w^2)) = 2 sqrt(z / sinh z), z = w^2 / 2, smooth at w = 0."""
    z = 0.5 * w * w
    out = np.ones_like(z)
    m = z > 1e-8
    out[m] = np.sqrt(z[m] / np.sinh(z[m]))
    return 2.0 * out


def corner_form_direct(theta, sign, p, q, n=40, panels=12, inner=24):
    """<A_theta^sign p, q> = int int (K_0(t/s) + sign K_theta(t/s)) p(s) q(t) (st)^(-1/4) ds dt.

    With s = e^a, t = e^b the form is int k(u) C(u) du over u = b - a with
    the cross-correlation C; u = +-w^2 absorbs the |u|^(-1/2) singularity of
    the zero-angle kernel.
    """
    if _is_zero(p) or _is_zero(q):
        return 0.0
    a0, a1 = _log_support(p)
    b0, b1 = _log_support(q)
    u0, u1 = b0 - a1, b1 - a0
    u, wu, wabs = _shift_rule(u0, u1, n, panels)
    C = _cross_correlation(p, q, u, panels=inner)
    # weights already contain 2w; divide it out for the smooth kernel
    k0 = _scaled_singular_kernel(wabs) / (2.0 * wabs)
    kt = np.real(kernel_log(theta, u))
    kern = k0 + (kt if sign > 0 else -kt)
    return float(np.sum(wu * kern * C))


def _lin_cross_correlation(u, v, d, n_inner=40, panels=4):
    """int u(s) v(s + d) ds in linear coordinates."""
    s0, s1 = _support(u)
    t0, t1 = _support(v)
    lo = np.maximum(s0, t0 - d)
    hi = np.minimum(s1, t1 - d)
    ok = hi > lo
    x, w = composite_gauss(np.linspace(0.0, 1.0, panels + 1), n_inner)
    out = np.zeros(len(d))
    L = (hi - lo)[ok]
    s = lo[ok, None] + L[:, None] * x[None, :]
    out[ok] = np.sum(_eval(u, s) * _eval(v, s + d[ok, None]) * w[None, :], axis=1) * L
    return out


def _same_ray_block(u, v, n=40, panels=24, inner=24):
    s0, s1 = _support(u)
    t0, t1 = _support(v)
    d, wd, wabs = _shift_rule(t0 - s1, t1 - s0, n, panels)
    C = _lin_cross_correlation(u, v, d, panels=inner)
    # |d|^(-1/2) times 2w equals 2
    return float(np.sum(wd / wabs * C))


def _cross_ray_block(u, v, theta, n=40, panels=32):
    s0, s1 = _support(u)
    t0, t1 = _support(v)
    s, ws = composite_gauss(np.linspace(s0, s1, panels + 1), n)
    t, wt = composite_gauss(np.linspace(t0, t1, panels + 1), n)
    S, T = np.meshgrid(s, t, indexing="ij")
    r2 = S * S + T * T - 2.0 * S * T * np.cos(2.0 * theta)
    return float(np.einsum("i,j,ij,i,j->", ws, wt, r2 ** -0.25, _eval(u, s), _eval(v, t)))


def corner_identity_check(theta, p, p_tilde, q, q_tilde, chi=None):
    """Both sides of the cone factorization of the Riesz form.

    lhs: <A_Gamma (chi Theta(p, p~)), chi Theta(q, q~)> by a quadrature in
    physical distances on the two rays; rhs: the sum of the two half-line
    forms of chi p, chi q and chi p~, chi q~ in log coordinates.
    """
    if all(_is_zero(f) for f in (p, p_tilde)) or all(_is_zero(f) for f in (q, q_tilde)):
        return 0.0, 0.0, 0.0
    wrap = (lambda f: f) if chi is None else (lambda f: None if _is_zero(f) else Scaled(f, chi))
    p, p_tilde, q, q_tilde = map(wrap, (p, p_tilde, q, q_tilde))
    u = theta_map(p, p_tilde, None)
    v = theta_map(q, q_tilde, None)
    lhs = 0.0
    for su, uf in ((1, u.plus), (-1, u.minus)):
        for sv, vf in ((1, v.plus), (-1, v.minus)):
            if su == sv:
                lhs += _same_ray_block(uf, vf)
            else:
                lhs += _cross_ray_block(uf, vf, theta)
    rhs = corner_form_direct(theta, +1, p, q) + corner_form_direct(theta, -1, p_tilde, q_tilde)
    return lhs, rhs, abs(lhs - rhs)


def _difference_kernel(theta, u):
    return np.real(kernel_log(np.pi / 2, u) - kernel_log(theta, u))


def corner_difference_at(theta, u, r, n=40, panels=8):
    """(K_{pi/2} - K_theta)(u) at radii r by direct quadrature.

    v(t) = t^(-1/4) int (K_{pi/2} - K_theta)(t/s) u(s) s^(-1/4) ds; the kernel
    difference is smooth, so plain Gauss in log s suffices.
    """
    r = np.asarray(r, dtype=float)
    a0, a1 = _log_support(u)
    a, w = composite_gauss(np.linspace(a0, a1, panels + 1), n)
    U = _log_density(u, a)
    t = np.log(r)
    K = _difference_kernel(theta, t[:, None] - a[None, :])
    return np.exp(-0.25 * t) * (K @ (w * U))


@lru_cache(maxsize=16)
def _difference_symbol(theta, xi_max, m):
    xi = np.linspace(-xi_max, xi_max, m)
    half = xi[m // 2:]
    vals = np.array([symbol_direct(np.pi / 2, 1j * x) - symbol_direct(theta, 1j * x) for x in half])
    full = np.concatenate([np.conj(vals[:0:-1]), vals])
    full.setflags(write=False)
    return full


def mellin_line_for(theta, r_range=DEFAULT_R_RANGE, tol_exponent=36.0, margin=40.0):
    """Line Re lam = -1/4 for the Mellin application path.

    xi_max makes exp(-2 a xi_max) ~ exp(-tol_exponent), a = min(theta, pi-theta),
    the decay rate of the symbol difference; the spacing resolves a window in
    log r that covers r_range with ``margin`` to spare on each side.
    """
    a = min(theta, np.pi - theta, np.pi / 2)
    xi_max = tol_exponent / (2.0 * a)
    span = np.log(r_range[1]) - np.log(r_range[0])
    window = 2.0 * (max(abs(np.log(r_range[0])), abs(np.log(r_range[1]))) + margin)
    window = max(window, span + 2 * margin)
    dxi = 2.0 * np.pi / window
    m = 2 * int(np.ceil(xi_max / dxi)) + 1
    return VerticalLine(-0.25, float(xi_max), int(m))


def apply_corner_difference(theta, u, path="direct", grid=None, line=None):
    """v = (K_{pi/2} - K_theta)(u) sampled on a log grid (default [1e-4, 1e2]).

    path='direct': quadrature of the multiplicative convolution.
    path='mellin': v_hat(lam) = (K_hat_{pi/2} - K_hat_theta)(lam + 1/4) u_hat(lam - 1/2)
    on Re lam = -1/4, then the inverse transform.
    """
    if grid is None:
        grid = LogGrid.from_r(*DEFAULT_R_RANGE, 1401)
    if isinstance(u, GridFunction):
        if u.support is None:
            raise SupportError("input must declare a compact support")
        ug = u
    else:
        _log_support(u)
        ug = GridFunction.from_bump(u)
    if theta == np.pi / 2:
        return GridFunction(grid, np.zeros(grid.n))
    if path == "direct":
        if isinstance(u, GridFunction):
            raise ValueError("the direct path needs a callable input")
        return GridFunction(grid, corner_difference_at(theta, u, grid.r))
    if path != "mellin":
        raise ValueError("path must be 'direct' or 'mellin'")
    if line is None:
        line = mellin_line_for(theta, (grid.r[0], grid.r[-1]))
    if line.beta != -0.25:
        raise ValueError("the Mellin path uses the line Re lam = -1/4")
    sym = _difference_symbol(float(theta), line.xi_max, line.m)
    uh = mellin_at(ug, -0.75 + 1j * line.xi)
    samples = MellinSamples(line, sym * uh, 0.0)
    vals = mellin_inverse(samples, grid.r)
    return GridFunction(grid, vals.real)


def relative_l2_difference(v, w):
    """Relative difference in L^2(dt) of two grid functions on a common grid."""
    if v.grid != w.grid:
        raise GridError("grid functions live on different grids")
    r = v.grid.r
    wts = v.grid.weights * r
    num = np.sum(wts * np.abs(v.values - w.values) ** 2)
    den = np.sum(wts * np.abs(w.values) ** 2)
    return float(np.sqrt(num / den))


@dataclass
class RieszBoundaryOperator:
    boundary: object
    space: object
    matrix: np.ndarray
    asymmetry: float

    def write_mm(self, path):
        """Matrix Market dump of the Galerkin matrix."""
        sio.mmwrite(path, self.matrix, comment=f"riesz single layer, {self.matrix.shape[0]} dofs")
        return path


def assemble_riesz(boundary, space, backend=None):
    """Galerkin matrix A[i, j] = int int phi_j(y) phi_i(x) |x-y|^(-1/2) dy dx."""
    h = space.element_lengths
    if np.any(~(h > 1e-14 * h.max())):
        raise AssemblyError("degenerate element")
    n = space.n_dofs
    pq = space.pairs
    ed = space.element_dofs
    A = np.zeros((n, n))
    for cls in pq.classes:
        blocks = pq.blocks(cls, _core_py.RIESZ, backend)[:, :2, 2:]
        rows = np.repeat(ed[cls.K], 2, axis=1).ravel()
        cols = np.tile(ed[cls.L], (1, 2)).ravel()
        vals = blocks.reshape(len(cls.K), 4).ravel()
        if cls.name == "identical":
            A += _scatter(n, rows, cols, vals)
        else:
            part = _scatter(n, rows, cols, vals)
            A += part + part.T
    if not np.all(np.isfinite(A)):
        raise AssemblyError("non-finite matrix entries")
    asym = float(np.max(np.abs(A - A.T)))
    return RieszBoundaryOperator(boundary, space, 0.5 * (A + A.T), asym)


def localized_forms(op, pou, u, v, disks=None):
    """Matrix F[D, D'] = <A(chi_D u), chi_D' v> over the chosen disks (default all).

    Uses the nodes of the matrix assembly, so the sum over all disk pairs
    reproduces v^T A u to rounding.
    """
    space = op.space
    pq = space.pairs
    idx = np.arange(len(pou.disks)) if disks is None else np.asarray(disks)
    F = np.zeros((len(idx), len(idx)))
    for cls in pq.classes:
        x, y, sig, tau, w = pq.points(cls)
        d = x - y
        kw = w * np.einsum("...i,...i->...", d, d) ** -0.25
        ux, uy = space.values_at(u, sig, cls.K), space.values_at(u, tau, cls.L)
        vx, vy = space.values_at(v, sig, cls.K), space.values_at(v, tau, cls.L)
        bx = pou.bumps(x)[idx].reshape(len(idx), -1)
        by = pou.bumps(y)[idx].reshape(len(idx), -1)
        kw = kw.ravel()
        # ordered pair (x in K, y in L): chi_D u at y, chi_D' v at x
        G = (by * uy.ravel()) @ (kw[:, None] * (bx * vx.ravel()).T)
        if cls.name != "identical":
            G += (bx * ux.ravel()) @ (kw[:, None] * (by * vy.ravel()).T)
        F += G
    return F


def localized_form(op, pou, D, D2, u, v):
    """<A(chi_D u), chi_D2 v> for disk indices D, D2."""
    if D == D2:
        return float(localized_forms(op, pou, u, v, [D])[0, 0])
    return float(localized_forms(op, pou, u, v, [D, D2])[0, 1])


@lru_cache(maxsize=8)
def _tilde_gram(per_decade, r_range=DEFAULT_R_RANGE):
    sp = halfline_space(geometric_nodes(r_range[0], r_range[1], per_decade))
    return sp, gram_matrices(sp, "tilde").S_tilde


@dataclass
class ContinuityRatio:
    theta: float
    ratio: float
    seed: int
    ratios: list


def random_bump(seed):
    return Bump.random(np.random.default_rng(seed))


def difference_ratio(theta, chi, u, resolution=40):
    """||(A+_{pi/2} - A+_theta)(chi u)||_~H^(1/2) / ||u||_L2 for one bump u."""
    if theta == np.pi / 2:
        return 0.0
    sp, St = _tilde_gram(int(resolution))
    r = sp.dof_points[:, 0]
    vals = corner_difference_at(theta, Scaled(u, chi), r)
    return float(np.sqrt(vals @ St @ vals)) / u.l2_norm()


def corner_continuity_ratio(theta, chi, trial_count, resolution=40, seed=0):
    """max over random bumps u of ||(A+_{pi/2} - A+_theta)(chi u)||_~H^(1/2) / ||u||_L2.

    The image is sampled at the nodes of a geometric half-line mesh with
    ``resolution`` nodes per decade on [1e-4, 1e2] and measured with the
    tilde Gram of its piecewise-linear interpolant. Trial k uses seed + k.
    """
    if trial_count < 1:
        raise ValueError("need at least one trial")
    ratios = [difference_ratio(theta, chi, random_bump(seed + k), resolution)
              for k in range(trial_count)]
    k = int(np.argmax(ratios))
    return ContinuityRatio(float(theta), ratios[k], seed + k, ratios)


def cone_point_function(theta, u):
    """Callable on points of the cone mesh returning u_+(|x|) or u_-(|x|) by ray."""
    ep = np.array([1.0, 0.0])
    em = np.array([np.cos(2 * theta), np.sin(2 * theta)])

    def f(p):
        p = np.asarray(p, dtype=float)
        s = np.hypot(p[..., 0], p[..., 1])
        cp = np.abs(p[..., 0] * ep[1] - p[..., 1] * ep[0])
        cm = np.abs(p[..., 0] * em[1] - p[..., 1] * em[0])
        dp = p[..., 0] * ep[0] + p[..., 1] * ep[1]
        plus = (cp < cm) | ((cp == cm) & (dp >= 0))
        return np.where(plus, _eval(u.plus, s), _eval(u.minus, s))

    return f


def theta_norm_ratio(theta, p, p_tilde, per_decade=60, r_range=(1e-3, 1e2)):
    """||Theta(p, p~)||_{H^1/2(Gamma)} / sqrt(||p||^2_{H^1/2(R+)} + ||p~||^2_{~H^1/2(R+)})."""
    t = np.geomspace(r_range[0], r_range[1], int(per_decade * np.log10(r_range[1] / r_range[0])) + 1)
    cone = cone_space(theta, t)
    u = theta_map(p, p_tilde, None)
    f = cone_point_function(theta, u)
    num = slobodeckii_seminorm(f, cone) ** 2 + l2_norm(f, cone) ** 2
    hl = halfline_space(np.concatenate([[0.0], t]))
    g = lambda x: _eval(p, x[..., 0])
    gt = lambda x: _eval(p_tilde, x[..., 0])
    den = slobodeckii_seminorm(g, hl) ** 2 + l2_norm(g, hl) ** 2 + tilde_half_norm(gt, hl) ** 2
    return float(np.sqrt(num / den))
