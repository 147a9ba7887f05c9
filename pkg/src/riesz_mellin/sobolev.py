"""Fractional trace norms on meshed curves and Galerkin Gram matrices.

Squared H^(1/2) norm = L^2 part + Slobodeckii double integral
    |u|^2 = int int |u(x) - u(y)|^2 / |x - y|^2 dx dy.
On the half-line the tilde norm adds 2 int |v|^2 / x dx. Meshes that stop
short of the real domain (a half-line cut at R, a cone cut at R) carry an
analytic exterior weight for the pairs (x in mesh, y beyond R) where v(y)=0.
"""
import os
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.io as sio
import scipy.linalg as sla

from .errors import HardyWeightError
from .mellin import weighted_line_integral
from .pairs import PairQuadrature
from .quadrature import gauss_legendre

ELEMENT_ORDER = 8


@dataclass
class BoundaryFESpace:
    """Continuous piecewise-linear hats on a meshed curve in the plane.

    dof[i] is the basis index of node i, or -1 where the functions vanish.
    Callables passed to norm routines receive points of shape (..., 2).
    """

    nodes: np.ndarray
    elements: np.ndarray
    dof: np.ndarray
    kind: str = "curve"
    exterior: Optional[Callable] = None
    hardy_origin: Optional[np.ndarray] = None
    _pairs: Optional[PairQuadrature] = field(default=None, repr=False)

    def __post_init__(self):
        self.nodes = np.asarray(self.nodes, dtype=float)
        self.elements = np.asarray(self.elements, dtype=np.int64)
        self.dof = np.asarray(self.dof, dtype=np.int64)
        h = self.element_lengths
        if np.any(h <= 0):
            raise ValueError("mesh elements must have positive length")

    @property
    def n_dofs(self):
        return int(self.dof.max()) + 1 if np.any(self.dof >= 0) else 0

    @property
    def element_lengths(self):
        d = self.nodes[self.elements[:, 1]] - self.nodes[self.elements[:, 0]]
        return np.hypot(d[:, 0], d[:, 1])

    @property
    def element_dofs(self):
        return self.dof[self.elements]

    @property
    def dof_points(self):
        idx = np.argsort(self.dof)
        idx = idx[self.dof[idx] >= 0]
        return self.nodes[idx]

    @property
    def pairs(self):
        if self._pairs is None:
            self._pairs = PairQuadrature(self.nodes, self.elements)
        return self._pairs

    def interpolate(self, f):
        return np.asarray(f(self.dof_points), dtype=float)

    def element_quadrature(self, n=ELEMENT_ORDER):
        """Points (n_el, n, 2), local coordinates (n,) and weights (n_el, n)."""
        s, w = gauss_legendre(n, 0.0, 1.0)
        A = self.nodes[self.elements[:, 0]]
        B = self.nodes[self.elements[:, 1]]
        pts = A[:, None, :] + s[None, :, None] * (B - A)[:, None, :]
        return pts, s, self.element_lengths[:, None] * w[None, :]

    def values_at(self, coeffs, sig, elements=None):
        """P1 function with given coefficients at local coordinates sig on elements."""
        ed = self.element_dofs if elements is None else self.element_dofs[elements]
        c = np.concatenate([np.asarray(coeffs, dtype=float), [0.0]])
        c0 = c[np.where(ed[:, 0] >= 0, ed[:, 0], -1)]
        c1 = c[np.where(ed[:, 1] >= 0, ed[:, 1], -1)]
        return c0[:, None] * (1.0 - sig) + c1[:, None] * sig


def _number(mask):
    dof = -np.ones(len(mask), dtype=np.int64)
    dof[mask] = np.arange(int(mask.sum()))
    return dof


def interval_space(x, whole_line=False):
    """Segment [x_0, x_n] of the real line with every node a dof.

    With whole_line=True the functions are extended by zero to the real line
    (end nodes carry no dof) and the norms are those of H^(1/2)(R).
    """
    x = np.asarray(x, dtype=float)
    nodes = np.stack([x, np.zeros_like(x)], axis=1)
    el = np.stack([np.arange(len(x) - 1), np.arange(1, len(x))], axis=1)
    if not whole_line:
        return BoundaryFESpace(nodes, el, np.arange(len(x)), kind="interval")
    a, b = x[0], x[-1]
    mask = np.ones(len(x), dtype=bool)
    mask[0] = mask[-1] = False
    return BoundaryFESpace(nodes, el, _number(mask), kind="line",
                           exterior=lambda p: 1.0 / (p[..., 0] - a) + 1.0 / (b - p[..., 0]))


def halfline_space(x, dof_at_origin=False):
    """Mesh of [0, R] inside the half-line; functions vanish at R and beyond.

    The exterior weight int_R^inf dy/(y-x)^2 = 1/(R-x) accounts for pairs
    with y > R; the Hardy weight is 1/x.
    """
    x = np.asarray(x, dtype=float)
    if x[0] != 0.0 or np.any(np.diff(x) <= 0):
        raise ValueError("half-line nodes must start at 0 and increase")
    R = x[-1]
    nodes = np.stack([x, np.zeros_like(x)], axis=1)
    el = np.stack([np.arange(len(x) - 1), np.arange(1, len(x))], axis=1)
    mask = np.ones(len(x), dtype=bool)
    mask[-1] = False
    mask[0] = bool(dof_at_origin)
    return BoundaryFESpace(nodes, el, _number(mask), kind="halfline",
                           exterior=lambda p: 1.0 / (R - p[..., 0]),
                           hardy_origin=np.zeros(2))


def geometric_nodes(r_min, r_max, per_decade):
    """0 followed by a log-uniform sequence from r_min to r_max."""
    n = int(np.ceil(per_decade * np.log10(r_max / r_min))) + 1
    return np.concatenate([[0.0], np.geomspace(r_min, r_max, n)])


def cone_space(theta, t):
    """Two rays from the origin at angle 2*theta, each meshed at radii t (t[-1] = R).

    The vertex carries a dof; the functions vanish at radius R on both rays.
    """
    t = np.asarray(t, dtype=float)
    if t[0] <= 0 or np.any(np.diff(t) <= 0):
        raise ValueError("ray radii must be positive and increasing")
    ep = np.array([1.0, 0.0])
    em = np.array([np.cos(2 * theta), np.sin(2 * theta)])
    m = len(t)
    nodes = np.concatenate([[[0.0, 0.0]], t[:, None] * ep, t[:, None] * em])
    plus = np.concatenate([[0], np.arange(1, m + 1)])
    minus = np.concatenate([[0], np.arange(m + 1, 2 * m + 1)])
    el = np.concatenate([np.stack([plus[:-1], plus[1:]], 1), np.stack([minus[:-1], minus[1:]], 1)])
    mask = np.ones(len(nodes), dtype=bool)
    mask[m] = mask[2 * m] = False
    R = t[-1]
    c = np.cos(2 * theta)
    sn = abs(np.sin(2 * theta))

    def exterior(p):
        s = np.hypot(p[..., 0], p[..., 1])
        same = 1.0 / (R - s)
        a = s * sn
        b = R - s * c
        with np.errstate(divide="ignore", invalid="ignore"):
            other = np.where(a > 1e-12 * b, np.arctan2(a, b) / a, 1.0 / b)
        return same + other

    sp = BoundaryFESpace(nodes, el, _number(mask), kind="cone", exterior=exterior)
    sp.theta = float(theta)
    sp.e_plus, sp.e_minus = ep, em
    return sp


def _edge_nodes(length, m, grading):
    x = np.arange(m + 1) / m
    if grading == 1.0:
        return length * x
    lo = 0.5 * length * (2 * x) ** grading
    hi = length - 0.5 * length * (2 * (1 - x)) ** grading
    return np.where(x <= 0.5, lo, hi)


def polygon_space(boundary, n_elements, grading=1.0):
    """Closed boundary mesh with about n_elements elements (one dof per node).

    Elements are distributed over edges in proportion to edge length; with
    grading > 1 each edge is graded toward both of its vertices.
    """
    L = boundary.edge_lengths
    ne = len(L)
    if n_elements < ne:
        raise ValueError("need at least one element per edge")
    raw = n_elements * L / L.sum()
    m = np.maximum(1, np.floor(raw).astype(int))
    while m.sum() < n_elements:
        m[np.argmax(raw - m)] += 1
    while m.sum() > n_elements:
        k = np.argmax(np.where(m > 1, m - raw, -np.inf))
        m[k] -= 1
    pts = []
    v = boundary.vertices
    for i in range(ne):
        a, b = v[i], v[(i + 1) % ne]
        s = _edge_nodes(L[i], m[i], grading)[:-1]
        pts.append(a + (s / L[i])[:, None] * (b - a))
    nodes = np.concatenate(pts)
    n = len(nodes)
    el = np.stack([np.arange(n), (np.arange(n) + 1) % n], axis=1)
    sp = BoundaryFESpace(nodes, el, np.arange(n), kind="polygon")
    sp.boundary = boundary
    return sp


@dataclass
class NormMatrices:
    M: np.ndarray
    S: np.ndarray
    slobodeckii: np.ndarray
    S_tilde: Optional[np.ndarray] = None
    hardy: Optional[np.ndarray] = None

    def write_mm(self, directory):
        """Write every assembled matrix as <name>.mtx (Matrix Market, dense array format)."""
        os.makedirs(directory, exist_ok=True)
        paths = []
        for name in ("M", "S", "slobodeckii", "S_tilde", "hardy"):
            mat = getattr(self, name)
            if mat is not None:
                paths.append(os.path.join(directory, f"{name}.mtx"))
                sio.mmwrite(paths[-1], mat)
        return paths


def _scatter(n, rows, cols, vals):
    out = np.zeros((n + 1, n + 1))
    r = np.where(rows >= 0, rows, n)
    c = np.where(cols >= 0, cols, n)
    np.add.at(out, (r, c), vals)
    return out[:n, :n]


def weighted_mass(space, weight=None, n=ELEMENT_ORDER):
    """int phi_i phi_j w over the mesh (w = 1 when weight is None)."""
    pts, s, w = space.element_quadrature(n)
    if weight is not None:
        w = w * weight(pts)
    psi = np.stack([1.0 - s, s])
    loc = np.einsum("eq,aq,bq->eab", w, psi, psi)
    ed = space.element_dofs
    rows = np.repeat(ed, 2, axis=1)
    cols = np.tile(ed, (1, 2))
    return _scatter(space.n_dofs, rows.ravel(), cols.ravel(), loc.reshape(len(ed), 4).ravel())


def mass_matrix(space):
    return weighted_mass(space)


def stiffness_matrix(space):
    """int u' v' along the curve (H^1 seminorm Gram)."""
    h = space.element_lengths
    loc = np.array([[1.0, -1.0], [-1.0, 1.0]])[None] / h[:, None, None]
    ed = space.element_dofs
    rows = np.repeat(ed, 2, axis=1)
    cols = np.tile(ed, (1, 2))
    return _scatter(space.n_dofs, rows.ravel(), cols.ravel(), loc.reshape(len(ed), 4).ravel())


def slobodeckii_matrix(space, backend=None):
    n = space.n_dofs
    pq = space.pairs
    S = np.zeros((n, n))
    ed = space.element_dofs
    for cls in pq.classes:
        if cls.name == "identical":
            # |u(x)-u(y)|^2/|x-y|^2 = (u1-u0)^2/h^2 on one element: exact
            loc = np.array([1.0, -1.0, -1.0, 1.0])
            rows = np.repeat(ed, 2, axis=1).ravel()
            cols = np.tile(ed, (1, 2)).ravel()
            S += _scatter(n, rows, cols, np.tile(loc, len(ed)))
            continue
        blocks = pq.blocks(cls, _backend_kind("slobodeckii"), backend)
        slots = np.concatenate([ed[cls.K], ed[cls.L]], axis=1)
        rows = np.repeat(slots, 4, axis=1).ravel()
        cols = np.tile(slots, (1, 4)).ravel()
        S += 2.0 * _scatter(n, rows, cols, blocks.reshape(len(cls.K), 16).ravel())
    if space.exterior is not None:
        S += 2.0 * weighted_mass(space, space.exterior)
    return 0.5 * (S + S.T)


def _backend_kind(name):
    from . import _core_py
    return _core_py.SLOBODECKII if name == "slobodeckii" else _core_py.RIESZ


def hardy_matrix(space):
    if space.hardy_origin is None:
        raise ValueError("space has no Hardy weight")
    at_origin = np.all(space.nodes == space.hardy_origin, axis=1)
    if np.any(space.dof[at_origin] >= 0):
        raise HardyWeightError("a basis function is nonzero at the origin; int |v|^2/x diverges")
    o = space.hardy_origin
    return weighted_mass(space, lambda p: 1.0 / np.hypot(p[..., 0] - o[0], p[..., 1] - o[1]))


def gram_matrices(space, flavor="standard", backend=None):
    """Mass, H^(1/2) Gram M + Slobodeckii and, for flavor 'tilde', M + Slobodeckii + 2 Hardy."""
    if flavor not in ("standard", "tilde"):
        raise ValueError("flavor must be 'standard' or 'tilde'")
    H = hardy_matrix(space) if flavor == "tilde" else None
    M = mass_matrix(space)
    Sl = slobodeckii_matrix(space, backend)
    out = NormMatrices(M, M + Sl, Sl)
    if H is not None:
        out.hardy = H
        out.S_tilde = M + Sl + 2.0 * H
    return out


def _callable_slobodeckii_sq(f, space):
    pq = space.pairs
    total = 0.0
    for cls in pq.classes:
        x, y, _, _, w = pq.points(cls)
        d = x - y
        r2 = np.einsum("...i,...i->...", d, d)
        val = np.sum(w * (f(x) - f(y)) ** 2 / r2)
        total += val if cls.name == "identical" else 2.0 * val
    if space.exterior is not None:
        pts, _, w = space.element_quadrature(2 * ELEMENT_ORDER)
        total += 2.0 * np.sum(w * f(pts) ** 2 * space.exterior(pts))
    return float(total)


def slobodeckii_seminorm(phi, space, backend=None):
    """Slobodeckii seminorm of a coefficient vector or of a callable on the space's curve."""
    if callable(phi):
        return float(np.sqrt(max(_callable_slobodeckii_sq(phi, space), 0.0)))
    v = np.asarray(phi, dtype=float)
    return float(np.sqrt(max(v @ slobodeckii_matrix(space, backend) @ v, 0.0)))


def l2_norm(phi, space):
    if callable(phi):
        pts, _, w = space.element_quadrature(2 * ELEMENT_ORDER)
        return float(np.sqrt(np.sum(w * phi(pts) ** 2)))
    v = np.asarray(phi, dtype=float)
    return float(np.sqrt(v @ mass_matrix(space) @ v))


def hardy_integral(v, space):
    """int |v|^2 / |x - origin| dx."""
    o = space.hardy_origin
    if callable(v):
        if abs(float(v(o[None, :])[0])) > 0:
            raise HardyWeightError("function does not vanish at the origin")
        pts, _, w = space.element_quadrature(2 * ELEMENT_ORDER)
        return float(np.sum(w * v(pts) ** 2 / np.hypot(*(pts - o).transpose(2, 0, 1))))
    c = np.asarray(v, dtype=float)
    return float(c @ hardy_matrix(space) @ c)


def tilde_half_norm(v, space, backend=None):
    """sqrt(|v|^2_{H^1/2(R+)} + 2 int |v|^2/x dx + ||v||^2_{L^2}) on a half-line space."""
    if space.hardy_origin is None:
        raise ValueError("tilde norm needs a half-line space")
    if not callable(v):
        c = np.asarray(v, dtype=float)
        at_origin = np.all(space.nodes == space.hardy_origin, axis=1)
        d = space.dof[at_origin]
        if np.any(d >= 0) and np.any(c[d[d >= 0]] != 0):
            raise HardyWeightError("function does not vanish at the origin")
    hardy = hardy_integral(v, space)
    return float(np.sqrt(slobodeckii_seminorm(v, space, backend) ** 2 + 2.0 * hardy + l2_norm(v, space) ** 2))


def mellin_half_seminorm(phi):
    """sqrt((1/2 pi) int |xi|^2/(1+|xi|) |phi_hat(i xi)|^2 d xi) for a real GridFunction."""
    return float(np.sqrt(weighted_line_integral(phi, lambda x: x * x / (1.0 + np.abs(x)))))


def halfline_slobodeckii_multiplier(xi):
    """Exact Mellin multiplier of the squared Slobodeckii seminorm on (0, inf)."""
    xi = np.abs(np.asarray(xi, dtype=float))
    out = np.empty_like(xi)
    small = xi < 1e-4
    z = np.pi * xi[small]
    out[small] = 2.0 * z * z / 3.0
    z = np.pi * xi[~small]
    out[~small] = 2.0 * (z / np.tanh(z) - 1.0)
    return out


def mellin_slobodeckii_sq(phi):
    """Squared Slobodeckii seminorm on (0, inf) from the exact Mellin multiplier."""
    return weighted_line_integral(phi, halfline_slobodeckii_multiplier)


def dual_norm(v, M, S):
    """Discrete H^(-1/2) norm sqrt(v^T M S^-1 M v) through the L^2 pairing."""
    Mv = M @ v
    return float(np.sqrt(Mv @ sla.cho_solve(sla.cho_factor(S), Mv)))


def continuity_modulus_estimate(A, M, S, Mv=None):
    """sqrt(lambda_max(A^T Mv^-1 S Mv^-1 A, M)).

    Equals sup_u sup_v <A u, v> / (||u||_M ||v||_{-1/2,h}) with the discrete
    dual norm ||v||^2_{-1/2,h} = v^T Mv S^-1 Mv v.
    """
    A = np.asarray(A, dtype=float)
    if not np.any(A):
        return 0.0
    if Mv is None:
        Mv = M
    sla.cholesky(M)
    sla.cholesky(S)
    X = sla.cho_solve(sla.cho_factor(Mv), A)
    B = X.T @ S @ X
    B = 0.5 * (B + B.T)
    n = B.shape[0]
    lam = sla.eigh(B, M, eigvals_only=True, subset_by_index=[n - 1, n - 1])[0]
    return float(np.sqrt(max(lam, 0.0)))
