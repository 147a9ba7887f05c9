"""Element-pair quadrature on meshed curves.

Pairs of elements are split into three classes, each with one reference
rule on [0,1]^2:
  identical  - substitution sigma - tau = +-w^2 (removes |x-y|^(-1/2));
  adjacent   - Duffy triangles around the shared vertex with rho = v^2;
  separated  - tensor Gauss, a higher order when the elements are close.
The same nodes serve matrix assembly and weighted (localized) forms, so the
two agree to rounding.
"""
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _backend
from .quadrature import gauss_legendre


@lru_cache(maxsize=None)
def identical_rule(n):
    w_nodes, w_w = gauss_legendre(n, 0.0, 1.0)
    s_nodes, s_w = gauss_legendre(n, 0.0, 1.0)
    W, S = np.meshgrid(w_nodes, s_nodes, indexing="ij")
    WW = np.outer(w_w, s_w)
    tau = (1.0 - W ** 2) * S
    sig = tau + W ** 2
    wt = 2.0 * W * (1.0 - W ** 2) * WW
    rs = np.concatenate([sig.ravel(), tau.ravel()])
    rt = np.concatenate([tau.ravel(), sig.ravel()])
    rw = np.concatenate([wt.ravel(), wt.ravel()])
    return rs, rt, rw


@lru_cache(maxsize=None)
def adjacent_rule(n):
    """Shared vertex at sigma = tau = 0."""
    v, vw = gauss_legendre(n, 0.0, 1.0)
    u, uw = gauss_legendre(n, 0.0, 1.0)
    V, U = np.meshgrid(v, u, indexing="ij")
    rho = V ** 2
    wt = 2.0 * V ** 3 * np.outer(vw, uw)
    rs = np.concatenate([rho.ravel(), (rho * U).ravel()])
    rt = np.concatenate([(rho * U).ravel(), rho.ravel()])
    rw = np.concatenate([wt.ravel(), wt.ravel()])
    return rs, rt, rw


@lru_cache(maxsize=None)
def tensor_rule(n):
    x, w = gauss_legendre(n, 0.0, 1.0)
    X, Y = np.meshgrid(x, x, indexing="ij")
    return X.ravel(), Y.ravel(), np.outer(w, w).ravel()


def _segment_distance(A1, B1, A2, B2):
    def pt_seg(P, A, B):
        AB = B - A
        t = np.clip(np.einsum("ij,ij->i", P - A, AB) / np.einsum("ij,ij->i", AB, AB), 0.0, 1.0)
        D = P - A - t[:, None] * AB
        return np.hypot(D[:, 0], D[:, 1])

    return np.minimum.reduce([pt_seg(A1, A2, B2), pt_seg(B1, A2, B2), pt_seg(A2, A1, B1), pt_seg(B2, A1, B1)])


@dataclass
class PairClass:
    name: str
    K: np.ndarray
    L: np.ndarray
    iK: np.ndarray
    iL: np.ndarray
    adjacent: bool
    rule: tuple

    def local_coords(self):
        rs, rt, _ = self.rule
        sig = np.broadcast_to(rs, (len(self.K), len(rs)))
        tau = np.broadcast_to(rt, (len(self.K), len(rt)))
        if self.adjacent:
            sig = np.where(self.iK[:, None] == 1, 1.0 - sig, sig)
            tau = np.where(self.iL[:, None] == 1, 1.0 - tau, tau)
        return sig, tau


class PairQuadrature:
    """Quadrature for double integrals over Gamma x Gamma on a meshed curve.

    Unordered pairs K <= L are stored once; callers double the off-diagonal
    classes when they need the full ordered integral.
    """

    def __init__(self, nodes, elements, order_singular=8, order_near=12, order_far=6, near_factor=1.0):
        self.nodes = np.asarray(nodes, dtype=float)
        self.elements = np.asarray(elements, dtype=np.int64)
        self.A = self.nodes[self.elements[:, 0]]
        self.B = self.nodes[self.elements[:, 1]]
        self.h = np.hypot(*(self.B - self.A).T)
        ne = len(self.elements)
        K, L = np.triu_indices(ne, k=1)
        eK, eL = self.elements[K], self.elements[L]
        share = (eK[:, :, None] == eL[:, None, :])
        adj = share.any(axis=(1, 2))
        classes = []
        idx = np.arange(ne)
        z = np.zeros(ne, dtype=np.int64)
        classes.append(PairClass("identical", idx, idx, z, z, False, identical_rule(order_singular)))
        if adj.any():
            sh = share[adj]
            # local index of the shared vertex on each element (first match)
            flat = sh.reshape(len(sh), 4).argmax(axis=1)
            iK, iL = flat // 2, flat % 2
            classes.append(PairClass("adjacent", K[adj], L[adj], iK, iL, True, adjacent_rule(order_singular)))
        Ks, Ls = K[~adj], L[~adj]
        if len(Ks):
            dist = _segment_distance(self.A[Ks], self.B[Ks], self.A[Ls], self.B[Ls])
            near = dist < near_factor * np.maximum(self.h[Ks], self.h[Ls])
            zn = np.zeros(int(near.sum()), dtype=np.int64)
            zf = np.zeros(int((~near).sum()), dtype=np.int64)
            if near.any():
                classes.append(PairClass("near", Ks[near], Ls[near], zn, zn, False, tensor_rule(order_near)))
            if (~near).any():
                classes.append(PairClass("far", Ks[~near], Ls[~near], zf, zf, False, tensor_rule(order_far)))
        self.classes = classes

    def points(self, cls):
        """Physical points x (on K), y (on L), local coordinates and weights incl. h_K h_L."""
        sig, tau = cls.local_coords()
        AK, BK, AL, BL = self.A[cls.K], self.B[cls.K], self.A[cls.L], self.B[cls.L]
        x = AK[:, None, :] + sig[..., None] * (BK - AK)[:, None, :]
        y = AL[:, None, :] + tau[..., None] * (BL - AL)[:, None, :]
        w = (self.h[cls.K] * self.h[cls.L])[:, None] * cls.rule[2][None, :]
        return x, y, sig, tau, w

    def blocks(self, cls, kind, backend=None):
        rs, rt, rw = cls.rule
        return _backend.pair_blocks(self.A, self.B, cls.K, cls.L, cls.iK, cls.iL, cls.adjacent,
                                    rs, rt, rw, kind, backend)
