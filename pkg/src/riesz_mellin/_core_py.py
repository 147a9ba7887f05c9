"""Numpy implementations of the hot loops; twin of the compiled ``_core``."""
import numpy as np

RIESZ = 0
SLOBODECKII = 1

_CHUNK = 4_000_000


def pair_blocks(A, B, K, L, iK, iL, adjacent, rs, rt, rw, kind):
    """Local 4x4 blocks for a list of element pairs sharing one reference rule.

    A, B: element start and end points, shape (n_el, 2).
    K, L: element indices of each pair; iK, iL: local index (0 or 1) of the
    shared vertex for adjacent pairs, where the rule assumes the shared vertex
    sits at reference coordinate 0 on both elements.
    rs, rt, rw: reference nodes on [0,1]^2 and weights.
    kind RIESZ: block[a, 2+b] = int psi_a(x) psi_b(y) |x-y|^(-1/2).
    kind SLOBODECKII: block = int c c^T |x-y|^(-2) with
    c = (psi_0(x), psi_1(x), -psi_0(y), -psi_1(y)); for adjacent pairs the two
    slots of the shared vertex are merged into the K slot.
    """
    npair = len(K)
    out = np.zeros((npair, 4, 4))
    nq = len(rw)
    step = max(1, _CHUNK // max(nq, 1))
    for s in range(0, npair, step):
        sl = slice(s, min(npair, s + step))
        out[sl] = _blocks_chunk(A, B, K[sl], L[sl], iK[sl], iL[sl], adjacent, rs, rt, rw, kind)
    return out


def _blocks_chunk(A, B, K, L, iK, iL, adjacent, rs, rt, rw, kind):
    sig = np.broadcast_to(rs, (len(K), len(rs)))
    tau = np.broadcast_to(rt, (len(K), len(rt)))
    if adjacent:
        sig = np.where(iK[:, None] == 1, 1.0 - sig, sig)
        tau = np.where(iL[:, None] == 1, 1.0 - tau, tau)
    AK, BK, AL, BL = A[K], B[K], A[L], B[L]
    hK = np.hypot(*(BK - AK).T)
    hL = np.hypot(*(BL - AL).T)
    dx = (AK[:, 0, None] + sig * (BK - AK)[:, 0, None]) - (AL[:, 0, None] + tau * (BL - AL)[:, 0, None])
    dy = (AK[:, 1, None] + sig * (BK - AK)[:, 1, None]) - (AL[:, 1, None] + tau * (BL - AL)[:, 1, None])
    r2 = dx * dx + dy * dy
    scale = (hK * hL)[:, None] * rw[None, :]
    out = np.zeros((len(K), 4, 4))
    if kind == RIESZ:
        w = scale * r2 ** -0.25
        px = (1.0 - sig, sig)
        py = (1.0 - tau, tau)
        for a in range(2):
            for b in range(2):
                out[:, a, 2 + b] = np.sum(w * px[a] * py[b], axis=1)
    else:
        w = scale / r2
        c = np.stack([1.0 - sig, sig, -(1.0 - tau), -tau], axis=1)
        if adjacent:
            idx = np.arange(len(K))
            c[idx, iK] += c[idx, 2 + iL]
            c[idx, 2 + iL] = 0.0
        out[:] = np.einsum("pq,paq,pbq->pab", w, c, c)
    return out


def exp_sum(t, g, xi, sign):
    """out[k] = sum_j g[j] exp(sign * 1j * xi[k] * t[j])."""
    t = np.asarray(t, dtype=float)
    g = np.asarray(g, dtype=complex)
    xi = np.asarray(xi, dtype=float)
    out = np.empty(len(xi), dtype=complex)
    step = max(1, _CHUNK // max(len(t), 1))
    for s in range(0, len(xi), step):
        ph = np.multiply.outer(xi[s:s + step], t)
        out[s:s + step] = (np.exp(sign * 1j * ph) @ g)
    return out
