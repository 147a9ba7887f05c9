# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of ``_core_py``: element-pair blocks and direct exponential sums."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, sin, cos

RIESZ = 0
SLOBODECKII = 1


def pair_blocks(double[:, ::1] A, double[:, ::1] B, long[::1] K, long[::1] L,
                long[::1] iK, long[::1] iL, bint adjacent,
                double[::1] rs, double[::1] rt, double[::1] rw, int kind):
    cdef Py_ssize_t npair = K.shape[0], nq = rw.shape[0]
    out_arr = np.zeros((npair, 4, 4))
    cdef double[:, :, ::1] out = out_arr
    cdef Py_ssize_t p, q, a, b
    cdef long k, l
    cdef double ax, ay, ex, ey, bx, by, fx, fy, hK, hL, s, t, dx, dy, r2, w
    cdef double c[4]
    for p in range(npair):
        k = K[p]
        l = L[p]
        ax = A[k, 0]; ay = A[k, 1]
        ex = B[k, 0] - ax; ey = B[k, 1] - ay
        bx = A[l, 0]; by = A[l, 1]
        fx = B[l, 0] - bx; fy = B[l, 1] - by
        hK = sqrt(ex * ex + ey * ey)
        hL = sqrt(fx * fx + fy * fy)
        for q in range(nq):
            s = rs[q]
            t = rt[q]
            if adjacent:
                if iK[p] == 1:
                    s = 1.0 - s
                if iL[p] == 1:
                    t = 1.0 - t
            dx = ax + s * ex - bx - t * fx
            dy = ay + s * ey - by - t * fy
            r2 = dx * dx + dy * dy
            if kind == 0:
                w = rw[q] * hK * hL / sqrt(sqrt(r2))
                out[p, 0, 2] += w * (1.0 - s) * (1.0 - t)
                out[p, 0, 3] += w * (1.0 - s) * t
                out[p, 1, 2] += w * s * (1.0 - t)
                out[p, 1, 3] += w * s * t
            else:
                w = rw[q] * hK * hL / r2
                c[0] = 1.0 - s
                c[1] = s
                c[2] = -(1.0 - t)
                c[3] = -t
                if adjacent:
                    c[iK[p]] += c[2 + iL[p]]
                    c[2 + iL[p]] = 0.0
                for a in range(4):
                    for b in range(4):
                        out[p, a, b] += w * c[a] * c[b]
    return out_arr


def exp_sum(double[::1] t, double complex[::1] g, double[::1] xi, double sign):
    cdef Py_ssize_t n = t.shape[0], m = xi.shape[0], j, k
    out_arr = np.empty(m, dtype=complex)
    cdef double complex[::1] out = out_arr
    cdef double re, im, ph, cs, sn
    for k in range(m):
        re = 0.0
        im = 0.0
        for j in range(n):
            ph = sign * xi[k] * t[j]
            cs = cos(ph)
            sn = sin(ph)
            re += g[j].real * cs - g[j].imag * sn
            im += g[j].real * sn + g[j].imag * cs
        out[k] = re + 1j * im
    return out_arr
