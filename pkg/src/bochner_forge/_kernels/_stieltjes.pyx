# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled matrix Stieltjes procedure; same contract as ``_stieltjes_py``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, hypot, INFINITY

cnp.import_array()

cdef double COND_MAX = 1e12


cdef inline void mm(const double* A, const double* B, double* out) noexcept nogil:
    out[0] = A[0] * B[0] + A[1] * B[2]
    out[1] = A[0] * B[1] + A[1] * B[3]
    out[2] = A[2] * B[0] + A[3] * B[2]
    out[3] = A[2] * B[1] + A[3] * B[3]


cdef inline double inv_sym(const double* M, double* out) noexcept nogil:
    # inverse of a 2x2 matrix, returns the condition number of its symmetric part
    cdef double a = M[0], d = M[3], b = 0.5 * (M[1] + M[2])
    cdef double h = 0.5 * (a + d), r = hypot(0.5 * (a - d), b)
    cdef double det = M[0] * M[3] - M[1] * M[2]
    out[0] = M[3] / det
    out[1] = -M[1] / det
    out[2] = -M[2] / det
    out[3] = M[0] / det
    if h - r <= 0:
        return INFINITY
    return (h + r) / (h - r)


def stieltjes(x, w, S, int N):
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef double[::1] wv = np.ascontiguousarray(w, dtype=np.float64)
    cdef double[:, :, ::1] Sv = np.ascontiguousarray(S, dtype=np.float64)
    cdef Py_ssize_t K = xv.shape[0]
    B_ = np.zeros((N + 1, 2, 2))
    C_ = np.zeros((N + 1, 2, 2))
    M_ = np.zeros((N + 1, 2, 2))
    coeffs_ = np.zeros((N + 1, N + 1, 2, 2))
    cdef double[:, :, ::1] Bv = B_
    cdef double[:, :, ::1] Cv = C_
    cdef double[:, :, ::1] Mv = M_
    cdef double[:, :, :, ::1] cv = coeffs_
    Pa = np.zeros((K, 4))
    Pb = np.zeros((K, 4))
    Pc = np.zeros((K, 4))
    cdef double[:, ::1] Pprev = Pa
    cdef double[:, ::1] Pcur = Pb
    cdef double[:, ::1] Pnext = Pc
    cdef double[:, ::1] tmp
    cdef double Mn[4]
    cdef double xM[4]
    cdef double Minv[4]
    cdef double Minv_prev[4]
    cdef double PSk[4]
    cdef double t1[4]
    cdef double t2[4]
    cdef double cond, wk
    cdef Py_ssize_t n, k, i, j, q
    for k in range(K):
        Pcur[k, 0] = 1.0
        Pcur[k, 3] = 1.0
    cv[0, 0, 0, 0] = 1.0
    cv[0, 0, 1, 1] = 1.0
    with nogil:
        for n in range(N + 1):
            for i in range(4):
                Mn[i] = 0.0
                xM[i] = 0.0
            for k in range(K):
                wk = wv[k]
                mm(&Pcur[k, 0], &Sv[k, 0, 0], PSk)
                # P S P^T
                t1[0] = PSk[0] * Pcur[k, 0] + PSk[1] * Pcur[k, 1]
                t1[1] = PSk[0] * Pcur[k, 2] + PSk[1] * Pcur[k, 3]
                t1[2] = PSk[2] * Pcur[k, 0] + PSk[3] * Pcur[k, 1]
                t1[3] = PSk[2] * Pcur[k, 2] + PSk[3] * Pcur[k, 3]
                for i in range(4):
                    Mn[i] += wk * t1[i]
                    xM[i] += wk * xv[k] * t1[i]
            Mn[1] = 0.5 * (Mn[1] + Mn[2])
            Mn[2] = Mn[1]
            cond = inv_sym(Mn, Minv)
            if cond > COND_MAX:
                with gil:
                    return B_, C_, M_, coeffs_, n
            for i in range(4):
                Mv[n, i // 2, i % 2] = Mn[i]
            mm(xM, Minv, t1)
            for i in range(4):
                Bv[n, i // 2, i % 2] = t1[i]
            if n > 0:
                mm(Mn, Minv_prev, t2)
                for i in range(4):
                    Cv[n, i // 2, i % 2] = t2[i]
            else:
                for i in range(4):
                    t2[i] = 0.0
            if n < N:
                for k in range(K):
                    mm(t1, &Pcur[k, 0], PSk)
                    for i in range(4):
                        Pnext[k, i] = xv[k] * Pcur[k, i] - PSk[i]
                    if n > 0:
                        mm(t2, &Pprev[k, 0], PSk)
                        for i in range(4):
                            Pnext[k, i] -= PSk[i]
                # coefficient recurrence
                for q in range(n + 1):
                    for i in range(2):
                        for j in range(2):
                            cv[n + 1, q + 1, i, j] = cv[n, q, i, j]
                for q in range(n + 1):
                    for i in range(2):
                        for j in range(2):
                            cv[n + 1, q, i, j] -= t1[2 * i] * cv[n, q, 0, j] + t1[2 * i + 1] * cv[n, q, 1, j]
                            if n > 0 and q < n:
                                cv[n + 1, q, i, j] -= t2[2 * i] * cv[n - 1, q, 0, j] + t2[2 * i + 1] * cv[n - 1, q, 1, j]
                tmp = Pprev
                Pprev = Pcur
                Pcur = Pnext
                Pnext = tmp
            for i in range(4):
                Minv_prev[i] = Minv[i]
    return B_, C_, M_, coeffs_, -1
