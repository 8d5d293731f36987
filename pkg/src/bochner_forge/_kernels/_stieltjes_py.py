"""Pure numpy matrix Stieltjes procedure (fallback backend)."""
import numpy as np

COND_MAX = 1e12


def _cond_sym(M):
    # spectral condition number of a symmetric 2x2 matrix; inf if not PD
    a, b, d = M[0, 0], 0.5 * (M[0, 1] + M[1, 0]), M[1, 1]
    h = 0.5 * (a + d)
    r = np.hypot(0.5 * (a - d), b)
    lo, hi = h - r, h + r
    if lo <= 0:
        return np.inf
    return hi / lo


def stieltjes(x, w, S, N):
    """Monic orthogonal matrix polynomials for the discrete measure sum w_k S_k.

    Parameters
    ----------
    x, w : ndarray (K,)
        Nodes and weights.
    S : ndarray (K, 2, 2)
        Smooth weight factor at the nodes.
    N : int
        Highest degree.

    Returns
    -------
    B, C, M : ndarray (N + 1, 2, 2)
        Recurrence coefficients and norms, C[0] = 0.
    coeffs : ndarray (N + 1, N + 1, 2, 2)
        coeffs[n, k] is the x^k coefficient of P(x, n).
    fail : int
        First n with an ill-conditioned M(n), or -1.
    """
    x = np.ascontiguousarray(x, dtype=float)
    w = np.ascontiguousarray(w, dtype=float)
    S = np.ascontiguousarray(S, dtype=float)
    K = len(x)
    B = np.zeros((N + 1, 2, 2))
    C = np.zeros((N + 1, 2, 2))
    M = np.zeros((N + 1, 2, 2))
    coeffs = np.zeros((N + 1, N + 1, 2, 2))
    coeffs[0, 0] = np.eye(2)
    Pprev = np.zeros((K, 2, 2))
    Pcur = np.broadcast_to(np.eye(2), (K, 2, 2)).copy()
    wS = w[:, None, None] * S
    Minv_prev = None
    for n in range(N + 1):
        PS = Pcur @ wS
        Mn = np.einsum("kij,klj->il", PS, Pcur)
        Mn = 0.5 * (Mn + Mn.T)
        if _cond_sym(Mn) > COND_MAX:
            return B, C, M, coeffs, n
        Minv = np.linalg.inv(Mn)
        xM = np.einsum("k,kij,klj->il", x, PS, Pcur)
        M[n] = Mn
        B[n] = xM @ Minv
        if n > 0:
            C[n] = Mn @ Minv_prev
        if n < N:
            Pnext = x[:, None, None] * Pcur - B[n] @ Pcur - C[n] @ Pprev
            coeffs[n + 1, 1 : n + 2] = coeffs[n, : n + 1]
            coeffs[n + 1, : n + 1] -= np.einsum("ij,kjl->kil", B[n], coeffs[n, : n + 1])
            if n > 0:
                coeffs[n + 1, :n] -= np.einsum("ij,kjl->kil", C[n], coeffs[n - 1, :n])
            Pprev, Pcur = Pcur, Pnext
        Minv_prev = Minv
    return B, C, M, coeffs, -1
