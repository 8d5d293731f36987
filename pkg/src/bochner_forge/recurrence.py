"""Monic orthogonal matrix polynomials, their recurrence data, and the
update equations implied by the ad-condition.

Conventions
-----------
* Three-term recurrence: ``x P(x, n) = P(x, n+1) + B(n) P(x, n) + C(n) P(x, n-1)``
  with ``C(0) = 0`` and ``M(n) = <P(x, n), P(x, n)>_W``.
* Vectorization is row-major: entry (i, j) of a 2x2 matrix sits at index
  ``2 i + j`` (zero based).
* ``Lambda(n) = a22 n^2 + (A11 - a22 I) n + A0`` acts by left multiplication.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .algebra import I2, J, MatPoly, commutator, sym_sqrt, unvec, vec
from .errors import (EstimatedError, GramBreakdown, NoCommutatorError, NonPositiveNorm,
                     PoleInN, SingularH, SingularNorm, SingularUpdate)
from .ops import (DiffOp2, ShiftBandOp, a2_of_L, diagonal_band, eigenvalue_lambda,
                  jacobi_operator, shift_commutator)
from .quad import DEFAULT_M, DOUBLING_RTOL, JacobiRule, WeightFn

SINGULAR_RTOL = 1e-10
SIGMA = vec(I2)


# ---------------------------------------------------------------------------
# orthogonal polynomials from a weight

@dataclass(frozen=True)
class OPSeq:
    """Monic OPs P(x, 0..N) with norms M and recurrence coefficients B, C."""

    polys: tuple
    M: np.ndarray
    B: np.ndarray
    C: np.ndarray

    @property
    def N(self):
        return len(self.polys) - 1


def _run_stieltjes(d, N):
    B, C, M, coeffs, fail = _kernels.stieltjes(d.x, d.w, d.S, N)
    if fail >= 0:
        raise GramBreakdown(f"M({fail}) is numerically singular (condition > 1e12)")
    return B, C, M, coeffs


def generate_ops(W: WeightFn, rule: JacobiRule | None = None, N: int = 25,
                 m: int = DEFAULT_M, check: bool = True) -> OPSeq:
    """Monic orthogonal matrix polynomials of W up to degree N.

    The polynomials are built by the discretized matrix Stieltjes procedure
    on the Gauss-Jacobi nodes of each weight term.  With ``check`` the run is
    repeated with twice the nodes and B, C must agree to 1e-9 relative.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    if rule is not None:
        m = rule.m
    B, C, M, coeffs = _run_stieltjes(W.discretize(m, rule), N)
    if check:
        B2, C2, _, _ = _run_stieltjes(W.discretize(2 * m), N)
        for X, Y in ((B, B2), (C, C2)):
            scale = max(np.abs(Y).max(), 1.0)
            if np.abs(X - Y).max() > DOUBLING_RTOL * scale:
                raise EstimatedError("recurrence coefficients changed under node doubling", X, Y)
    polys = tuple(MatPoly(coeffs[n, : n + 1]) for n in range(N + 1))
    return OPSeq(polys, M, B, C)


# ---------------------------------------------------------------------------
# vectorized update equations

@dataclass(frozen=True)
class HKSystem:
    """H(n) = n H1 + H0 and K(n) = n K1 + K0 for the B and C updates."""

    H1: np.ndarray
    H0: np.ndarray
    K1: np.ndarray
    K0: np.ndarray
    sigma: np.ndarray
    D: DiffOp2

    def H(self, n):
        return n * self.H1 + self.H0

    def K(self, n):
        return n * self.K1 + self.K0

    def theta(self, n, B):
        """theta(n) from B(n): B^2 L' - 2 B L' B + L' B^2 - 2 a2(B), L' = A11 n + A0."""
        Lp = self.D.A11 * n + self.D.A0
        a2 = self.D.a2
        T = B @ B @ Lp - 2 * B @ Lp @ B + Lp @ B @ B
        T = T - 2 * (a2.a22 * B @ B + a2.a21 * B + a2.a20 * I2)
        return vec(T)


def build_HK(D: DiffOp2) -> HKSystem:
    """Entrywise construction of H1, H0, K1, K0 (row-major, index 2 i + j)."""
    a22 = D.a2.a22
    A11, A0 = D.A11, D.A0
    d = np.eye(2)
    H1 = np.zeros((4, 4))
    H0 = np.zeros((4, 4))
    K1 = np.zeros((4, 4))
    K0 = np.zeros((4, 4))
    for i in range(2):
        for j in range(2):
            r = 2 * i + j
            for k in range(2):
                for l in range(2):
                    s = 2 * k + l
                    dd = d[i, k] * d[j, l]
                    H1[r, s] = 2 * a22 * dd - d[i, k] * A11[l, j] + d[j, l] * A11[i, k]
                    H0[r, s] = -2 * a22 * dd + d[i, k] * (A11 - A0)[l, j] + d[j, l] * A0[i, k]
                    K1[r, s] = 4 * a22 * dd - d[i, k] * A11[l, j] + d[j, l] * A11[i, k]
                    K0[r, s] = -6 * a22 * dd + d[i, k] * (2 * A11 - A0)[l, j] + d[j, l] * A0[i, k]
    return HKSystem(H1, H0, K1, K0, SIGMA.copy(), D)


def _is_singular(A):
    scale = np.abs(A).max()
    return scale == 0 or abs(np.linalg.det(A)) < SINGULAR_RTOL * scale**4


def b_update_step(B_n, n, D: DiffOp2, sys: HKSystem | None = None):
    """B(n+1) from H(n+2) b(n+1) = H(n) b(n) - 2 a21 sigma."""
    sys = sys or build_HK(D)
    Hn2 = sys.H(n + 2)
    if _is_singular(Hn2):
        raise SingularUpdate(n)
    rhs = sys.H(n) @ vec(B_n) - 2 * D.a2.a21 * sys.sigma
    return unvec(np.linalg.solve(Hn2, rhs))


def c_update_step(C_n, B_n, n, D: DiffOp2, sys: HKSystem | None = None):
    """C(n+1) from K(n+2) c(n+1) = K(n) c(n) + theta(n)."""
    sys = sys or build_HK(D)
    Kn2 = sys.K(n + 2)
    if _is_singular(Kn2):
        raise SingularUpdate(n)
    rhs = sys.K(n) @ vec(C_n) + sys.theta(n, B_n)
    return unvec(np.linalg.solve(Kn2, rhs))


def b_update_residual(B_n, B_next, n, D: DiffOp2):
    """Matrix form of the B update equation, evaluated at given data."""
    a22, a21 = D.a2.a22, D.a2.a21
    A11, A0 = D.A11, D.A0
    R = (-2 * a22 * (n + 1) * B_next + B_next @ (A11 * (n + 1) + A0) - (A11 * (n + 2) + A0) @ B_next
         + 2 * a22 * (n - 1) * B_n + (A11 * n + A0) @ B_n - B_n @ (A11 * (n - 1) + A0) - 2 * a21 * I2)
    return R


def c_update_residual(C_n, C_next, B_n, n, D: DiffOp2):
    """Matrix form of the C update equation, evaluated at given data."""
    a2 = D.a2
    A11, A0 = D.A11, D.A0
    Lp = A11 * n + A0
    R = (-2 * a2.a22 * (2 * n + 1) * C_next + C_next @ (A11 * n + A0) - (A11 * (n + 2) + A0) @ C_next
         + 2 * a2.a22 * (2 * n - 3) * C_n + Lp @ C_n - C_n @ (A11 * (n - 2) + A0)
         + B_n @ B_n @ Lp - 2 * B_n @ Lp @ B_n + Lp @ B_n @ B_n
         - 2 * a2.a22 * B_n @ B_n - 2 * a2.a21 * B_n - 2 * a2.a20 * I2)
    return R


def m_update_residual(M_prev, M_n, M_next, B_n, n, D: DiffOp2) -> float:
    """Normalized max-norm residual of the nonlinear M update equation at n."""
    if abs(np.linalg.det(M_prev)) < SINGULAR_RTOL * np.abs(M_prev).max() ** 2:
        raise SingularNorm("M(n-1) is singular")
    a2 = D.a2
    A11 = D.A11
    Lam = eigenvalue_lambda(n, D)
    Mi = np.linalg.inv(M_prev)
    lhs = 2 * a2.a22 * (2 * n + 1) * M_next + A11 @ M_next + M_next @ A11.T
    t1 = M_n @ (2 * a2.a22 * (2 * n - 3) * Mi + Mi @ A11 + A11.T @ Mi) @ M_n
    t2 = commutator(B_n, commutator(B_n, Lam)) @ M_n
    a2B = a2.a22 * B_n @ B_n + a2.a21 * B_n + a2.a20 * I2
    t3 = -2 * a2B @ M_n
    scale = max(np.abs(lhs).max(), np.abs(t1).max(), np.abs(t2).max(), np.abs(t3).max(), 1e-300)
    return float(np.abs(lhs - t1 - t2 - t3).max() / scale)


def iterate_b(B0, N, D: DiffOp2, ell=0):
    """B(ell..N) by repeated b_update_step."""
    sys = build_HK(D)
    out = [np.asarray(B0, dtype=float)]
    for n in range(ell, N):
        out.append(b_update_step(out[-1], n, D, sys))
    return np.array(out)


def b_closed_form(ell, B_ell, n, sys: HKSystem, a21=0.0):
    """B(n) from B(ell) via the telescoped product formula (n may be real).

    b(n) = H(n)^-1 H(l) H(n+1)^-1 [H(l+1) b(l) - 2 a21 (n-l) H((n+l+1)/2) H(l)^-1 sigma]
    """
    ks = set(range(int(np.ceil(ell)), int(np.floor(n + 1)) + 1)) if float(ell).is_integer() else set()
    ks |= {ell, ell + 1, n, n + 1}
    for k in sorted(ks):
        if _is_singular(sys.H(k)):
            raise SingularH(k)
    Hl = sys.H(ell)
    inner = sys.H(ell + 1) @ vec(B_ell)
    if a21 != 0:
        inner = inner - 2 * a21 * (n - ell) * sys.H((n + ell + 1) / 2) @ np.linalg.solve(Hl, sys.sigma)
    b = np.linalg.solve(sys.H(n), Hl @ np.linalg.solve(sys.H(n + 1), inner))
    return unvec(b)


def rational_fit_residual(values, ns, deg=None):
    """Fit each entry of a sampled sequence by p(n)/q(n) and report the misfit.

    A linearized least-squares fit p(n) - v q(n) = 0 with deg(p) = deg(q)
    is solved by SVD; the returned value is the max relative misfit of
    p/q against the samples.
    """
    values = np.asarray(values, dtype=float).reshape(len(ns), -1)
    ns = np.asarray(ns, dtype=float)
    if deg is None:
        deg = (len(ns) - 2) // 2
    x = ns / ns.max()
    V = np.vander(x, deg + 1, increasing=True)
    worst = 0.0
    for col in values.T:
        scale = max(np.abs(col).max(), 1e-300)
        v = col / scale
        A = np.hstack([V, -v[:, None] * V])
        _, _, vt = np.linalg.svd(A)
        coef = vt[-1]
        p = V @ coef[: deg + 1]
        q = V @ coef[deg + 1:]
        worst = max(worst, float(np.abs(p - v * q).max() / max(np.abs(q).max(), 1e-300)))
    return worst


# ---------------------------------------------------------------------------
# exceptional cases of the B update

def _close(lhs, rhs, tol):
    return abs(lhs - rhs) <= tol * max(1.0, abs(lhs), abs(rhs))


def normalized_op(a22, a, b, c, d, lam, a21=0.0, a20=None):
    """DiffOp2 with A11 = [[lam+d, b+c], [b-c, lam-d]], A0 = diag(a, -a), A10 = 0."""
    from .algebra import QuadCoeff
    a20 = -a22 if a20 is None else a20
    A11 = np.array([[lam + d, b + c], [b - c, lam - d]])
    return DiffOp2(QuadCoeff(a22, a21, a20), A11, np.zeros((2, 2)), np.diag([a, -a]))


def exceptional_cases(a22, a, b, c, d, lam, tol=1e-10) -> frozenset:
    """Tags of the loci where det H(n) vanishes identically in n.

    Tags ``i``-``v`` are the classical list; ``vi`` is the additional locus
    ``a = 0, lam = a22, b^2 - c^2 + d^2 = a22^2`` (a22 != 0), which also
    kills the determinant.
    """
    tags = set()
    pm = _close(b, c, tol) or _close(b, -c, tol)
    if _close(a22, 0, tol):
        if _close(lam**2, b**2 - c**2 + d**2, tol) and _close(a, 0, tol):
            tags.add("i")
        if pm and _close(lam, d, tol):
            tags.add("ii")
        if pm and _close(lam, -d, tol):
            tags.add("iii")
    if _close(a22, d, tol) and pm and _close(lam, d + 2 * a, tol):
        tags.add("iv")
    if _close(a22, -d, tol) and pm and _close(lam, -(d + 2 * a), tol):
        tags.add("v")
    if (not _close(a22, 0, tol) and _close(a, 0, tol) and _close(lam, a22, tol)
            and _close(b**2 - c**2 + d**2, a22**2, tol)):
        tags.add("vi")
    return frozenset(tags)


def det_h_samples(a22, a, b, c, d, lam, ns=range(6)):
    """sigma_min / sigma_max of H(n) at sample n; zero exactly when det H(n) = 0.

    The singular-value ratio is used rather than det / prod(row norms),
    which is unreliable when a whole row of H(n) is itself near zero.
    """
    sys = build_HK(normalized_op(a22, a, b, c, d, lam))
    out = []
    for n in ns:
        sv = np.linalg.svd(sys.H(n), compute_uv=False)
        out.append(sv[-1] / sv[0] if sv[0] > 0 else 0.0)
    return np.array(out)


def det_h_vanishes(a22, a, b, c, d, lam, tol=1e-10) -> bool:
    """Whether det H(n), a degree-4 polynomial in n, vanishes at 6 samples.

    Six zeros of a polynomial of degree <= 4 force it to vanish identically.
    """
    return bool(np.all(det_h_samples(a22, a, b, c, d, lam) < tol))


# ---------------------------------------------------------------------------
# ad-condition residuals

def jacobi_from_ops(ops: OPSeq, pad: int = 3) -> ShiftBandOp:
    """L = S + B(n) + C(n) S* on n in [-pad, N] with zero data for n < 0."""
    N = ops.N
    B = np.zeros((N + 1 + pad, 2, 2))
    C = np.zeros_like(B)
    B[pad:] = ops.B
    C[pad:] = ops.C
    return jacobi_operator(B, C, lo=-pad)


def lambda_band(D: DiffOp2, lo, hi) -> ShiftBandOp:
    return diagonal_band(np.array([eigenvalue_lambda(n, D) for n in range(lo, hi + 1)]), lo)


def ad_operator(L: ShiftBandOp, D: DiffOp2) -> ShiftBandOp:
    """ad_L^2(Lambda) - 2 a2(L) on the range where it is defined."""
    Lam = lambda_band(D, L.lo, L.hi)
    ad1 = shift_commutator(L, Lam)
    ad2 = shift_commutator(L, ad1)
    return ad2 - 2.0 * a2_of_L(L, D.a2)


def ad_residuals(L: ShiftBandOp, D: DiffOp2, N: int) -> dict:
    """Bands Z_2 ... Z_-2 of ad_L^2(Lambda) - 2 a2(L) for n in [0, N]."""
    if L.hi < N + 3 or L.lo > -3:
        from .errors import TruncationError
        raise TruncationError("L must be tabulated on [-3, N + 3]")
    R = ad_operator(L, D)
    names = {2: "Z2", 1: "Z1", 0: "Z0", -1: "Zm1", -2: "Zm2"}
    return {names[k]: R.band(k, 0, N) for k in names}


def ad_residual_norms(ops: OPSeq, D: DiffOp2, N: int) -> dict:
    """Max relative norms of the Z bands for n <= N, normalized by |a2(L)|."""
    L = jacobi_from_ops(ops)
    Z = ad_residuals(L, D, N)
    scale = max(2.0 * a2_of_L(L, D.a2).max_norm(0, N), 1e-300)
    return {k: float(np.abs(v).max() / scale) for k, v in Z.items()}


# ---------------------------------------------------------------------------
# norms from B

def m_from_b(B_n, Lam_n):
    """M~(n) = [B(n), Lambda(n)] J; proportional to M(n) for Bochner data."""
    X = commutator(B_n, Lam_n)
    if np.abs(X).max() <= 1e-12 * max(np.abs(B_n).max() * np.abs(Lam_n).max(), 1e-300):
        raise NoCommutatorError("B(n) commutes with Lambda(n)")
    return X @ J


def proportionality(Mt, M):
    """Least-squares beta with M ~ beta Mt, and the angle between them."""
    u, v = vec(Mt), vec(M)
    beta = float(u @ v / (u @ u))
    r = v - beta * u
    angle = float(np.arctan2(np.linalg.norm(r), abs(beta) * np.linalg.norm(u)))
    return beta, angle


def c_from_b(B_n, B_next, Lam_n, Lam_next, beta_ratio):
    """C(n+1) = beta_ratio [B(n+1), L(n+1)] [B(n), L(n)]^-1."""
    X0 = commutator(B_n, Lam_n)
    if abs(np.linalg.det(X0)) < SINGULAR_RTOL * max(np.abs(X0).max(), 1e-300) ** 2:
        raise SingularNorm("[B(n), Lambda(n)] is singular")
    if beta_ratio == 0:
        return np.zeros((2, 2))
    return beta_ratio * commutator(B_next, Lam_next) @ np.linalg.inv(X0)


def _skew(X):
    return float(np.abs(X - X.T).max() / max(np.abs(X).max(), 1e-300))


def symmetry_suite(n, B, C, M, D: DiffOp2) -> float:
    """Max relative skew part of Lam M, B M, C(n) M(n), C(n+1) M(n) at n."""
    Lam = eigenvalue_lambda(n, D)
    mats = [Lam @ M[n], B[n] @ M[n], C[n + 1] @ M[n]]
    if n > 0:
        mats.append(C[n] @ M[n])
    return max(_skew(X) for X in mats)


# ---------------------------------------------------------------------------
# string equation

def string_equation_residual(ops: OPSeq, D: DiffOp2, N: int):
    """Residual of [L~, O~] - 2 a2(L~) and the skew defect of O~ for n <= N.

    L~ = M^-1/2 L M^1/2 bandwise with symmetric square roots, Lam~ likewise,
    O~ = [L~, Lam~].  Returns ``(residual, skew_defect)``, both relative.
    """
    if ops.N < N + 4:
        raise ValueError("need M(n) for n <= N + 4")
    hi = ops.N
    roots = []
    for n in range(hi + 1):
        try:
            roots.append(sym_sqrt(ops.M[n]))
        except np.linalg.LinAlgError as exc:
            raise NonPositiveNorm(f"M({n}) is not positive definite") from exc
    pad = 3
    # rows n < 0 only ever meet C(0) = 0, so identity padding is harmless
    Mh = np.array([I2] * pad + [r[0] for r in roots])
    Mih = np.array([I2] * pad + [r[1] for r in roots])
    Bp = np.concatenate([np.zeros((pad, 2, 2)), ops.B])
    Cp = np.concatenate([np.zeros((pad, 2, 2)), ops.C])
    Lam = np.array([eigenvalue_lambda(n, D) for n in range(-pad, hi + 1)])
    idx = range(hi + pad)
    Lup = np.array([Mih[i] @ Mh[i + 1] for i in idx])
    L0 = np.array([Mih[i] @ Bp[i] @ Mh[i] for i in idx])
    Ldn = np.array([Mih[i] @ Cp[i] @ Mh[i - 1] if i > 0 else np.zeros((2, 2)) for i in idx])
    Lt = ShiftBandOp({1: Lup, 0: L0, -1: Ldn}, -pad)
    Lam = np.array([Mih[i] @ Lam[i] @ Mh[i] for i in idx])
    Ot = shift_commutator(Lt, diagonal_band(Lam, -pad))
    R = shift_commutator(Lt, Ot) - 2.0 * a2_of_L(Lt, D.a2)
    # n = 0 row sees the truncation C(0) = 0 exactly, so it is included
    scale = max(2.0 * a2_of_L(Lt, D.a2).max_norm(0, N), 1e-300)
    res = R.max_norm(0, N) / scale
    oscale = max(Ot.max_norm(0, N), 1e-300)
    skew = 0.0
    for n in range(0, N + 1):
        skew = max(skew, np.abs(Ot.coef(0, n) + Ot.coef(0, n).T).max())
        skew = max(skew, np.abs(Ot.coef(1, n) + Ot.coef(-1, n + 1).T).max())
    return float(res), float(skew / oscale)


# ---------------------------------------------------------------------------
# case (v): closed form and overdetermination

def case_v_htilde(n, a, c, a22=-1.0):
    """3x3 reduced update matrix acting on (B11, B21, B22)."""
    return np.array([
        [2 * a22 * n - 2 * a - 2 * a22, 2 * c * n, 0.0],
        [0.0, -2 * c * n + 2 * c, 2 * a22 * n - 2 * a],
        [0.0, 4 * a22 * n - 4 * a - 2 * a22, 0.0],
    ])


def case_v_closed_B(n, a, c, B0):
    """B(n) entries 11, 21, 22 in the hypergeometric case (v) normal form.

    Entry 12 is not determined by the reduced system and is returned as NaN.
    At n = 0 the initial data are returned.
    """
    B0 = np.asarray(B0, dtype=float)
    out = np.full((2, 2), np.nan)
    if n == 0:
        out[0, 0], out[1, 0], out[1, 1] = B0[0, 0], B0[1, 0], B0[1, 1]
        return out
    dens = [a + n, a + n - 1, a + n + 1, 2 * a + 2 * n - 1, 2 * a + 2 * n + 1]
    if min(abs(x) for x in dens) < 1e-12:
        raise PoleInN(f"closed form has a pole at n={n} for a={a}")
    b11, b21, b22 = B0[0, 0], B0[1, 0], B0[1, 1]
    p, q, r = a + n, a + n - 1, a + n + 1
    s, t = 2 * a + 2 * n - 1, 2 * a + 2 * n + 1
    out[0, 0] = (b11 * a * (a - 1) / (p * q)
                 + b21 * c * ((2 * a - 1) * (4 * a - 1) * n**2 + (2 * a - 1) * (4 * a**2 - 2 * a + 1) * n)
                 / (p * q * s * t))
    out[1, 0] = b21 * (4 * a**2 - 1) / (4 * a**2 + 8 * a * n + 4 * n**2 - 1)
    out[1, 1] = (b22 * a * (a + 1) / (p * r)
                 - b21 * c * ((2 * a + 1) * (4 * a + 1) * n**2 + (2 * a + 1) * (4 * a**2 + 2 * a + 1) * n)
                 / (p * r * s * t))
    return out


def _v3(B):
    return np.array([B[0, 0], B[1, 0], B[1, 1]])


def case_v_reduced_residual(n, a, c, B_n, B_next, a22=-1.0, a21=0.0):
    """|H~(n+2) v(n+1) - H~(n) v(n) + 2 a21 (1, 0, 1)|, relative."""
    lhs = case_v_htilde(n + 2, a, c, a22) @ _v3(B_next)
    rhs = case_v_htilde(n, a, c, a22) @ _v3(B_n) - 2 * a21 * np.array([1.0, 0.0, 1.0])
    return float(np.abs(lhs - rhs).max() / max(np.abs(lhs).max(), np.abs(rhs).max(), 1e-300))


def case_v_overdetermined(n, c, B_n, B_next):
    """Left minus right side of the extra (1, 2) equation of the update."""
    lhs = (-2 * (n + 2) * c + 2 * c) * B_next[0, 0] + 2 * (n + 2) * c * B_next[1, 1]
    rhs = (-2 * n * c + 2 * c) * B_n[0, 0] + 2 * n * c * B_n[1, 1]
    return lhs - rhs, max(abs(lhs), abs(rhs))


def case_v_direct_holds(a, c, B0, N=20, tol=1e-9) -> bool:
    """Substitute the closed form into the extra equation for n = 0..N."""
    seq = [case_v_closed_B(n, a, c, B0) for n in range(N + 2)]
    scale = max(1.0, abs(c) * max(np.nanmax(np.abs(B)) for B in seq))
    for n in range(N + 1):
        r, _ = case_v_overdetermined(n, c, seq[n], seq[n + 1])
        if abs(r) > tol * scale:
            return False
    return True


def case_v_classify(a, c, B0, tol=1e-10):
    """Which of the constraint branches (v.a), (v.b), (v.c) holds, or None."""
    B0 = np.asarray(B0, dtype=float)
    b11, b21, b22 = B0[0, 0], B0[1, 0], B0[1, 1]
    sc = max(1.0, abs(b11), abs(b22), abs(c * b21), abs(a * b11), abs(a * b22))
    if abs(c) <= tol:
        return "v.a"
    if abs(a * a - 1) <= tol and abs(b21) <= tol * sc and abs(a * (b11 - b22) - (b11 + b22)) <= tol * sc:
        return "v.b"
    if (abs(b11 + 2 * c * b21 - b22) <= tol * sc
            and abs(2 * a * (b11 - b22) + b11 + b22) <= tol * sc):
        return "v.c"
    return None
