"""Right-acting second-order matrix differential operators and banded
shift operators on Mat2-valued sequences.

Differential operators act on the right,

    P . D = P''(x) a2(x) + P'(x) A1(x) + P(x) A0,   A1(x) = A11 x + A10,

so matrix coefficients multiply P's coefficients from the right.  Shift
operators act on sequences n -> F(n) by (S F)(n) = F(n + 1), and a band term
C_k(n) S^k multiplies from the left.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import I2, MatPoly, QuadCoeff, HYPERGEOMETRIC
from .errors import TruncationError
from .quad import DEFAULT_M, JacobiRule, WeightFn


@dataclass(frozen=True)
class DiffOp2:
    """D = d^2 a2(x) I + d (A11 x + A10) + A0."""

    a2: QuadCoeff = HYPERGEOMETRIC
    A11: np.ndarray = field(default_factory=lambda: np.zeros((2, 2)))
    A10: np.ndarray = field(default_factory=lambda: np.zeros((2, 2)))
    A0: np.ndarray = field(default_factory=lambda: np.zeros((2, 2)))

    def __post_init__(self):
        for name in ("A11", "A10", "A0"):
            X = np.array(getattr(self, name), dtype=float).reshape(2, 2)
            X.setflags(write=False)
            object.__setattr__(self, name, X)

    @property
    def hypergeometric(self) -> bool:
        return self.a2.hypergeometric

    @property
    def A1(self) -> MatPoly:
        return MatPoly.linear(self.A11, self.A10)

    def A1_at(self, x):
        x = np.asarray(x, dtype=float)
        return x[..., None, None] * self.A11 + self.A10

    def __call__(self, P: MatPoly) -> MatPoly:
        return apply_right(P, self)

    def conjugate(self, U):
        """U D U^-1."""
        Ui = np.linalg.inv(U)
        return DiffOp2(self.a2, U @ self.A11 @ Ui, U @ self.A10 @ Ui, U @ self.A0 @ Ui)

    def shifted(self, alpha):
        """D + alpha I."""
        return DiffOp2(self.a2, self.A11, self.A10, self.A0 + alpha * I2)


def apply_right(P: MatPoly, D: DiffOp2) -> MatPoly:
    """P'' a2 + P' A1 + P A0."""
    return P.deriv(2).scale_poly(D.a2.coeffs) + P.deriv() @ D.A1 + P @ D.A0


def eigenvalue_lambda(n, D: DiffOp2):
    """Lambda(n) = a22 n^2 + (A11 - a22 I) n + A0 (n may be real)."""
    a22 = D.a2.a22
    return a22 * n * n * I2 + (D.A11 - a22 * I2) * n + D.A0


def _basis(dmax):
    out = []
    for k in range(dmax + 1):
        for i in range(2):
            for j in range(2):
                E = np.zeros((2, 2))
                E[i, j] = 1.0
                out.append(MatPoly.monomial(k, E))
    return out


def symmetry_defect(D: DiffOp2, W: WeightFn, rule: JacobiRule | None = None, dmax=6, m=DEFAULT_M):
    """Normalized max of |<P.D, Q> - <P, Q.D>| over the basis E_ij x^k, k <= dmax.

    Each pair is divided by the Cauchy-Schwarz scale
    ``|PD| |Q| + |P| |QD|`` so the result is dimensionless.
    """
    if dmax < 1:
        raise ValueError("dmax must be >= 1")
    d = W.discretize(m, rule)
    basis = _basis(dmax)
    F = np.stack([P(d.x) for P in basis])
    FD = np.stack([apply_right(P, D)(d.x) for P in basis])
    wS = d.w[:, None, None] * d.S
    G1 = np.einsum("akij,kjl,bkml->abim", FD, wS, F)
    G2 = np.einsum("akij,kjl,bkml->abim", F, wS, FD)
    n0 = np.sqrt(np.abs(np.einsum("akij,kjl,akml->aim", F, wS, F)).max(axis=(1, 2)))
    n1 = np.sqrt(np.abs(np.einsum("akij,kjl,akml->aim", FD, wS, FD)).max(axis=(1, 2)))
    scale = np.outer(n1, n0) + np.outer(n0, n1)
    diff = np.abs(G1 - G2).max(axis=(2, 3))
    return float((diff / np.maximum(scale, 1e-300)).max())


# operator identities for multiplication by x

def ad_x(op):
    """ad_x(op): P -> op(P x) - op(P) x, for a map op on MatPoly."""
    return lambda P: op(P.mul_x()) - op(P).mul_x()


def ad_x_identities(D: DiffOp2, dmax=6) -> tuple[float, float]:
    """Max residuals of ad_x^3(D) = 0 and ad_x^2(D) = 2 a2(x) on a basis."""
    ad1 = ad_x(D)
    ad2 = ad_x(ad1)
    ad3 = ad_x(ad2)
    r3 = r2 = 0.0
    for P in _basis(dmax):
        r3 = max(r3, ad3(P).norm())
        r2 = max(r2, (ad2(P) - 2.0 * P.scale_poly(D.a2.coeffs)).norm())
    return r3, r2


@dataclass(frozen=True)
class ShiftBandOp:
    """Banded difference operator sum_k C_k(n) S^k tabulated on n in [lo, hi].

    Parameters
    ----------
    bands : dict
        Offset k -> array of shape (hi - lo + 1, 2, 2).
    lo : int
        First tabulated index (may be negative for Z-indexed sequences).
    """

    bands: dict
    lo: int = 0

    def __post_init__(self):
        lens = {len(np.asarray(v)) for v in self.bands.values()}
        if len(lens) != 1:
            raise ValueError("all bands must share one tabulation range")
        b = {}
        for k, v in self.bands.items():
            v = np.array(v, dtype=float)
            v.setflags(write=False)
            b[int(k)] = v
        object.__setattr__(self, "bands", b)

    @property
    def length(self):
        return len(next(iter(self.bands.values())))

    @property
    def hi(self):
        return self.lo + self.length - 1

    @property
    def bandwidth(self):
        return max(abs(k) for k in self.bands)

    def coef(self, k, n):
        if k not in self.bands:
            return np.zeros((2, 2))
        if not self.lo <= n <= self.hi:
            raise TruncationError(f"n={n} outside [{self.lo}, {self.hi}]")
        return self.bands[k][n - self.lo]

    def band(self, k, lo, hi):
        """Band k restricted to [lo, hi] (zeros if absent)."""
        if lo < self.lo or hi > self.hi:
            raise TruncationError(f"[{lo}, {hi}] outside [{self.lo}, {self.hi}]")
        if k not in self.bands:
            return np.zeros((hi - lo + 1, 2, 2))
        return self.bands[k][lo - self.lo : hi - self.lo + 1]

    def restrict(self, lo, hi):
        return ShiftBandOp({k: self.band(k, lo, hi) for k in self.bands}, lo)

    def __add__(self, other):
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        if lo > hi:
            raise TruncationError("disjoint tabulation ranges")
        keys = set(self.bands) | set(other.bands)
        return ShiftBandOp({k: self.band(k, lo, hi) + other.band(k, lo, hi) for k in keys}, lo)

    def __rmul__(self, s):
        return ShiftBandOp({k: s * v for k, v in self.bands.items()}, self.lo)

    def __sub__(self, other):
        return self + (-1.0) * other

    def __matmul__(self, other):
        return shift_compose(self, other)

    def max_norm(self, lo=None, hi=None):
        lo = self.lo if lo is None else lo
        hi = self.hi if hi is None else hi
        return max(float(np.abs(self.band(k, lo, hi)).max()) for k in self.bands)


def identity_band(lo, hi):
    return ShiftBandOp({0: np.broadcast_to(I2, (hi - lo + 1, 2, 2))}, lo)


def shift_band(k, lo, hi):
    """Pure shift S^k tabulated on [lo, hi]."""
    return ShiftBandOp({k: np.broadcast_to(I2, (hi - lo + 1, 2, 2))}, lo)


def diagonal_band(seq, lo=0):
    """Left multiplication by a sequence n -> Lam(n)."""
    return ShiftBandOp({0: np.asarray(seq)}, lo)


def shift_compose(A: ShiftBandOp, B: ShiftBandOp) -> ShiftBandOp:
    """(C_j S^j)(D_k S^k) = C_j(n) D_k(n + j) S^(j + k)."""
    jmin, jmax = min(A.bands), max(A.bands)
    lo = max(A.lo, B.lo - jmin)
    hi = min(A.hi, B.hi - jmax)
    if lo > hi:
        raise TruncationError("composition exhausts the tabulated range")
    out = {}
    for j, Cj in A.bands.items():
        Ca = Cj[lo - A.lo : hi - A.lo + 1]
        for k in B.bands:
            Db = B.band(k, lo + j, hi + j)
            term = np.einsum("nij,njk->nik", Ca, Db)
            out[j + k] = out[j + k] + term if (j + k) in out else term
    return ShiftBandOp(out, lo)


def shift_commutator(A: ShiftBandOp, B: ShiftBandOp) -> ShiftBandOp:
    return shift_compose(A, B) - shift_compose(B, A)


def a2_of_L(L: ShiftBandOp, a2: QuadCoeff) -> ShiftBandOp:
    """a22 L^2 + a21 L + a20 I on the range where L^2 is defined."""
    L2 = shift_compose(L, L)
    return a2.a22 * L2 + a2.a21 * L + a2.a20 * identity_band(L.lo, L.hi)


def jacobi_operator(B, C, lo=0) -> ShiftBandOp:
    """L = S + B(n) + C(n) S* from tabulated B, C on [lo, lo + len - 1]."""
    B = np.asarray(B, dtype=float)
    C = np.asarray(C, dtype=float)
    return ShiftBandOp({1: np.broadcast_to(I2, B.shape), 0: B, -1: C}, lo)
