"""2x2 real matrix, matrix-polynomial and matrix-rational arithmetic.

A ``Mat2`` is a plain ``numpy`` array of shape ``(2, 2)``; the helpers here
never mutate their inputs.  :class:`MatPoly` stores coefficients in
increasing powers of x with shape ``(deg + 1, 2, 2)``; the zero polynomial
has degree -1 and an empty coefficient array.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as npoly

I2 = np.eye(2)
J = np.array([[0.0, 1.0], [-1.0, 0.0]])


def mat2(entries) -> np.ndarray:
    """Coerce row-major entries (nested or flat) to a float (2, 2) array."""
    X = np.asarray(entries, dtype=float)
    return X.reshape(2, 2)


def adjugate(X):
    """Adjugate of a 2x2 (or stacked ``(..., 2, 2)``) matrix."""
    X = np.asarray(X, dtype=float)
    out = np.empty_like(X)
    out[..., 0, 0] = X[..., 1, 1]
    out[..., 1, 1] = X[..., 0, 0]
    out[..., 0, 1] = -X[..., 0, 1]
    out[..., 1, 0] = -X[..., 1, 0]
    return out


def det2(X):
    X = np.asarray(X, dtype=float)
    return X[..., 0, 0] * X[..., 1, 1] - X[..., 0, 1] * X[..., 1, 0]


def commutator(X, Y):
    """XY - YX."""
    return X @ Y - Y @ X


def trace_identity_check(X, Y) -> float:
    """Max-norm of X adj(Y) + Y adj(X) - tr(Y adj(X)) I."""
    R = X @ adjugate(Y) + Y @ adjugate(X) - np.trace(Y @ adjugate(X)) * I2
    return float(np.abs(R).max())


def vec(X):
    """Row-major vectorization, entry (i, j) -> index 2 i + j."""
    return np.asarray(X, dtype=float).reshape(-1)


def unvec(v):
    return np.asarray(v, dtype=float).reshape(2, 2)


def linear_map_matrix(f) -> np.ndarray:
    """4x4 matrix of a linear map on Mat2 in the row-major convention."""
    M = np.empty((4, 4))
    for k in range(4):
        E = np.zeros(4)
        E[k] = 1.0
        M[:, k] = vec(f(unvec(E)))
    return M


def sym_sqrt(M):
    """Symmetric square root and inverse square root of an SPD matrix."""
    w, V = np.linalg.eigh(0.5 * (M + M.T))
    if w.min() <= 0:
        raise np.linalg.LinAlgError("matrix is not positive definite")
    r = np.sqrt(w)
    return (V * r) @ V.T, (V / r) @ V.T


def _trim(c, tol=0.0):
    c = np.asarray(c, dtype=float)
    k = len(c)
    while k > 0 and np.abs(c[k - 1]).max() <= tol:
        k -= 1
    return c[:k]


@dataclass(frozen=True)
class MatPoly:
    """Polynomial in x with 2x2 real coefficients.

    Parameters
    ----------
    coeffs : array_like, shape (k, 2, 2)
        Coefficients in increasing powers of x.  Trailing zero
        coefficients are stripped so the leading one is nonzero.
    """

    coeffs: np.ndarray = field(default_factory=lambda: np.zeros((0, 2, 2)))

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.size == 0:
            c = np.zeros((0, 2, 2))
        c = _trim(c.reshape(-1, 2, 2))
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    # construction helpers
    @classmethod
    def constant(cls, X):
        return cls(np.asarray(X, dtype=float)[None])

    @classmethod
    def monomial(cls, k, X=I2):
        c = np.zeros((k + 1, 2, 2))
        c[k] = X
        return cls(c)

    @classmethod
    def linear(cls, A1, A0):
        """A1 x + A0."""
        return cls(np.stack([A0, A1]))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def coef(self, k):
        """Coefficient of x^k (zero past the degree)."""
        if 0 <= k <= self.degree:
            return self.coeffs[k]
        return np.zeros((2, 2))

    def padded(self, n):
        out = np.zeros((n, 2, 2))
        out[: len(self.coeffs)] = self.coeffs
        return out

    def __add__(self, other):
        other = _as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return MatPoly(self.padded(n) + other.padded(n))

    def __sub__(self, other):
        return self + (-1.0) * _as_poly(other)

    def __neg__(self):
        return (-1.0) * self

    def __rmul__(self, s):
        if np.isscalar(s):
            return MatPoly(s * self.coeffs)
        return _as_poly(s) @ self

    def __mul__(self, s):
        if np.isscalar(s):
            return MatPoly(s * self.coeffs)
        return self @ _as_poly(s)

    def __matmul__(self, other):
        other = _as_poly(other)
        if self.degree < 0 or other.degree < 0:
            return MatPoly()
        out = np.zeros((len(self.coeffs) + len(other.coeffs) - 1, 2, 2))
        for i, Ci in enumerate(self.coeffs):
            out[i : i + len(other.coeffs)] += np.einsum("ij,kjl->kil", Ci, other.coeffs)
        return MatPoly(out)

    def __rmatmul__(self, other):
        return _as_poly(other) @ self

    def scale_poly(self, s):
        """Multiply by a scalar polynomial with coefficients ``s`` (increasing)."""
        s = np.asarray(s, dtype=float)
        if self.degree < 0 or not s.any():
            return MatPoly()
        out = np.zeros((len(s) + len(self.coeffs) - 1, 2, 2))
        for i, si in enumerate(s):
            out[i : i + len(self.coeffs)] += si * self.coeffs
        return MatPoly(out)

    def mul_x(self):
        return self.scale_poly([0.0, 1.0])

    def deriv(self, m=1):
        c = self.coeffs
        for _ in range(m):
            if len(c) <= 1:
                return MatPoly()
            c = c[1:] * np.arange(1, len(c))[:, None, None]
        return MatPoly(c)

    def T(self):
        return MatPoly(np.transpose(self.coeffs, (0, 2, 1)))

    def __call__(self, x):
        """Horner evaluation; x scalar gives (2, 2), array gives (..., 2, 2)."""
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape + (2, 2))
        for C in self.coeffs[::-1]:
            out = out * x[..., None, None] + C
        return out

    def leading(self):
        return self.coeffs[-1] if self.degree >= 0 else np.zeros((2, 2))

    def divide_linear(self, root):
        """Exact quotient by (x - root); the caller checks P(root) = 0."""
        n = len(self.coeffs)
        if n <= 1:
            return MatPoly()
        q = np.zeros((n - 1, 2, 2))
        acc = np.zeros((2, 2))
        for k in range(n - 1, 0, -1):
            acc = self.coeffs[k] + acc * root
            q[k - 1] = acc
        return MatPoly(q)

    def norm(self):
        return float(np.abs(self.coeffs).max()) if self.degree >= 0 else 0.0


def _as_poly(X) -> MatPoly:
    if isinstance(X, MatPoly):
        return X
    X = np.asarray(X, dtype=float)
    if X.shape == (2, 2):
        return MatPoly.constant(X)
    return MatPoly(X)


def matpoly_add(P, Q):
    return _as_poly(P) + _as_poly(Q)


def matpoly_mul(P, Q):
    return _as_poly(P) @ _as_poly(Q)


def matpoly_eval(P, x):
    return _as_poly(P)(x)


@dataclass(frozen=True)
class MatRational:
    """Matrix polynomial over a common scalar denominator polynomial."""

    numerator: MatPoly
    denominator: np.ndarray = field(default_factory=lambda: np.array([1.0]))

    def __post_init__(self):
        d = np.trim_zeros(np.asarray(self.denominator, dtype=float), "b")
        if d.size == 0:
            raise ValueError("denominator is identically zero")
        d.setflags(write=False)
        object.__setattr__(self, "denominator", d)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return self.numerator(x) / npoly.polyval(x, self.denominator)[..., None, None]

    def deriv(self):
        """Quotient rule (N'd - N d') / d^2, no cancellation attempted."""
        d = self.denominator
        num = self.numerator.deriv().scale_poly(d) - self.numerator.scale_poly(npoly.polyder(d))
        return MatRational(num, npoly.polymul(d, d))

    def roots_in(self, lo=-1.0, hi=1.0):
        if len(self.denominator) <= 1:
            return np.array([])
        r = np.roots(self.denominator[::-1])
        r = r[np.abs(r.imag) < 1e-12].real
        return r[(r >= lo) & (r <= hi)]


@dataclass(frozen=True)
class QuadCoeff:
    """Scalar quadratic a2(x) = a22 x^2 + a21 x + a20."""

    a22: float = -1.0
    a21: float = 0.0
    a20: float = 1.0

    @property
    def hypergeometric(self) -> bool:
        return (self.a22, self.a21, self.a20) == (-1.0, 0.0, 1.0)

    @property
    def coeffs(self):
        """Increasing-power coefficients (a20, a21, a22)."""
        return np.array([self.a20, self.a21, self.a22])

    def __call__(self, x):
        return (self.a22 * x + self.a21) * x + self.a20

    def deriv(self, x):
        return 2.0 * self.a22 * x + self.a21


HYPERGEOMETRIC = QuadCoeff(-1.0, 0.0, 1.0)
