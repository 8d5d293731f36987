"""Gauss-Jacobi quadrature and matrix inner products against a weight.

A :class:`WeightFn` is a finite sum of terms
``(1 - x)**alpha * (1 + x)**beta * R(x)`` with ``R`` a matrix rational
function.  Each term is integrated with its own Gauss-Jacobi rule, so the
boundary behaviour is handled analytically and only the smooth factor is
sampled.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import betaln, roots_jacobi

from .algebra import MatPoly, MatRational, I2
from .errors import EstimatedError, NonIntegrableWeight, PoleOnSupport

DEFAULT_M = 200
DOUBLING_RTOL = 1e-9
# absolute floor for integrals that vanish by symmetry
DOUBLING_ATOL = 1e-14


@dataclass(frozen=True)
class JacobiRule:
    """Nodes and weights for (1 - x)^alpha (1 + x)^beta on (-1, 1)."""

    alpha: float
    beta: float
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def m(self) -> int:
        return len(self.nodes)

    def integrate(self, f):
        """Apply the rule to f sampled at the nodes (first axis)."""
        return np.tensordot(self.weights, f, axes=(0, 0))


@lru_cache(maxsize=256)
def _rule_cached(alpha, beta, m):
    x, w = roots_jacobi(m, alpha, beta)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def jacobi_rule(alpha: float, beta: float, m: int) -> JacobiRule:
    """Gauss-Jacobi rule with m nodes, exact through degree 2m - 1.

    Raises
    ------
    NonIntegrableWeight
        If an exponent is <= -1.
    """
    if alpha <= -1 or beta <= -1:
        raise NonIntegrableWeight(f"exponents ({alpha}, {beta}) must exceed -1")
    if m < 1:
        raise ValueError("m must be positive")
    x, w = _rule_cached(float(alpha), float(beta), int(m))
    return JacobiRule(float(alpha), float(beta), x, w)


def jacobi_mass(alpha, beta):
    """Total mass 2^(a+b+1) B(a+1, b+1)."""
    return float(np.exp((alpha + beta + 1) * np.log(2.0) + betaln(alpha + 1, beta + 1)))


@dataclass(frozen=True)
class WeightTerm:
    alpha: float
    beta: float
    smooth: MatRational

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        p = (1 - x) ** self.alpha * (1 + x) ** self.beta
        return p[..., None, None] * self.smooth(x)


def _as_rational(R):
    if isinstance(R, MatRational):
        return R
    if isinstance(R, MatPoly):
        return MatRational(R)
    return MatRational(MatPoly.constant(R))


@dataclass(frozen=True)
class Discretization:
    """Concatenated nodes, weights and smooth-factor samples of all terms."""

    x: np.ndarray
    w: np.ndarray
    S: np.ndarray

    def integrate(self, F, G):
        """Sum_i w_i F_i S_i G_i^T for stacked F, G of shape (..., K, 2, 2)."""
        FS = np.einsum("...kij,kjl->...kil", F, self.S)
        return np.einsum("k,...kij,...klj->...il", self.w, FS, G)


@dataclass(frozen=True)
class WeightFn:
    """Sum of power-times-rational terms; see module docstring."""

    terms: tuple

    @classmethod
    def single(cls, alpha, beta, smooth):
        return cls((WeightTerm(float(alpha), float(beta), _as_rational(smooth)),))

    @property
    def exponents(self):
        if len(self.terms) != 1:
            raise ValueError("exponent pair is only defined for single-term weights")
        t = self.terms[0]
        return t.alpha, t.beta

    def __call__(self, x):
        return sum(t(x) for t in self.terms)

    def derivatives(self, x):
        """W, W', W'' at points x (all strictly inside (-1, 1))."""
        x = np.asarray(x, dtype=float)
        W0 = np.zeros(x.shape + (2, 2))
        W1 = np.zeros_like(W0)
        W2 = np.zeros_like(W0)
        for t in self.terms:
            R = t.smooth
            R1 = R.deriv()
            R2 = R1.deriv()
            p = ((1 - x) ** t.alpha * (1 + x) ** t.beta)[..., None, None]
            L = (-t.alpha / (1 - x) + t.beta / (1 + x))[..., None, None]
            dL = (-t.alpha / (1 - x) ** 2 - t.beta / (1 + x) ** 2)[..., None, None]
            r0, r1, r2 = R(x), R1(x), R2(x)
            W0 += p * r0
            W1 += p * (r1 + L * r0)
            W2 += p * (r2 + 2 * L * r1 + (dL + L * L) * r0)
        return W0, W1, W2

    def discretize(self, m=DEFAULT_M, rule=None) -> Discretization:
        xs, ws, Ss = [], [], []
        for t in self.terms:
            if rule is not None:
                if len(self.terms) != 1 or (rule.alpha, rule.beta) != (t.alpha, t.beta):
                    raise ValueError("rule exponents do not match the weight")
                r = rule
            else:
                r = jacobi_rule(t.alpha, t.beta, m)
            d = t.smooth.denominator
            if len(d) > 1:
                dv = np.polynomial.polynomial.polyval(r.nodes, d)
                if np.any(np.abs(dv) < 1e-14 * np.abs(d).max()) or len(t.smooth.roots_in(-1, 1)):
                    raise PoleOnSupport("smooth factor has a pole in [-1, 1]")
            xs.append(r.nodes)
            ws.append(r.weights)
            Ss.append(t.smooth(r.nodes))
        return Discretization(np.concatenate(xs), np.concatenate(ws), np.concatenate(Ss))


def identity_weight(alpha=0.0, beta=0.0):
    return WeightFn.single(alpha, beta, MatPoly.constant(I2))


def diagonal_weight(exps):
    """diag((1-x)^p1 (1+x)^q1, (1-x)^p2 (1+x)^q2) from [(p1, q1), (p2, q2)]."""
    terms = []
    for i, (p, q) in enumerate(exps):
        E = np.zeros((2, 2))
        E[i, i] = 1.0
        terms.append(WeightTerm(float(p), float(q), MatRational(MatPoly.constant(E))))
    return WeightFn(tuple(terms))


def _checked(fn, W, m, rule, check):
    if rule is not None:
        m = rule.m
    coarse = fn(W.discretize(m, rule))
    if not check:
        return coarse
    fine = fn(W.discretize(2 * m))
    if np.abs(fine - coarse).max() > DOUBLING_RTOL * np.abs(fine).max() + DOUBLING_ATOL:
        raise EstimatedError("quadrature did not converge under doubling", coarse, fine)
    return coarse


def inner_product(P, Q, W: WeightFn, rule: JacobiRule | None = None, m=DEFAULT_M, check=True):
    """<P, Q>_W = int P W Q^T dx."""
    P, Q = _as_poly(P), _as_poly(Q)
    return _checked(lambda d: d.integrate(P(d.x), Q(d.x)), W, m, rule, check)


def moment(k: int, W: WeightFn, rule: JacobiRule | None = None, m=DEFAULT_M, check=True):
    """int x^k W(x) dx."""
    if k < 0:
        raise ValueError("k must be >= 0")
    return _checked(lambda d: np.einsum("k,kij->ij", d.w * d.x**k, d.S), W, m, rule, check)


def normalized_first_moment(W: WeightFn, m=DEFAULT_M):
    """B(0) = (int x W)(int W)^-1."""
    return moment(1, W, m=m) @ np.linalg.inv(moment(0, W, m=m))


def _as_poly(P):
    if isinstance(P, MatPoly):
        return P
    return MatPoly.constant(P)
