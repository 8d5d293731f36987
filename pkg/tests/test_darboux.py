from dataclasses import replace

import numpy as np
import pytest

from bochner_forge.algebra import HYPERGEOMETRIC, I2, QuadCoeff, adjugate, det2
from bochner_forge.classify import membership, pair_certificate
from bochner_forge.darboux import (FirstOrderOp, compose, darboux_pair, eigen_conjugacy_residual, factor_diagonal,
                                   make_restarts, operator_reducible, product_offdiag, scalar_classical,
                                   verify_intertwine)
from bochner_forge.errors import (DeterminantMismatch, DiagonalityViolated, NonIntegrableWeight,
                                  SingularIntertwiner, SymmetryConditionFailed)
from bochner_forge.ops import symmetry_defect
from bochner_forge.quad import jacobi_rule

X2 = QuadCoeff(1.0, 0.0, 0.0)


def test_factor_diagonal_example():
    A = np.diag([1.0, -1.0])
    Z = np.zeros((2, 2))
    d1, d2 = factor_diagonal(A, Z, Z, Z, -1, X2)
    assert (d1.alpha, d2.alpha) == (2.0, 2.0)
    assert d1.beta == d2.beta == 0.0 and d1.gamma == d2.gamma == 0.0


def test_factor_diagonal_collapse(rng):
    # G = C = 0: alpha = sign 2 det A, beta = sign tr(A adj B), gamma = 0
    A = np.diag([1.0, -1.0])
    B = np.array([[0.0, 1.0], [1.0, 0.0]])
    # det(A x + B) = -x^2 - 1: sign -1 with a2 = x^2 + 1
    a2 = QuadCoeff(1.0, 0.0, 1.0)
    Z = np.zeros((2, 2))
    for d in factor_diagonal(A, B, Z, Z, -1, a2):
        assert d.alpha == -2 * det2(A)
        assert d.beta == -np.trace(A @ adjugate(B))
        assert d.gamma == 0.0


def test_factor_diagonal_errors():
    Z = np.zeros((2, 2))
    with pytest.raises(DeterminantMismatch):
        factor_diagonal(I2, Z, Z, Z, 1, HYPERGEOMETRIC)
    A = np.diag([1.0, -1.0])
    with pytest.raises(DiagonalityViolated) as exc:
        factor_diagonal(A, Z, Z, np.array([[0.0, 1.0], [0.0, 0.0]]), -1, X2)
    assert "AG" in str(exc.value)


def test_scalar_legendre():
    r = scalar_classical(HYPERGEOMETRIC, -2.0, 0.0, 0.0)
    assert r.p == 0.0 and r.q == 0.0
    p = r.monic(3)
    assert np.allclose(p[1], [0.0, 1.0])
    assert np.allclose(p[2], [-1 / 3, 0.0, 1.0], atol=1e-15)
    assert all(r.lam(n) == -n * (n + 1) for n in range(8))
    assert r.operator_residual(12) < 1e-12


def test_scalar_jacobi_first_moment(rng):
    for _ in range(5):
        pe, qe = rng.uniform(-0.5, 3, 2)
        alpha, beta = -pe - qe - 2, qe - pe
        r = scalar_classical(HYPERGEOMETRIC, alpha, beta, 0.3)
        rule = jacobi_rule(pe, qe, 40)
        mean = rule.weights @ rule.nodes / rule.weights.sum()
        assert np.allclose(r.monic(1)[1], [-mean, 1.0], atol=1e-13)
        assert np.isclose(mean, (qe - pe) / (pe + qe + 2))
        # orthogonality of the generated polynomials
        P = np.array([np.polynomial.polynomial.polyval(rule.nodes, c) for c in r.monic(10)])
        G = (P * rule.weights) @ P.T
        off = G - np.diag(np.diag(G))
        assert np.abs(off).max() < 1e-10 * np.sqrt(np.outer(np.diag(G), np.diag(G))).max()
        assert r.operator_residual(10) < 1e-10


def test_scalar_non_integrable():
    with pytest.raises(NonIntegrableWeight):
        scalar_classical(HYPERGEOMETRIC, 1.0, 0.0, 0.0)


def test_compose_expansion(rng):
    S = FirstOrderOp(*rng.normal(size=(3, 2, 2)), 1).S
    T = FirstOrderOp(*rng.normal(size=(3, 2, 2)), 1).S
    C, F = rng.normal(size=(2, 2, 2))
    K2, K1, K0 = compose(S, C, T, F)
    assert (K2 - S @ T).norm() == 0.0
    assert np.allclose(K0.coef(0), C @ F)


def test_restarts_deterministic():
    a = make_restarts(3, 20)
    b = make_restarts(3, 20)
    assert all(np.array_equal(x.v0, y.v0) and x.target == y.target for x, y in zip(a, b))


# pipeline on search-found factorizations

def test_search_candidates_are_exact(darboux_search):
    acc = darboux_search.accepted
    assert len(acc) >= 5
    for c in acc:
        assert c.offdiag < 1e-12
        assert product_offdiag(c.f, c.G) < 1e-12
        c.f.check_det()


def test_darboux_pair_outputs(darboux_search):
    for c in darboux_search.accepted:
        pair = c.result.pair
        x = np.linspace(-0.9, 0.9, 11)
        Wx = pair.W(x)
        assert np.abs(Wx - np.swapaxes(Wx, 1, 2)).max() < 1e-13 * np.abs(Wx).max()
        T = c.f.T(x)
        a2 = 1 - x * x
        want = c.r1.weight(x) * c.r2.weight(x) * np.linalg.det(T) ** 2 / a2**2
        got = np.linalg.det(Wx)
        assert np.allclose(got, want, rtol=1e-9)
        assert symmetry_defect(pair.D, pair.W) < 1e-8
        assert pair_certificate(c.normalized.pair, c.normalized.point).passed()


def test_darboux_reaches_families(darboux_search):
    fams = {c.family for c in darboux_search.accepted}
    assert fams <= {"I", "II", "III"}
    assert fams & {"I", "II"}
    for c in darboux_search.accepted:
        assert membership(c.normalized.point).residuals[c.family].max() < 1e-8


def test_intertwine_and_eigen_conjugacy(darboux_search):
    for c in darboux_search.accepted:
        assert verify_intertwine(c.result.pair, c.f, c.r1, c.r2, N=10) < 1e-7
        assert eigen_conjugacy_residual(c.result.pair.D, c.f, c.r1, c.r2) < 1e-9
        assert not operator_reducible(c.result.pair.D)


def test_intertwine_degree_zero(darboux_search):
    # (A 0 + C) I = diag(p_i(x, 0)) C
    c = darboux_search.accepted[0]
    assert verify_intertwine(c.result.pair, c.f, c.r1, c.r2, N=0) < 1e-12


def test_singular_intertwiner(darboux_search):
    c = darboux_search.accepted[0]
    f = replace(c.f, C=np.zeros((2, 2)))
    with pytest.raises(SingularIntertwiner):
        verify_intertwine(c.result.pair, f, c.r1, c.r2, N=3)


def test_symmetry_negative_control(darboux_search):
    # r2 off the exponent lattice of r1 breaks the symmetry identity
    c = darboux_search.accepted[0]
    r2 = replace(c.r2, p=c.r2.p + 0.37)
    with pytest.raises(SymmetryConditionFailed):
        darboux_pair(c.f, c.G, c.r1, r2)


def test_reachability_counts(darboux_search):
    stats = darboux_search.reachability()
    assert sum(v for k, v in stats.items() if k in ("I", "II", "III")) == len(darboux_search.accepted)
    assert stats["reducible"] + stats["failed"] + len(darboux_search.accepted) == len(darboux_search.candidates)
