from math import comb

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays
from scipy.special import beta as beta_fn

from bochner_forge.algebra import I2, MatPoly, MatRational
from bochner_forge.errors import NonIntegrableWeight, PoleOnSupport
from bochner_forge.quad import (WeightFn, diagonal_weight, identity_weight, inner_product, jacobi_mass,
                                jacobi_rule, moment, normalized_first_moment)

X = MatPoly.monomial(1)


def test_rule_examples():
    r = jacobi_rule(0, 0, 1)
    assert np.allclose(r.nodes, [0.0]) and np.allclose(r.weights, [2.0])
    assert abs(jacobi_rule(0, 0, 17).weights.sum() - 2.0) < 1e-14
    assert abs(jacobi_rule(0.5, 0.5, 30).weights.sum() - np.pi / 2) < 1e-14


def test_rule_rejects_bad_exponents():
    with pytest.raises(NonIntegrableWeight):
        jacobi_rule(-1.0, 0.0, 4)
    with pytest.raises(NonIntegrableWeight):
        jacobi_rule(0.0, -1.5, 4)


def test_mass_closed_form():
    assert abs(jacobi_mass(0.5, 0.5) - np.pi / 2) < 1e-14
    assert abs(jacobi_mass(2.0, 1.0) - 2**4 * beta_fn(3, 2)) < 1e-13


def test_inner_product_examples():
    W = identity_weight()
    assert np.allclose(inner_product(I2, I2, W), 2 * I2, atol=1e-14)
    assert np.allclose(inner_product(X, I2, W), 0, atol=1e-14)
    assert np.allclose(inner_product(X, X, W), 2 / 3 * I2, atol=1e-14)


def test_moment_examples():
    W = identity_weight()
    assert np.allclose(moment(0, W), 2 * I2, atol=1e-14)
    assert np.allclose(moment(1, W), 0, atol=1e-14)
    with pytest.raises(ValueError):
        moment(-1, W)


def test_normalized_first_moment_matches_point(scans, pairs):
    for fam in ("I", "II", "III"):
        for p, pair in zip(scans[fam].accepted[:3], pairs[fam][:3]):
            B0 = normalized_first_moment(pair.W)
            assert np.abs(B0 - p.B0).max() < 1e-6


def test_moment0_positive_definite(pairs):
    for fam in pairs:
        for pair in pairs[fam]:
            np.linalg.cholesky(moment(0, pair.W))


def test_pole_on_support():
    W = WeightFn.single(0, 0, MatRational(MatPoly.constant(I2), np.array([0.5, 1.0])))
    with pytest.raises(PoleOnSupport):
        moment(0, W)


def test_diagonal_weight_blocks():
    W = diagonal_weight([(0.5, 0.5), (1.0, 2.0)])
    M0 = moment(0, W)
    assert np.allclose(M0, np.diag([jacobi_mass(0.5, 0.5), jacobi_mass(1.0, 2.0)]), atol=1e-13)


@settings(max_examples=40, deadline=None)
@given(st.floats(-0.9, 3), st.floats(-0.9, 3), st.integers(1, 12),
       st.lists(st.floats(-2, 2), min_size=24, max_size=24))
def test_quadrature_exactness(a, b, m, c):
    c = np.array(c[: 2 * m])
    r = jacobi_rule(a, b, m)
    got = r.integrate(np.polynomial.polynomial.polyval(r.nodes, c))
    # int x^k (1-x)^a (1+x)^b from the binomial expansion in (1+x)
    exact = 0.0
    for k, ck in enumerate(c):
        tot = 0.0
        for j in range(k + 1):
            tot += (-1) ** (k - j) * comb(k, j) * 2 ** (a + b + j + 1) * beta_fn(a + 1, b + j + 1)
        exact += ck * tot
    assert abs(got - exact) <= 1e-10 * max(1.0, np.abs(c).sum() * 2 ** (a + b + 2 * m + 1))


@settings(max_examples=25, deadline=None)
@given(arrays(np.float64, (3, 2, 2), elements=st.floats(-2, 2)), arrays(np.float64, (4, 2, 2), elements=st.floats(-2, 2)))
def test_inner_product_transpose(p, q):
    W = WeightFn.single(0.5, 1.5, MatPoly(np.array([[[2.0, 0.3], [0.3, 1.0]], [[0.1, 0.2], [0.2, -0.4]]])))
    P, Q = MatPoly(p), MatPoly(q)
    G1 = inner_product(P, Q, W, m=16, check=False)
    G2 = inner_product(Q, P, W, m=16, check=False)
    assert np.abs(G1 - G2.T).max() <= 1e-12 * max(1.0, np.abs(G1).max())
