import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from bochner_forge.algebra import HYPERGEOMETRIC, I2, MatPoly, QuadCoeff
from bochner_forge.errors import TruncationError
from bochner_forge.ops import (DiffOp2, ShiftBandOp, a2_of_L, ad_x_identities, apply_right, eigenvalue_lambda,
                               identity_band, jacobi_operator, shift_band, shift_commutator, shift_compose,
                               symmetry_defect)
from bochner_forge.quad import identity_weight
from bochner_forge.recurrence import generate_ops, normalized_op

from .conftest import LEGENDRE_D

mat = arrays(np.float64, (2, 2), elements=st.floats(-3, 3))


def random_op(rng, a2=HYPERGEOMETRIC):
    return DiffOp2(a2, *rng.normal(size=(3, 2, 2)))


def test_apply_right_constant(rng):
    D = random_op(rng)
    assert np.array_equal(apply_right(MatPoly.constant(I2), D).coef(0), D.A0)


def test_apply_right_legendre_degree_one():
    out = apply_right(MatPoly.monomial(1), LEGENDRE_D)
    assert np.allclose(out.coef(1), -2 * I2) and np.allclose(out.coef(0), 0)


def test_apply_right_on_family_ops(pairs):
    for fam in ("I", "II", "III"):
        pair = pairs[fam][0]
        ops = generate_ops(pair.W, N=8)
        for n, P in enumerate(ops.polys):
            lhs = apply_right(P, pair.D)
            rhs = MatPoly(np.einsum("ij,kjl->kil", eigenvalue_lambda(n, pair.D), P.coeffs))
            assert (lhs - rhs).norm() < 1e-8 * max(1.0, P.norm())


def test_eigenvalue_lambda_examples(rng):
    D = random_op(rng)
    assert np.array_equal(eigenvalue_lambda(0, D), D.A0)
    for n in range(6):
        assert np.allclose(eigenvalue_lambda(n, LEGENDRE_D), -n * (n + 1) * I2)
    D = normalized_op(-1.0, 0.4, 1.3, 0.7, -0.2, 0.9)
    lead = apply_right(MatPoly.monomial(1), D).coef(1)
    assert np.allclose(eigenvalue_lambda(1, D), lead)
    assert np.allclose(eigenvalue_lambda(1, D), -I2 + D.A11 + I2 + D.A0)


@settings(max_examples=50, deadline=None)
@given(mat, mat, mat, st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2), st.integers(0, 8))
def test_leading_coefficient_is_lambda(A11, A10, A0, a22, a21, a20, n):
    D = DiffOp2(QuadCoeff(a22, a21, a20), A11, A10, A0)
    out = apply_right(MatPoly.monomial(n), D)
    assert np.allclose(out.padded(n + 1)[n], eigenvalue_lambda(n, D), rtol=1e-14, atol=1e-12)
    assert out.degree <= n


def test_symmetry_defect_examples(pairs):
    W = identity_weight()
    assert symmetry_defect(DiffOp2(QuadCoeff(0, 0, 0), A0=I2), W) == 0.0
    assert symmetry_defect(LEGENDRE_D, W) < 1e-10
    for pair in pairs["I"][:3]:
        assert symmetry_defect(pair.D, pair.W) < 1e-8


def test_symmetry_defect_detects_wrong_operator(pairs):
    pair = pairs["I"][0]
    bad = DiffOp2(pair.D.a2, pair.D.A11, pair.D.A10 + 0.1 * I2, pair.D.A0)
    assert symmetry_defect(bad, pair.W) > 1e-4


def test_ad_x_identities(rng):
    for a2 in (HYPERGEOMETRIC, QuadCoeff(0.7, -0.3, 2.0)):
        r3, r2 = ad_x_identities(random_op(rng, a2), dmax=6)
        assert r3 < 1e-12 and r2 < 1e-12


# shift operators

def test_shifts_commute_on_Z():
    S, Sstar = shift_band(1, -10, 10), shift_band(-1, -10, 10)
    Z = shift_commutator(S, Sstar)
    assert Z.max_norm() == 0.0


def test_a2_of_bare_shift():
    L = shift_band(1, -10, 10)
    out = a2_of_L(L, HYPERGEOMETRIC)
    assert np.allclose(out.band(2, out.lo, out.hi), -I2)
    assert np.allclose(out.band(0, out.lo, out.hi), I2)
    assert out.bandwidth <= 2


def test_legendre_square_band():
    n = np.arange(0, 30)
    C = (n**2 / (4.0 * n**2 - 1))[:, None, None] * I2
    L = jacobi_operator(np.zeros_like(C), C)
    L2 = shift_compose(L, L)
    k = np.arange(L2.lo, L2.hi + 1)
    want = (C[k + 1] + C[k])
    assert np.allclose(L2.band(0, L2.lo, L2.hi), want, atol=1e-15)


def test_truncation_error():
    L = shift_band(3, 0, 2)
    with pytest.raises(TruncationError):
        shift_compose(L, L)
    with pytest.raises(TruncationError):
        L.band(0, -1, 2)


def rand_band(rng, ks, lo=-5, hi=25):
    return ShiftBandOp({k: rng.normal(size=(hi - lo + 1, 2, 2)) for k in ks}, lo)


def test_bandwidth_additivity_and_bilinearity(rng):
    for _ in range(20):
        A = rand_band(rng, (-1, 0, 2))
        A2 = rand_band(rng, (-1, 0, 2))
        B = rand_band(rng, (-2, 1))
        AB = shift_compose(A, B)
        assert AB.bandwidth <= A.bandwidth + B.bandwidth
        s = rng.normal()
        lhs = shift_compose(A + s * A2, B)
        rhs = AB + s * shift_compose(A2, B)
        assert (lhs - rhs).max_norm() < 1e-12


def test_compose_shifts_argument(rng):
    C = rng.normal(size=(21, 2, 2))
    D = rng.normal(size=(21, 2, 2))
    out = shift_compose(ShiftBandOp({1: C}, 0), ShiftBandOp({2: D}, 0))
    for n in range(out.lo, out.hi + 1):
        assert np.allclose(out.coef(3, n), C[n] @ D[n + 1])
