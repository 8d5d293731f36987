"""Acceptance criteria 1-10, one PASS/FAIL line each.

The lines are printed as they are decided and collected again in the
terminal summary.  Criteria 9 and 10 are known not to hold; their tests
are strict xfails that still report the measured numbers.
"""
import time

import numpy as np
import pytest

from bochner_forge.algebra import I2
from bochner_forge.classify import build_pair, certificate, membership, shift_identity_residuals, translate_deform
from bochner_forge.darboux import product_offdiag
from bochner_forge.errors import BochnerError, PoleInN
from bochner_forge.ops import DiffOp2, QuadCoeff, jacobi_operator, symmetry_defect
from bochner_forge.quad import identity_weight
from bochner_forge.recurrence import (ad_residual_norms, ad_residuals, b_closed_form, build_HK, c_from_b,
                                      case_v_classify, case_v_closed_B, case_v_direct_holds,
                                      case_v_reduced_residual, det_h_vanishes, eigenvalue_lambda,
                                      exceptional_cases, generate_ops, iterate_b, m_from_b, proportionality,
                                      rational_fit_residual, string_equation_residual, symmetry_suite)

from .conftest import ACCEPTANCE, DARBOUX_SECONDS, LEGENDRE_D, SCAN_SECONDS


def report(k, ok, detail):
    line = f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE[k] = line
    print(line)
    return ok


def all_points(scans):
    return [p for f in ("I", "II", "III") for p in scans[f].accepted]


@pytest.fixture(scope="module")
def point_data(scans):
    """(point, pair, OPSeq up to degree 24) for every accepted point."""
    out = []
    for p in all_points(scans):
        pair = build_pair(p)
        out.append((p, pair, generate_ops(pair.W, N=24)))
    return out


def test_criterion_01_legendre():
    t0 = time.perf_counter()
    W = identity_weight()
    ops = generate_ops(W, N=25, m=200)
    n = np.arange(26)
    C = (n**2 / (4.0 * n**2 - 1))[:, None, None] * I2
    errB = np.abs(ops.B).max()
    errC = np.abs(ops.C - C).max()
    z = ad_residual_norms(generate_ops(W, N=25, m=200), LEGENDRE_D, 20)
    zmax = max(z["Z1"], z["Z0"])
    sym = symmetry_defect(LEGENDRE_D, W, m=200)
    dt = time.perf_counter() - t0
    ok = errB < 1e-10 and errC < 1e-10 and zmax < 1e-10 and sym < 1e-10 and dt < 2
    assert report(1, ok, f"|B|={errB:.1e} |C-C*|={errC:.1e} Z1,Z0={zmax:.1e} sym={sym:.1e} t={dt:.2f}s")


def test_criterion_02_family_certificates(scans):
    worst, fails, counts = {}, [], {}
    for fam in ("I", "II", "III"):
        counts[fam] = len(scans[fam].accepted)
        for p in scans[fam].accepted:
            cert = certificate(p, m=200, N_ad=20, dmax=6)
            if not cert.passed():
                fails.append((fam, cert.failures(), cert.error))
            for k, v in cert.values.items():
                worst[k] = max(worst.get(k, 0.0), v)
    slow = max(SCAN_SECONDS.values())
    ok = not fails and min(counts.values()) >= 10 and slow < 60
    detail = " ".join(f"{k}={v:.1e}" for k, v in worst.items() if k != "ad_all")
    assert report(2, ok, f"points={counts} {detail} slowest scan={slow:.1f}s"), fails


def test_criterion_03_closed_form(scans):
    t0 = time.perf_counter()
    worst_cf, worst_fit = 0.0, 0.0
    for p in all_points(scans):
        D = p.operator()
        sys_ = build_HK(D)
        Bs = iterate_b(p.B0, 50, D)
        for n in range(51):
            Bc = b_closed_form(0, p.B0, n, sys_, D.a2.a21)
            worst_cf = max(worst_cf, np.abs(Bc - Bs[n]).max() / max(1.0, np.abs(Bs[n]).max()))
        worst_fit = max(worst_fit, rational_fit_residual(Bs[1:21], np.arange(1, 21), deg=4))
    dt = time.perf_counter() - t0
    ok = worst_cf < 1e-9 and worst_fit < 1e-8 and dt < 5
    assert report(3, ok, f"closed vs iterated={worst_cf:.1e} rational fit={worst_fit:.1e} t={dt:.2f}s")


def test_criterion_04_z2_vanishes():
    rng = np.random.default_rng(4)
    worst = 0.0
    N = 20
    for _ in range(1000):
        B = rng.normal(size=(N + 7, 2, 2))
        C = rng.normal(size=(N + 7, 2, 2))
        C[:3] = 0.0
        L = jacobi_operator(B, C, lo=-3)
        a2 = QuadCoeff(*rng.normal(size=3))
        D = DiffOp2(a2, *rng.normal(size=(3, 2, 2)))
        worst = max(worst, float(np.abs(ad_residuals(L, D, N)["Z2"]).max()))
    assert report(4, worst <= 1e-12, f"max |Z2| over 1000 operators = {worst:.1e}")


def _case_members(rng):
    """Constructed members of cases (i)-(v), with random free parameters."""
    out = []
    for _ in range(40):
        a, b, d = rng.uniform(-2, 2, 3)
        c = rng.uniform(-1, 1)
        s = rng.choice([-1.0, 1.0])
        lam2 = b * b - c * c + d * d
        if lam2 > 0:
            out.append((0.0, 0.0, b, c, d, s * np.sqrt(lam2)))      # (i)
        out.append((0.0, a, b, s * b, d, d))                         # (ii)
        out.append((0.0, a, b, s * b, d, -d))                        # (iii)
        a22 = rng.uniform(-2, 2)
        out.append((a22, a, b, s * b, a22, a22 + 2 * a))             # (iv)
        out.append((a22, a, b, s * b, -a22, -(-a22 + 2 * a)))        # (v)
    return out


def test_criterion_05_exceptional_detector():
    rng = np.random.default_rng(5)
    draws = []
    for _ in range(10_000):
        a22 = rng.choice([-1.0, 0.0, 1.0, rng.uniform(-2, 2)])
        draws.append((a22, *rng.uniform(-3, 3, 5)))
    members = _case_members(rng)
    bad = 0
    tagged = 0
    for args in draws + members:
        tags = exceptional_cases(*args)
        tagged += bool(tags)
        bad += bool(tags) != det_h_vanishes(*args)
    missing = sum(not exceptional_cases(*m) for m in members)
    ok = bad == 0 and missing == 0
    assert report(5, ok, f"draws={len(draws)} members={len(members)} tagged={tagged} "
                         f"disagreements={bad} untagged members={missing}")


def test_criterion_06_m_from_b(point_data):
    worst_angle, worst_sym = 0.0, 0.0
    for p, pair, ops in point_data:
        D = pair.D
        for n in range(21):
            Lam = eigenvalue_lambda(n, D)
            Mt = m_from_b(ops.B[n], Lam)
            beta, angle = proportionality(Mt, ops.M[n])
            worst_angle = max(worst_angle, angle)
            worst_sym = max(worst_sym, symmetry_suite(n, ops.B, ops.C, ops.M, D))
            # the same C(n+1) obtained from commutators
            Lam1 = eigenvalue_lambda(n + 1, D)
            beta1, _ = proportionality(m_from_b(ops.B[n + 1], Lam1), ops.M[n + 1])
            C1 = c_from_b(ops.B[n], ops.B[n + 1], Lam, Lam1, beta1 / beta)
            Cs = ops.C.copy()
            Cs[n + 1] = C1
            worst_sym = max(worst_sym, symmetry_suite(n, ops.B, Cs, ops.M, D))
    ok = worst_angle < 1e-6 and worst_sym < 1e-8
    assert report(6, ok, f"points={len(point_data)} angle={worst_angle:.1e} symmetry suite={worst_sym:.1e}")


def test_criterion_07_string_equation(point_data):
    worst_r, worst_s = 0.0, 0.0
    for p, pair, ops in point_data:
        r, s = string_equation_residual(ops, pair.D, 15)
        worst_r, worst_s = max(worst_r, r), max(worst_s, s)
    ok = worst_r < 1e-7 and worst_s < 1e-9
    assert report(7, ok, f"points={len(point_data)} residual={worst_r:.1e} skew={worst_s:.1e}")


def test_criterion_08_darboux(darboux_search):
    acc = darboux_search.accepted
    off = max(product_offdiag(c.f, c.G) for c in acc)
    inter = max(c.intertwine for c in acc)
    certs = all(c.certificate.passed() for c in acc)
    fam = [c.family for c in acc]
    best = min(membership(c.normalized.point).residuals[c.family].max() for c in acc if c.family in ("I", "II"))
    dt = DARBOUX_SECONDS[0]
    ok = len(acc) >= 5 and off < 1e-12 and inter < 1e-7 and certs and best < 1e-8 and dt < 120
    assert report(8, ok, f"accepted={len(acc)} families={fam} offdiag={off:.1e} intertwine={inter:.1e} "
                         f"I/II membership={best:.1e} reach={darboux_search.reachability()} t={dt:.1f}s")


@pytest.mark.xfail(strict=True, reason="membership is not preserved along the translation deformation")
def test_criterion_09_deformation(scans):
    p = scans["III"].accepted[0]
    worst = 0.0
    errors = []
    for k in (-0.5, -0.25, -0.1, 0.1, 0.25, 0.5):
        try:
            q = translate_deform(p, k)
            worst = max(worst, float(membership(q).residuals["III"].max()))
        except BochnerError as exc:
            errors.append(f"k={k}: {type(exc).__name__}")
    try:
        shift = max(shift_identity_residuals(p, N=10).values())
        shift_txt = f"{shift:.1e}"
    except BochnerError as exc:
        shift = np.inf
        shift_txt = type(exc).__name__
    ok = worst < 1e-7 and not errors and shift < 1e-6
    assert report(9, ok, f"max membership along path={worst:.2e} shift identity at k=1: {shift_txt} "
                         f"{' '.join(errors)}")


def _case_v_draw(rng, kind):
    a = rng.uniform(0.6, 3.0)
    c = rng.uniform(-2, 2)
    B0 = rng.normal(size=(2, 2))
    if kind == "v.a":
        c = 0.0
    elif kind == "v.b":
        a = 1.0
        B0[1, 0] = 0.0
        B0[1, 1] = 0.0  # a (b11 - b22) = b11 + b22 at a = 1
    elif kind == "v.c":
        b21 = rng.normal()
        A = np.array([[1.0, -1.0], [2 * a + 1, 1 - 2 * a]])
        b11, b22 = np.linalg.solve(A, [-2 * c * b21, 0.0])
        B0 = np.array([[b11, B0[0, 1]], [b21, b22]])
    return a, c, B0


@pytest.mark.xfail(strict=True, reason="branch (v.b) leaves B0_11 free but the n = 0 equation forces it to 0")
def test_criterion_10_case_v():
    rng = np.random.default_rng(10)
    worst = 0.0
    for _ in range(50):
        a, c, B0 = _case_v_draw(rng, "none")
        for n in range(21):
            worst = max(worst, case_v_reduced_residual(n, a, c, case_v_closed_B(n, a, c, B0),
                                                       case_v_closed_B(n + 1, a, c, B0)))
    kinds = ["none", "v.a", "v.b", "v.c"]
    wrong = {k: 0 for k in kinds}
    for i in range(1000):
        kind = kinds[i % 4]
        a, c, B0 = _case_v_draw(rng, kind)
        try:
            direct = case_v_direct_holds(a, c, B0)
        except PoleInN:
            direct = False
        cls = case_v_classify(a, c, B0)
        wrong[kind] += (cls is not None) != direct
    total = sum(wrong.values())
    ok = worst < 1e-10 and total == 0
    assert report(10, ok, f"reduced system={worst:.1e} misclassified={total}/1000 by drawn branch {wrong}")
