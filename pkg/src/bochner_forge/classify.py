"""The three families of irreducible 2x2 hypergeometric Bochner pairs.

A point of the classifying space is a :class:`ClassPoint`
``(a, b, c, d, lam, B0)``.  It fixes the operator through

    A11 = [[lam + d, b + c], [b - c, lam - d]],   A0 = diag(a, -a),
    A10 = B0 A0 - A0 B0 - A11 B0,

and the weight is recovered as ``(1 - x)^alpha (1 + x)^beta P(x)`` with
``P`` a symmetric matrix polynomial, found as the null space of the linear
Pearson and auxiliary equations.  Everything here is checked by residuals;
nothing is assumed.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.stats import qmc

from .algebra import (HYPERGEOMETRIC, I2, MatPoly, MatRational, commutator, linear_map_matrix,
                      unvec, vec)
from .errors import (BochnerError, ComplexScale, DegenerateDenominator, DegenerateEigen,
                     NonDiagonalizableA0, NonIntegrableWeight, NoWeightSolution,
                     NormalizationImpossible, NotPositiveDefinite, NumericalBreakdown)
from .ops import DiffOp2, eigenvalue_lambda, symmetry_defect
from .quad import DEFAULT_M, WeightFn, WeightTerm, jacobi_rule, moment
from .recurrence import (ad_residual_norms, b_closed_form, build_HK, exceptional_cases,
                         generate_ops)

FAMILIES = ("I", "II", "III")
MEMBERSHIP_TOL = 1e-10


@dataclass(frozen=True)
class ClassPoint:
    """Candidate point (a, b, c, d, lam, B0) with an optional family tag."""

    family: str | None
    a: float
    b: float
    c: float
    d: float
    lam: float
    B0: np.ndarray

    def __post_init__(self):
        B0 = np.array(self.B0, dtype=float).reshape(2, 2)
        B0.setflags(write=False)
        object.__setattr__(self, "B0", B0)
        for k in ("a", "b", "c", "d", "lam"):
            object.__setattr__(self, k, float(getattr(self, k)))

    @property
    def A11(self):
        return np.array([[self.lam + self.d, self.b + self.c], [self.b - self.c, self.lam - self.d]])

    @property
    def A0(self):
        return np.diag([self.a, -self.a])

    @property
    def A10(self):
        return a10_from_b0(self.A11, self.A0, self.B0)

    @property
    def gamma(self):
        return 0.5 * float(np.trace(self.A11 @ self.B0))

    def operator(self) -> DiffOp2:
        return DiffOp2(HYPERGEOMETRIC, self.A11, self.A10, self.A0)

    def as_tuple(self):
        B = self.B0
        return (self.a, self.b, self.c, self.d, self.lam, B[0, 0], B[0, 1], B[1, 0], B[1, 1])


def a10_from_b0(A11, A0, B0):
    """A10 = [B0, A0] - A11 B0.

    This is the sign for which B0 is the normalized first moment of the
    weight making the operator symmetric (checked by quadrature).
    """
    A11, A0, B0 = (np.asarray(X, dtype=float) for X in (A11, A0, B0))
    return B0 @ A0 - A0 @ B0 - A11 @ B0


# ---------------------------------------------------------------------------
# family constructors and membership

def point_family_I(a, lam, B22) -> ClassPoint:
    """Family I from its free coordinates (a, lam, B0_22)."""
    if abs(a - 1) < 1e-14 or abs(4 * a * a - lam * lam) < 1e-14:
        raise DegenerateDenominator("a = 1 or 4a^2 = lam^2")
    B11 = (a + 1) * B22 / (a - 1)
    B21 = (B22**2 * lam**2 / (a - 1) ** 2 - 4) / (4 * a * a - lam * lam)
    return ClassPoint("I", a, 0.0, 0.0, 0.0, lam, [[B11, 1.0], [B21, B22]])


def point_family_II(a, lam, B21) -> ClassPoint:
    """Family II from (a, lam, B0_21); b = c = 1, d = -1/2."""
    if abs(2 * lam - 1) < 1e-14 or abs(2 * lam + 1) < 1e-14:
        raise DegenerateDenominator("2 lam = +-1")
    t = 1 - 2 * a * B21
    B11 = (4 * a + 2) * B21 - 1 + 8 * a * t / (2 * lam - 1)
    B22 = (4 * a - 2) * B21 - 1 + (8 * a - 4) * t / (2 * lam + 1)
    B12 = -4 * B21 - 8 * t / (2 * lam + 1)
    return ClassPoint("II", a, 1.0, 1.0, -0.5, lam, [[B11, B12], [B21, B22]])


def point_family_III(b, lam, B21, B12, branch=1) -> ClassPoint:
    """Family III from (b, lam, B0_21, B0_12); ``branch`` picks the sign of d."""
    r2 = 1 - lam * lam * B12 * B21
    if r2 <= 0:
        raise DegenerateDenominator("1 - lam^2 B12 B21 <= 0")
    d = branch * np.sqrt(lam**2 * (B21 + (b - 1) * B12) ** 2 / r2)
    if abs(d) < 1e-12:
        raise DegenerateDenominator("d = 0")
    a = -(lam + 1) * (4 * (b - 1) + d * d) / (2 * d)
    B11 = (((b - 1) * B12 - B21) * lam - 2 * B21) / d
    B22 = (((b - 1) * B12 - B21) * lam + 2 * (b - 1) * B12) / d
    return ClassPoint("III", a, b, 2 - b, d, lam, [[B11, B12], [B21, B22]])


def _rel(lhs, rhs):
    return abs(lhs - rhs) / max(1.0, abs(lhs), abs(rhs))


def family_residuals(p: ClassPoint, family: str) -> np.ndarray:
    """Relative residuals of the defining equations of one family."""
    a, b, c, d, lam = p.a, p.b, p.c, p.d, p.lam
    (B11, B12), (B21, B22) = p.B0
    if family == "I":
        return np.array([
            _rel(b, 0), _rel(c, 0), _rel(d, 0),
            _rel((a - 1) * B11, (a + 1) * B22),
            _rel(B22**2 * lam**2, ((4 * a * a - lam * lam) * B21 + 4) * (a - 1) ** 2),
            abs(B12 - 1.0),  # a normalization, so absolute
        ])
    if family == "II":
        t = 1 - 2 * a * B21
        return np.array([
            _rel(c, 2 - b), _rel(b, 1), _rel(d, -0.5),
            _rel(B11 * (2 * lam - 1), ((4 * a + 2) * B21 - 1) * (2 * lam - 1) + 8 * a * t),
            _rel(B22 * (2 * lam + 1), ((4 * a - 2) * B21 - 1) * (2 * lam + 1) + (8 * a - 4) * t),
            _rel(B12 * (2 * lam + 1), -4 * B21 * (2 * lam + 1) - 8 * t),
        ])
    if family == "III":
        return np.array([
            _rel(c, 2 - b),
            _rel(2 * a * d, -(lam + 1) * (4 * (b - 1) + d * d)),
            _rel(B11 * d, ((b - 1) * B12 - B21) * lam - 2 * B21),
            _rel(B22 * d, ((b - 1) * B12 - B21) * lam + 2 * (b - 1) * B12),
            _rel(d * d * (1 - lam * lam * B12 * B21), lam**2 * (B21 + (b - 1) * B12) ** 2),
        ])
    raise ValueError(f"unknown family {family!r}")


@dataclass
class MembershipReport:
    residuals: dict
    exceptional: frozenset
    reducible: dict
    family: str | None

    @property
    def accepted_family(self):
        return self.family


def membership(p: ClassPoint, tol=MEMBERSHIP_TOL) -> MembershipReport:
    """Residuals against every family, exceptional tags and reducibility flags.

    The point's B0 and its reflection -B0 are both tried; the smaller
    residual vector is reported per family.
    """
    res = {}
    for fam in FAMILIES:
        r1 = family_residuals(p, fam)
        r2 = family_residuals(replace(p, B0=-p.B0), fam)
        res[fam] = r1 if r1.max() <= r2.max() else r2
    tags = exceptional_cases(-1.0, p.a, p.b, p.c, p.d, p.lam)
    offA = abs(p.A11[0, 1]) + abs(p.A11[1, 0])
    offB = abs(p.B0[0, 1]) + abs(p.B0[1, 0])
    red = {
        "diagonal": bool(offA < 1e-12 and offB < 1e-12),
        "B0_commutes_A0": bool(np.abs(commutator(p.B0, p.A0)).max() < 1e-12),
    }
    fam = None
    order = [p.family] + [f for f in FAMILIES if f != p.family] if p.family in FAMILIES else FAMILIES
    for f in order:
        if res[f].max() < tol:
            fam = f
            break
    return MembershipReport(res, tags, red, fam)


# ---------------------------------------------------------------------------
# weight construction

@dataclass(frozen=True)
class BochnerPair:
    """Weight and operator; the weight is (1-x)^alpha (1+x)^beta Q(x)."""

    W: WeightFn
    D: DiffOp2
    gamma: float
    sigma_minus: int = 0
    sigma_plus: int = 0
    r: float = float("nan")
    s: float = float("nan")
    point: ClassPoint | None = None

    @property
    def Q(self) -> MatRational:
        return self.W.terms[0].smooth

    @property
    def exponents(self):
        return self.W.exponents


_SYM = ((0, 0), (0, 1), (1, 1))


def _sym_basis(deg):
    out = []
    for k in range(deg + 1):
        for i, j in _SYM:
            C = np.zeros((deg + 1, 2, 2))
            C[k, i, j] = C[k, j, i] = 1.0
            out.append(MatPoly(C))
    return out


def _weight_equations(P: MatPoly, D: DiffOp2, alpha, beta, n):
    """Pearson and auxiliary equations for (1-x)^alpha (1+x)^beta P, cleared of powers."""
    a2 = D.a2.coeffs
    A1 = D.A1
    cpol = np.array([beta - alpha, -(alpha + beta + 2)])
    gpol = np.array([beta - alpha, -(alpha + beta)])
    M = A1 - MatPoly.constant(I2).scale_poly(cpol)
    pear = 2.0 * P.deriv().scale_poly(a2) - M @ P - P @ M.T()
    K = P @ A1.T() - A1 @ P
    aux = K.scale_poly(gpol) + K.deriv().scale_poly(a2) - 2.0 * (P @ D.A0.T - MatPoly.constant(D.A0) @ P).scale_poly(a2)
    return np.concatenate([pear.padded(n).ravel(), aux.padded(n).ravel()])


def solve_weight_polynomial(D: DiffOp2, alpha, beta, deg, gap=1e-6):
    """Symmetric P of degree <= deg with (1-x)^alpha (1+x)^beta P symmetric for D.

    Returns ``(P, singular_values)``.  Raises NoWeightSolution unless the
    null space is one dimensional.
    """
    basis = _sym_basis(deg)
    A = np.array([_weight_equations(E, D, alpha, beta, deg + 4) for E in basis]).T
    A = A / max(np.abs(A).max(), 1e-300)
    _, sv, vt = np.linalg.svd(A)
    if len(sv) < len(basis):
        sv = np.concatenate([sv, np.zeros(len(basis) - len(sv))])
    if sv[-1] > 1e-10 * sv[0]:
        raise NoWeightSolution(f"no weight of the form (1-x)^{alpha:.4g} (1+x)^{beta:.4g} P, deg P <= {deg}")
    if sv[-2] < gap * sv[0]:
        raise NoWeightSolution("weight solution space has dimension > 1 (reducible?)")
    coeffs = sum(c * E.padded(deg + 1) for c, E in zip(vt[-1], basis))
    return MatPoly(coeffs), sv


# exponent offsets and degree of P per family, relative to half the
# determinant exponents E1 = -lam - 2 + gamma at x = 1, E2 = -lam - 2 - gamma at x = -1
_FAMILY_SHAPE = {"I": (-1.0, -1.0, 2), "II": (-1.0, -0.5, 2), "III": (-0.5, -0.5, 1)}
_SIGMAS = {"I": (0, 0), "II": (0, 1), "III": (1, 1)}


def _strip_root(P: MatPoly, root, tol=1e-9):
    scale = max(P.norm(), 1e-300)
    if P.degree >= 1 and np.abs(P(root)).max() <= tol * scale:
        return P.divide_linear(root), True
    return P, False


def family_scale(p: ClassPoint):
    """(r, s^2) of the family displays; raises on degenerate denominators."""
    a, b, lam = p.a, p.b, p.lam
    (B11, B12), (B21, B22) = p.B0
    if p.family == "I":
        r = lam / (a - 1)
        den = 4 - r * r * B22 * B22
        if abs(den) < 1e-12 or abs((a - 1) * r + 2 * a) < 1e-12:
            raise DegenerateDenominator("4 - r^2 B22^2 = 0")
        return r, (r - 2) * (a - 1) * ((r + 2) * a - (r - 2)) / den
    if p.family == "II":
        r = 4 * a - 2 * lam - 1
        if abs(B21 * r) < 1e-12:
            raise DegenerateDenominator("B21 r = 0")
        return r, 4 * a * (3 - 4 * a + 2 * lam) / (B21 * r)
    if p.family == "III":
        if 1 - lam * lam * B12 * B21 <= 0:
            raise DegenerateDenominator("r^2 = 1 - lam^2 B12 B21 <= 0")
        if abs(p.d) < 1e-12:
            raise DegenerateDenominator("d = 0")
        r = -lam * (B21 + (b - 1) * B12) / p.d
        q = B21 * lam
        return r, (q * q + (b - 1) * (r - 1) ** 2) * (q * q + (b - 1) * (r + 1) ** 2)
    raise ValueError("family tag required")


def build_pair(p: ClassPoint, m: int = DEFAULT_M) -> BochnerPair:
    """Operator and weight for a family point.

    Raises
    ------
    ComplexScale
        The family's s^2 is not positive.
    NonIntegrableWeight
        A boundary exponent is <= -1.
    NotPositiveDefinite
        The weight fails positivity at a quadrature node.
    """
    if p.family not in FAMILIES:
        raise ValueError("build_pair needs a family tag")
    r, s2 = family_scale(p)
    if not s2 > 0:
        raise ComplexScale(f"s^2 = {s2:.6g} <= 0")
    D = p.operator()
    gam = p.gamma
    E1, E2 = -p.lam - 2 + gam, -p.lam - 2 - gam
    oa, ob, deg = _FAMILY_SHAPE[p.family]
    alpha, beta = E1 / 2 + oa, E2 / 2 + ob
    P, _ = solve_weight_polynomial(D, alpha, beta, deg)
    for root, which in ((1.0, 0), (-1.0, 1)):
        while True:
            P, hit = _strip_root(P, root)
            if not hit:
                break
            if which == 0:
                alpha += 1.0
            else:
                beta += 1.0
    if alpha <= -1 or beta <= -1:
        raise NonIntegrableWeight(f"exponents ({alpha:.6g}, {beta:.6g}) must exceed -1")
    if np.trace(P(0.0)) < 0:
        P = -1.0 * P
    P = (1.0 / P.norm()) * P
    rule = jacobi_rule(alpha, beta, m)
    vals = np.linalg.eigvalsh(P(rule.nodes))
    if vals.min() <= 0:
        raise NotPositiveDefinite("weight is not positive definite on (-1, 1)")
    W = WeightFn((WeightTerm(alpha, beta, MatRational(P)),))
    sm, sp = _SIGMAS[p.family]
    return BochnerPair(W, D, gam, sm, sp, r, float(np.sqrt(s2)), p)


# ---------------------------------------------------------------------------
# differential residuals

def _interior_grid(grid):
    return np.cos(np.pi * (np.arange(grid) + 0.5) / grid) * 0.98


def ode_residuals(pair: BochnerPair, grid: int = 41) -> dict:
    """Pearson, auxiliary, second-order and boundary residuals, all relative.

    Interior residuals are pointwise max norms divided by the largest term
    at that point.  The boundary entry combines the limits of a2 W and
    (a2 W)' - A1 W at both ends, computed from the power-times-polynomial
    form of W.
    """
    D, W = pair.D, pair.W
    x = _interior_grid(grid)
    W0, W1, W2 = W.derivatives(x)
    a2 = D.a2(x)[:, None, None]
    a2p = D.a2.deriv(x)[:, None, None]
    a2pp = 2 * D.a2.a22
    A1 = D.A1_at(x)
    A11, A0 = D.A11, D.A0
    T = lambda X: np.swapaxes(X, -1, -2)

    def rel(terms):
        tot = sum(terms)
        sc = np.maximum(np.max([np.abs(t).max(axis=(-1, -2)) for t in terms], axis=0), 1e-300)
        return float((np.abs(tot).max(axis=(-1, -2)) / sc).max())

    Wa2p = a2p * W0 + a2 * W1
    Wa2pp = a2pp * W0 + 2 * a2p * W1 + a2 * W2
    pear = rel([2 * Wa2p, -A1 @ W0, -W0 @ T(A1)])
    aux = rel([W1 @ T(A1), W0 @ A11.T, -A11 @ W0, -A1 @ W1, -2 * W0 @ A0.T, 2 * A0 @ W0])
    second = rel([Wa2pp, -(W1 @ T(A1) + W0 @ A11.T), W0 @ A0.T, -A0 @ W0])
    return {"pearson": pear, "aux": aux, "second_order": second, "boundary": boundary_limits(pair)}


def boundary_limits(pair: BochnerPair) -> float:
    """max over x -> +-1 of |a2 W| and |(a2 W)' - A1 W|, relative to |Q|.

    For W = (1-x)^al (1+x)^be P the second quantity equals
    (1-x)^al (1+x)^be g(x) with g = (be - al - (al + be + 2) x) P + a2 P' - A1 P.
    Its limit at x = 1 is zero when al > 0, or when g(1) = 0 and al > -1,
    and nonzero (or infinite) otherwise; likewise at x = -1.
    """
    D = pair.D
    worst = 0.0
    for t in pair.W.terms:
        P = t.smooth.numerator
        if len(t.smooth.denominator) > 1:
            raise ValueError("boundary limits need a polynomial smooth factor")
        al, be = t.alpha, t.beta
        g = (P.scale_poly([be - al, -(al + be + 2)]) + P.deriv().scale_poly(D.a2.coeffs) - D.A1 @ P)
        sc = max(P.norm(), 1e-300)
        for x0, e in ((1.0, al), (-1.0, be)):
            if e + 1 <= 0:
                return float("inf")
            if e > 0:
                continue
            worst = max(worst, float(np.abs(g(x0)).max() / sc))
    return worst


def det_w_residual(pair: BochnerPair, npts: int = 20) -> float:
    """Spread of det W(x) / ((1-x)^E1 (1+x)^E2) over interior points.

    E1 = -lam - 2 + gamma and E2 = -lam - 2 - gamma with gamma = tr(A11 B0)/2.
    The ratio must be constant since W is only fixed up to a scalar.
    """
    p = pair.point
    g = pair.gamma
    E1, E2 = -p.lam - 2 + g, -p.lam - 2 - g
    x = np.linspace(-0.95, 0.95, npts)
    ld = np.linalg.slogdet(pair.W(x))
    if np.any(ld[0] <= 0):
        return float("inf")
    ratio = ld[1] - E1 * np.log1p(-x) - E2 * np.log1p(x)
    return float(np.expm1(ratio.max() - ratio.min()))


# ---------------------------------------------------------------------------
# the full certificate

CERT_TOLS = {
    "membership": 1e-10,
    "symmetry": 1e-8,
    "pearson": 1e-7,
    "aux": 1e-7,
    "second_order": 1e-7,
    "boundary": 1e-6,
    "det_w": 1e-8,
    "ad": 1e-8,
    "b0_moment": 1e-6,
}


@dataclass
class Certificate:
    values: dict = field(default_factory=dict)
    error: str | None = None

    def failures(self, tols=None):
        tols = {**CERT_TOLS, **(tols or {})}
        if self.error:
            return ["error"]
        return [k for k, v in self.values.items() if k in tols and not v < tols[k]]

    def passed(self, tols=None):
        return not self.failures(tols)


def pair_certificate(pair: BochnerPair, p: ClassPoint, m: int = DEFAULT_M, N_ad: int = 20,
                     dmax: int = 6) -> Certificate:
    """Certificate of a given pair against the point ``p`` describing it.

    ``p`` supplies the membership residuals, lam and gamma for the
    determinant check and the B0 that the quadrature moments must reproduce.
    Errors are recorded, not raised.
    """
    cert = Certificate()
    rep = membership(p)
    fam = p.family if p.family in FAMILIES else rep.family
    cert.values["membership"] = float(rep.residuals[fam].max()) if fam else float("inf")
    if fam is None:
        cert.error = "point belongs to no family"
        return cert
    try:
        cert.values["symmetry"] = symmetry_defect(pair.D, pair.W, dmax=dmax, m=m)
        cert.values.update(ode_residuals(pair))
        cert.values["det_w"] = det_w_residual(pair)
        B0q = moment(1, pair.W, m=m) @ np.linalg.inv(moment(0, pair.W, m=m))
        cert.values["b0_moment"] = float(np.abs(B0q - p.B0).max() / max(1.0, np.abs(p.B0).max()))
        ops = generate_ops(pair.W, N=N_ad + 3, m=m)
        z = ad_residual_norms(ops, pair.D, N_ad)
        cert.values["ad"] = max(z["Z1"], z["Z0"])
        cert.values["ad_all"] = max(z.values())
    except BochnerError as exc:
        cert.error = f"{type(exc).__name__}: {exc}"
    return cert


def certificate(p: ClassPoint, m: int = DEFAULT_M, N_ad: int = 20, dmax: int = 6) -> Certificate:
    """Build the family pair of ``p`` and run every check on it."""
    rep = membership(p)
    fam = p.family if p.family in FAMILIES else rep.family
    if fam is None:
        cert = Certificate({"membership": float("inf")}, "point belongs to no family")
        return cert
    try:
        pair = build_pair(replace(p, family=fam), m)
    except BochnerError as exc:
        res = float(rep.residuals[fam].max())
        return Certificate({"membership": res}, f"{type(exc).__name__}: {exc}")
    return pair_certificate(pair, replace(p, family=fam), m, N_ad, dmax)


# ---------------------------------------------------------------------------
# scanning

# boxes located by a coarse wide scan; outside them almost every point
# fails integrability (lam too large) or positivity
SCAN_BOXES = {
    "I": [(-3.0, 2.5), (-8.0, -2.4), (-1.0, 1.0)],
    "II": [(-3.0, 0.0), (-8.0, -2.0), (0.0, 1.0)],
    "III": [(-3.0, 5.0), (-8.0, -1.0), (-3.0, 3.0), (-3.0, 3.0)],
}
_CONSTRUCT = {"I": point_family_I, "II": point_family_II, "III": point_family_III}


@dataclass
class ScanResult:
    family: str
    accepted: list
    certificates: list
    tried: int


def _scan_one(family, row, m, check):
    try:
        p = _CONSTRUCT[family](*row)
        build_pair(p, m)
    except BochnerError:
        return None
    cert = certificate(p, m) if check else None
    if cert is not None and not cert.passed():
        return None
    return p, cert


def scan_family(family: str, n_accept: int = 10, seed: int = 0, max_tries: int = 4096,
                m: int = DEFAULT_M, box=None, check=True, threads: int = 1) -> ScanResult:
    """Sobol scan over a family's free coordinates.

    A candidate is accepted when build_pair succeeds and, with ``check``,
    the full certificate passes.  Candidates are evaluated in parallel
    batches but accepted in Sobol order, so the result is independent of
    ``threads``.
    """
    box = np.array(box if box is not None else SCAN_BOXES[family], dtype=float)
    sob = qmc.Sobol(len(box), scramble=True, seed=seed)
    acc, certs = [], []
    tried = 0
    step = max(1, 2 * threads)
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        while len(acc) < n_accept and tried < max_tries:
            rows = qmc.scale(sob.random(64), box[:, 0], box[:, 1])
            for i in range(0, len(rows), step):
                chunk = rows[i:i + step]
                outs = list(pool.map(lambda r: _scan_one(family, r, m, check), chunk))
                for out in outs:
                    tried += 1
                    if out is not None:
                        acc.append(out[0])
                        certs.append(out[1])
                    if len(acc) >= n_accept or tried >= max_tries:
                        break
                if len(acc) >= n_accept or tried >= max_tries:
                    break
    return ScanResult(family, acc, certs, tried)


# ---------------------------------------------------------------------------
# translation deformation

def _eig_frame(X):
    """Eigenvectors of a real 2x2 matrix with distinct real eigenvalues, larger first."""
    w, V = np.linalg.eig(X)
    if np.iscomplexobj(w) and np.abs(w.imag).max() > 1e-12:
        raise DegenerateEigen("complex eigenvalues")
    w, V = w.real, V.real
    if abs(w[0] - w[1]) <= 1e-12 * max(1.0, np.abs(w).max()):
        raise DegenerateEigen("repeated eigenvalue")
    order = np.argsort(-w)
    return w[order], V[:, order]


@dataclass(frozen=True)
class Deformation:
    point: ClassPoint
    U: np.ndarray
    Bk: np.ndarray


def translate_deform(p: ClassPoint, k: float, full: bool = False):
    """Translate the recursion index by k (for c = 2 - b points).

    The operator with Lambda'(n) = Lambda(n + k) up to a scalar is brought
    back to normal form by U(k), which diagonalizes A11 k + A0 and scales
    the (1, 2) entry of A11 to 2.  B0 is carried along as U B(k) U^-1 with
    B(k) the closed-form solution of the B update at real argument k.
    """
    if abs(p.c - (2 - p.b)) > 1e-10:
        raise ValueError("translation deformation needs c = 2 - b")
    disc = 4 * k * k * (p.b - 1) + (p.a + k * p.d) ** 2
    if disc <= 0:
        raise DegenerateEigen("4k^2(b-1) + (a+kd)^2 <= 0")
    A11, A0 = p.A11, p.A0
    A11k = A11 - 2 * k * I2
    A0k = A11 * k + A0 - p.lam * k * I2
    w, V = _eig_frame(A0k)
    Vi = np.linalg.inv(V)
    Y = Vi @ A11k @ V
    if abs(Y[0, 1]) < 1e-12 * max(1.0, np.abs(Y).max()):
        raise NormalizationImpossible("(U A11 U^-1)_12 vanishes in every diagonal frame")
    U = np.diag([1.0, Y[0, 1] / 2]) @ Vi
    Ui = np.linalg.inv(U)
    X = U @ A11k @ Ui
    a_new = float(np.sqrt(disc))
    b_new = X[1, 0] / 2 + 1
    d_new = (X[0, 0] - X[1, 1]) / 2
    Bk = b_closed_form(0, p.B0, k, build_HK(p.operator()))
    q = ClassPoint(p.family, a_new, b_new, 2 - b_new, d_new, p.lam - 2 * k, U @ Bk @ Ui)
    return Deformation(q, U, Bk) if full else q


def translate_formulas(p: ClassPoint, k: float):
    """Closed-form images of (a, b, d, lam) under the deformation."""
    s = 4 * k * k * (p.b - 1) + (p.a + k * p.d) ** 2
    return (np.sqrt(s), p.a**2 * (p.b - 1) / s + 1,
            (p.a * p.d + 4 * k * (p.b - 1) + k * p.d**2) / np.sqrt(s), p.lam - 2 * k)


def shift_identity_residuals(p: ClassPoint, N: int = 10, m: int = DEFAULT_M) -> dict:
    """Compare index-shifted data of p with the k = 1 deformed pair.

    Returns relative max residuals for Lambda, B and C over n <= N, where
    B(n+1), C(n+1), Lambda(n+1) of the original pair (conjugated by U(1),
    Lambda with the scalar part removed) are compared with B'(n), C'(n),
    Lambda'(n) of the deformed pair.  C is compared for n >= 1.
    """
    dfm = translate_deform(p, 1.0, full=True)
    U, Ui = dfm.U, np.linalg.inv(dfm.U)
    q = dfm.point
    pa, pb = build_pair(p, m), build_pair(q, m)
    o1 = generate_ops(pa.W, N=N + 2, m=m)
    o2 = generate_ops(pb.W, N=N + 1, m=m)
    D1, D2 = pa.D, pb.D

    def rel(X, Y):
        return float(np.abs(X - Y).max() / max(1.0, np.abs(Y).max()))

    out = {"lambda": 0.0, "B": 0.0, "C": 0.0}
    for n in range(N + 1):
        L1 = U @ eigenvalue_lambda(n + 1, D1) @ Ui - p.lam * I2
        out["lambda"] = max(out["lambda"], rel(L1, eigenvalue_lambda(n, D2)))
        out["B"] = max(out["B"], rel(U @ o1.B[n + 1] @ Ui, o2.B[n]))
        if n >= 1:
            out["C"] = max(out["C"], rel(U @ o1.C[n + 1] @ Ui, o2.C[n]))
    return out


# ---------------------------------------------------------------------------
# normalization

@dataclass(frozen=True)
class NormalForm:
    A11: np.ndarray
    A10: np.ndarray
    A0: np.ndarray
    B0: np.ndarray
    shift: float
    U: np.ndarray
    reflected: bool

    def point(self, family=None) -> ClassPoint:
        a = self.A0[0, 0]
        lam = 0.5 * np.trace(self.A11)
        d = 0.5 * (self.A11[0, 0] - self.A11[1, 1])
        b = 0.5 * (self.A11[0, 1] + self.A11[1, 0])
        c = 0.5 * (self.A11[0, 1] - self.A11[1, 0])
        return ClassPoint(family, a, b, c, d, lam, self.B0)


def normalize_pair(A11, A10, A0, B0, tol=1e-12) -> NormalForm:
    """Bring (A11, A10, A0, B0) to normal form by translation and conjugation.

    Steps: remove the trace of A0; diagonalize A0 as diag(a, -a) (a >= 0
    unless A0 is already diagonal, whose order is kept); scale by a diagonal matrix so (A11)_12 = 2.  If (A11)_12 = 0 but
    (A11)_21 != 0 the two basis vectors are swapped first (a changes sign).
    If A11 is diagonal, the scale is chosen so that (B0)_12 = 1 instead.
    The returned U satisfies X_new = U X U^-1 for every coefficient.
    """
    A11, A10, A0, B0 = (np.array(X, dtype=float) for X in (A11, A10, A0, B0))
    shift = -0.5 * np.trace(A0)
    A0t = A0 + shift * I2
    scale = max(np.abs(A0t).max(), np.abs(A11).max(), 1.0)
    if np.abs(A0t).max() <= tol * scale or (abs(A0t[0, 1]) <= tol * scale and abs(A0t[1, 0]) <= tol * scale):
        # already diagonal: keep the given order so canonical input is fixed
        V = np.eye(2)
    else:
        disc = A0t[0, 0] ** 2 + A0t[0, 1] * A0t[1, 0]
        if disc <= tol * scale**2:
            raise NonDiagonalizableA0("A0 has complex or repeated eigenvalues")
        _, V = _eig_frame(A0t)
    U = np.linalg.inv(V)

    def conj(X, U):
        return U @ X @ np.linalg.inv(U)

    X = conj(A11, U)
    if abs(X[0, 1]) <= tol * scale and abs(X[1, 0]) > tol * scale:
        P = np.array([[0.0, 1.0], [1.0, 0.0]])
        U = P @ U
        X = conj(A11, U)
    if abs(X[0, 1]) > tol * scale:
        t = X[0, 1] / 2
    else:
        Bc = conj(B0, U)
        t = Bc[0, 1] if abs(Bc[0, 1]) > tol * max(1.0, np.abs(Bc).max()) else 1.0
    U = np.diag([1.0, t]) @ U
    out = [conj(Y, U) for Y in (A11, A10, A0t, B0)]
    # clean the exact zeros of the diagonal A0
    out[2][0, 1] = out[2][1, 0] = 0.0
    return NormalForm(out[0], out[1], out[2], out[3], shift, U, False)


def reflect(A11, A10, A0, B0):
    """x -> -x: A11 and A0 are preserved, A10 and B0 change sign."""
    return A11, -np.asarray(A10), A0, -np.asarray(B0)


def b0_from_a10(A11, A0, A10):
    """Invert A10 = [B0, A0] - A11 B0 for B0; raises NormalizationImpossible if singular."""
    A11, A0, A10 = (np.asarray(X, dtype=float) for X in (A11, A0, A10))
    L = linear_map_matrix(lambda B: a10_from_b0(A11, A0, B))
    if np.linalg.cond(L) > 1e12:
        raise NormalizationImpossible("B0 is not determined by A10 (singular map)")
    return unvec(np.linalg.solve(L, vec(A10)))


def conjugate_weight(W: WeightFn, U) -> WeightFn:
    """U W U^T, term by term (the smooth factors must be polynomial)."""
    U = np.asarray(U, dtype=float)
    Up = MatPoly.constant(U)
    terms = []
    for t in W.terms:
        P = t.smooth.numerator
        if len(t.smooth.denominator) > 1:
            raise ValueError("conjugation needs polynomial smooth factors")
        terms.append(WeightTerm(t.alpha, t.beta, MatRational(Up @ P @ Up.T())))
    return WeightFn(tuple(terms))


@dataclass(frozen=True)
class NormalizedPair:
    """A pair moved to normal form, with the point that describes it."""

    pair: BochnerPair
    point: ClassPoint
    form: NormalForm
    membership: MembershipReport


def normalize_bochner_pair(W: WeightFn, D: DiffOp2, m: int = DEFAULT_M) -> NormalizedPair:
    """Translate and conjugate (W, D) into normal form and identify its family.

    Both orderings of the eigenbasis of A0 are tried; the one with the
    smaller best family residual wins.  B0 is recovered from A10, not from
    moments, so the certificate's moment check stays independent.
    """
    best = None
    swap = np.array([[0.0, 1.0], [1.0, 0.0]])
    for P in (I2, swap):
        Dp = D.conjugate(P)
        try:
            B0 = b0_from_a10(Dp.A11, Dp.A0, Dp.A10)
            nf = normalize_pair(Dp.A11, Dp.A10, Dp.A0, B0)
        except BochnerError:
            continue
        pt = nf.point()
        rep = membership(pt)
        score = min(r.max() for r in rep.residuals.values())
        if best is None or score < best[0]:
            best = (score, P, nf, pt, rep)
    if best is None:
        raise NormalizationImpossible("no frame brings the operator to normal form")
    _, P, nf, pt, rep = best
    U = nf.U @ P
    Dn = D.conjugate(U).shifted(nf.shift)
    Wn = conjugate_weight(W, U)
    # a match through -B0 is the reflected pair x -> -x; membership covers it
    pt = replace(pt, family=rep.family)
    pair = BochnerPair(Wn, Dn, pt.gamma, point=pt)
    return NormalizedPair(pair, pt, nf, rep)


# ---------------------------------------------------------------------------
# case (iv) exclusion

@dataclass
class CaseIVReport:
    defect: float
    diagonal: bool
    exponents: tuple


def case_iv_dual_ode_check(a, c, B0, grid: int = 41) -> CaseIVReport:
    """Incompatibility of the two first-order equations for y = (1-x^2) W12.

    In case (iv) (a22 = -1, d = -1, lam = 2a - 1, b = c) the (2, 2) Pearson
    equation fixes w = W22 = (1-x)^(a B22 - a - 1) (1+x)^(-a B22 - a - 1).
    The (1, 2) Pearson equation gives y' = f y + g w and the (1, 2)
    auxiliary equation gives y = (g~ - g) w / (f - f~) algebraically;
    substituting the latter into the former leaves a defect that must
    vanish for a weight to exist.  The defect is the max over a grid of the
    relative residual.  When c = 0 and (a = 1/2 or B0_12 = 0) the operator
    decouples and the report is flagged diagonal.
    """
    B0 = np.asarray(B0, dtype=float)
    d, lam, b = -1.0, 2 * a - 1, c
    p = ClassPoint(None, a, b, c, d, lam, B0)
    A11, A10 = p.A11, p.A10
    B22 = B0[1, 1]
    e1, e2 = a * B22 - a - 1, -a * B22 - a - 1
    A10c = A10.astype(complex)

    def parts(x):
        a2 = 1 - x * x
        a2p = -2 * x
        A1 = A11 * x + A10c
        w = (1 - x) ** e1 * (1 + x) ** e2
        f = (A1[0, 0] + A1[1, 1]) / (2 * a2)
        g = 0.5 * A1[0, 1] * w
        delta = A1[1, 1] - A1[0, 0]
        ddelta = A11[1, 1] - A11[0, 0]
        dq = (ddelta * a2 - delta * a2p) / a2**2
        ft = (a2 / delta) * (-4 * a / a2 - dq)
        gt = (a2 / delta) * (A11[0, 1] + A1[0, 1] * (A1[1, 1] - a2p) / a2) * w
        return f, g, ft, gt

    def ystar(x):
        f, g, ft, gt = parts(x)
        return (gt - g) / (f - ft)

    diagonal = abs(c) < 1e-12 and (abs(a - 0.5) < 1e-12 or abs(B0[0, 1]) < 1e-12)
    x = _interior_grid(grid)
    h = 1e-20
    worst = 0.0
    for xv in x:
        y = ystar(complex(xv))
        dy = ystar(complex(xv, h)).imag / h
        f, g, _, _ = parts(complex(xv))
        terms = [dy, (f * y).real, g.real]
        sc = max(max(abs(t) for t in terms), 1e-300)
        worst = max(worst, abs(dy - (f * y).real - g.real) / sc)
    if not np.isfinite(worst):
        worst = float("inf")
    return CaseIVReport(float(worst), bool(diagonal), (e1, e2))
