"""JSON documents for points, pairs, certificates and factorizations.

Every document carries ``"schema": "bochner-forge/1"``.  Matrices are
row-major nested lists and floats are written with 17 significant digits
so a document read back reproduces the same doubles.  Non-finite floats
are written as the strings "nan", "inf" and "-inf".
"""
from __future__ import annotations

import json
import math

import numpy as np

from .algebra import MatPoly, MatRational, QuadCoeff
from .classify import BochnerPair, Certificate, ClassPoint
from .darboux import FirstOrderOp
from .errors import ConfigError
from .ops import DiffOp2
from .quad import WeightFn, WeightTerm

SCHEMA = "bochner-forge/1"


# ---------------------------------------------------------------------------
# text

def _emit(obj, out):
    if obj is None or isinstance(obj, (bool, np.bool_)):
        out.append(json.dumps(None if obj is None else bool(obj)))
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        x = float(obj)
        out.append(format(x, ".17g") if math.isfinite(x) else json.dumps(str(x)))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, np.ndarray):
        _emit(obj.tolist(), out)
    elif isinstance(obj, dict):
        out.append("{")
        for i, (k, v) in enumerate(obj.items()):
            if i:
                out.append(", ")
            out.append(json.dumps(str(k)) + ": ")
            _emit(v, out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, v in enumerate(obj):
            if i:
                out.append(", ")
            _emit(v, out)
        out.append("]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(doc) -> str:
    """Serialize with 17 significant digits; the schema tag is added to dicts."""
    if isinstance(doc, dict) and "schema" not in doc:
        doc = {"schema": SCHEMA, **doc}
    out = []
    _emit(doc, out)
    return "".join(out) + "\n"


def _num(x):
    if isinstance(x, str):
        return float(x)
    return x


def loads(text: str):
    """Parse a document; raises ConfigError on bad JSON or a foreign schema."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}") from exc
    if isinstance(doc, dict) and doc.get("schema", SCHEMA) != SCHEMA:
        raise ConfigError(f"unsupported schema {doc.get('schema')!r}")
    return doc


def _mat(x, name="matrix"):
    try:
        X = np.array(x, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name} is not numeric") from exc
    if X.size != 4:
        raise ConfigError(f"{name} must have 4 entries")
    return X.reshape(2, 2)


# ---------------------------------------------------------------------------
# points

def point_to_json(p: ClassPoint) -> dict:
    return {"family": p.family, "a": p.a, "b": p.b, "c": p.c, "d": p.d, "lam": p.lam, "B0": p.B0}


def point_from_json(doc: dict) -> ClassPoint:
    if "point" in doc:
        doc = doc["point"]
    try:
        vals = {k: float(_num(doc[k])) for k in ("a", "b", "c", "d", "lam")}
    except KeyError as exc:
        raise ConfigError(f"point is missing {exc}") from exc
    fam = doc.get("family")
    if fam not in (None, "I", "II", "III"):
        raise ConfigError(f"unknown family {fam!r}")
    return ClassPoint(fam, B0=_mat(doc.get("B0"), "B0"), **vals)


# ---------------------------------------------------------------------------
# operators and weights

def operator_to_json(D: DiffOp2) -> dict:
    a2 = D.a2
    return {"a2": [a2.a22, a2.a21, a2.a20], "A11": D.A11, "A10": D.A10, "A0": D.A0}


def operator_from_json(doc: dict) -> DiffOp2:
    a22, a21, a20 = (float(_num(v)) for v in doc.get("a2", [-1.0, 0.0, 1.0]))
    return DiffOp2(QuadCoeff(a22, a21, a20), _mat(doc["A11"], "A11"), _mat(doc["A10"], "A10"),
                   _mat(doc["A0"], "A0"))


def weight_to_json(W: WeightFn) -> dict:
    terms = []
    for t in W.terms:
        if len(t.smooth.denominator) > 1:
            raise ValueError("only polynomial smooth factors are serialized")
        terms.append({"alpha": t.alpha, "beta": t.beta, "P": t.smooth.numerator.coeffs})
    return {"terms": terms}


def weight_from_json(doc: dict) -> WeightFn:
    terms = []
    for t in doc["terms"]:
        P = MatPoly(np.array(t["P"], dtype=float).reshape(-1, 2, 2))
        terms.append(WeightTerm(float(_num(t["alpha"])), float(_num(t["beta"])), MatRational(P)))
    return WeightFn(tuple(terms))


def pair_to_json(pair: BochnerPair) -> dict:
    doc = {"operator": operator_to_json(pair.D), "weight": weight_to_json(pair.W), "gamma": pair.gamma,
           "sigma": [pair.sigma_minus, pair.sigma_plus], "r": pair.r, "s": pair.s}
    if pair.point is not None:
        doc["point"] = point_to_json(pair.point)
    return doc


def pair_from_json(doc: dict) -> BochnerPair:
    if "pair" in doc:
        doc = doc["pair"]
    try:
        D = operator_from_json(doc["operator"])
        W = weight_from_json(doc["weight"])
    except KeyError as exc:
        raise ConfigError(f"pair is missing {exc}") from exc
    p = point_from_json(doc["point"]) if "point" in doc else None
    sm, sp = doc.get("sigma", [0, 0])
    return BochnerPair(W, D, float(_num(doc.get("gamma", "nan"))), int(sm), int(sp),
                       float(_num(doc.get("r", "nan"))), float(_num(doc.get("s", "nan"))), p)


# ---------------------------------------------------------------------------
# results

def certificate_to_json(cert: Certificate, tols=None) -> dict:
    return {"values": dict(cert.values), "error": cert.error, "passed": cert.passed(tols),
            "failures": cert.failures(tols)}


def first_order_to_json(f: FirstOrderOp, G=None) -> dict:
    doc = {"S1": f.S1, "S0": f.S0, "C": f.C, "sign": f.sign}
    if G is not None:
        doc["G"] = np.asarray(G)
    return doc


def first_order_from_json(doc: dict):
    """(FirstOrderOp, G) from a factorization document."""
    f = FirstOrderOp(_mat(doc["S1"], "S1"), _mat(doc["S0"], "S0"), _mat(doc["C"], "C"), int(doc.get("sign", 1)))
    G = _mat(doc["G"], "G") if "G" in doc else np.zeros((2, 2))
    return f, G
