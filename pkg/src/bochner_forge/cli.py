"""Command-line front end.

Exit codes: 0 when every requested certificate passes, 2 for parse or
configuration errors, 3 when a certificate fails (the report is still
written), 4 on a numerical breakdown.
"""
from __future__ import annotations

import argparse
import csv
import io as _io
import math
import os
import sys
from dataclasses import dataclass, field, replace

import numpy as np

from . import errors
from .classify import (CERT_TOLS, FAMILIES, SCAN_BOXES, build_pair, certificate, membership,
                       pair_certificate, point_family_I, point_family_II, point_family_III,
                       scan_family, translate_deform)
from .darboux import search_factorizations
from .errors import BochnerError, ConfigError, EstimatedError, NotPositiveDefinite, NumericalBreakdown
from .io import (certificate_to_json, dumps, first_order_to_json, loads, pair_from_json, pair_to_json,
                 point_from_json, point_to_json)
from .ops import DiffOp2, a2_of_L, eigenvalue_lambda
from .quad import diagonal_weight
from .recurrence import ad_residuals, generate_ops, jacobi_from_ops

COMMANDS = ("verify-point", "build-family", "scan-family", "deform", "darboux", "recurrence", "adcheck")
EXIT_OK, EXIT_CONFIG, EXIT_CERT, EXIT_BREAKDOWN = 0, 2, 3, 4
DEFAULT_KS = (-0.5, -0.25, -0.1, 0.1, 0.25, 0.5)
_CONSTRUCT = {"I": point_family_I, "II": point_family_II, "III": point_family_III}
_BREAKDOWN = (NumericalBreakdown, EstimatedError, NotPositiveDefinite)


@dataclass
class RunConfig:
    command: str
    input: str | None = None
    m: int = 200
    N: int = 20
    tol: dict = field(default_factory=dict)
    out: str | None = None
    format: str = "json"
    seed: int = 0
    threads: int = 1

    def validate(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.m < 32:
            raise ConfigError("m must be >= 32")
        if self.N < 2:
            raise ConfigError("N must be >= 2")
        if self.format not in ("json", "csv"):
            raise ConfigError("format must be json or csv")
        for k, v in self.tol.items():
            if not v > 0:
                raise ConfigError(f"tolerance {k} must be positive")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")

    @property
    def tols(self):
        return {**CERT_TOLS, **self.tol}


@dataclass
class Report:
    doc: dict
    rows: list | None = None
    code: int = EXIT_OK


# ---------------------------------------------------------------------------
# input

def read_input(source: str | None, required=True) -> dict:
    if source is None:
        if required:
            raise ConfigError("--input is required for this command")
        return {}
    text = source
    if not source.lstrip().startswith("{"):
        if not os.path.exists(source):
            raise ConfigError(f"input file {source!r} does not exist")
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    doc = loads(text)
    if not isinstance(doc, dict):
        raise ConfigError("input must be a JSON object")
    return doc


def _is_breakdown_error(msg: str | None) -> bool:
    if not msg:
        return False
    cls = getattr(errors, msg.split(":", 1)[0], None)
    return isinstance(cls, type) and issubclass(cls, _BREAKDOWN)


def _cert_code(cert, tols):
    if cert.error and _is_breakdown_error(cert.error):
        return EXIT_BREAKDOWN
    return EXIT_OK if cert.passed(tols) else EXIT_CERT


def _point_from_doc(doc):
    if "coords" in doc:
        fam = doc.get("family")
        if fam not in FAMILIES:
            raise ConfigError("coords need a family tag I, II or III")
        try:
            return _CONSTRUCT[fam](*[float(v) for v in doc["coords"]])
        except TypeError as exc:
            raise ConfigError(f"wrong number of coordinates for family {fam}") from exc
    return point_from_json(doc)


def _diagonal_pair(exps):
    """Direct sum of Jacobi pairs (1-x)^p (1+x)^q with their classical operators."""
    exps = [(float(p), float(q)) for p, q in exps]
    al = [-(p + q + 2) for p, q in exps]
    be = [q - p for p, q in exps]
    D = DiffOp2(A11=np.diag(al), A10=np.diag(be), A0=np.zeros((2, 2)))
    return diagonal_weight(exps), D


def _weight_and_operator(doc, m):
    if "diagonal" in doc:
        return _diagonal_pair(doc["diagonal"])
    if "pair" in doc or ("operator" in doc and "weight" in doc):
        pair = pair_from_json(doc)
        return pair.W, pair.D
    p = _point_from_doc(doc)
    if p.family is None:
        p = replace(p, family=membership(p).family)
        if p.family is None:
            raise ConfigError("point belongs to no family")
    pair = build_pair(p, m)
    return pair.W, pair.D


# ---------------------------------------------------------------------------
# commands

def cmd_verify_point(cfg: RunConfig) -> Report:
    doc = read_input(cfg.input)
    if "pair" in doc or ("operator" in doc and "weight" in doc):
        pair = pair_from_json(doc)
        if pair.point is None:
            raise ConfigError("a pair document needs its point for verification")
        p = pair.point
        cert = pair_certificate(pair, p, cfg.m, N_ad=cfg.N)
    else:
        p = _point_from_doc(doc)
        cert = certificate(p, cfg.m, N_ad=cfg.N)
    out = {"command": "verify-point", "point": point_to_json(p), "certificate": certificate_to_json(cert, cfg.tols)}
    rows = [{"key": k, "value": v} for k, v in cert.values.items()]
    return Report(out, rows, _cert_code(cert, cfg.tols))


def cmd_build_family(cfg: RunConfig) -> Report:
    doc = read_input(cfg.input)
    p = _point_from_doc(doc)
    if p.family is None:
        raise ConfigError("build-family needs a family tag")
    pair = build_pair(p, cfg.m)
    out = {"command": "build-family", "pair": pair_to_json(pair)}
    rows = [{"key": k, "value": v} for k, v in point_to_json(p).items() if k != "B0"]
    return Report(out, rows, EXIT_OK)


def _point_row(p, cert, tols, **extra):
    B = p.B0
    row = {**extra, "family": p.family, "a": p.a, "b": p.b, "c": p.c, "d": p.d, "lam": p.lam,
           "B11": B[0, 0], "B12": B[0, 1], "B21": B[1, 0], "B22": B[1, 1]}
    if cert is not None:
        row.update(cert.values)
        row["passed"] = cert.passed(tols)
        row["error"] = cert.error or ""
    return row


def cmd_scan_family(cfg: RunConfig) -> Report:
    doc = read_input(cfg.input)
    fam = doc.get("family")
    if fam not in FAMILIES:
        raise ConfigError("scan-family needs {\"family\": \"I\" | \"II\" | \"III\"}")
    n_accept = int(doc.get("n_accept", 10))
    res = scan_family(fam, n_accept, cfg.seed, int(doc.get("max_tries", 4096)), cfg.m,
                      doc.get("box", SCAN_BOXES[fam]), threads=cfg.threads)
    rows = [_point_row(p, c, cfg.tols) for p, c in zip(res.accepted, res.certificates)]
    out = {"command": "scan-family", "family": fam, "seed": cfg.seed, "tried": res.tried,
           "accepted": len(res.accepted), "rows": rows}
    code = EXIT_OK if len(res.accepted) >= n_accept and all(r["passed"] for r in rows) else EXIT_CERT
    return Report(out, rows, code)


def cmd_deform(cfg: RunConfig) -> Report:
    doc = read_input(cfg.input)
    p = _point_from_doc(doc)
    ks = [float(k) for k in doc.get("ks", DEFAULT_KS)]
    rows, code = [], EXIT_OK
    for k in ks:
        try:
            q = translate_deform(p, k)
        except BochnerError as exc:
            rows.append({"k": k, "error": f"{type(exc).__name__}: {exc}", "passed": False})
            code = max(code, EXIT_CERT)
            continue
        cert = certificate(replace(q, family=p.family), cfg.m, N_ad=cfg.N)
        rows.append(_point_row(q, cert, cfg.tols, k=k))
        code = max(code, EXIT_CERT if not cert.passed(cfg.tols) else EXIT_OK)
    out = {"command": "deform", "start": point_to_json(p), "rows": rows}
    return Report(out, rows, code)


def cmd_darboux(cfg: RunConfig) -> Report:
    doc = read_input(cfg.input, required=False)
    n_accept = int(doc.get("n_accept", 5))
    res = search_factorizations(n_accept, cfg.seed, int(doc.get("max_restarts", 400)), cfg.m,
                                N_int=int(doc.get("N_intertwine", 10)), threads=cfg.threads)
    found, rows = [], []
    for c in res.accepted:
        entry = {
            "restart": c.restart,
            "factorization": first_order_to_json(c.f, c.G),
            "r1": {"alpha": c.r1.alpha, "beta": c.r1.beta, "gamma": c.r1.gamma, "p": c.r1.p, "q": c.r1.q},
            "r2": {"alpha": c.r2.alpha, "beta": c.r2.beta, "gamma": c.r2.gamma, "p": c.r2.p, "q": c.r2.q},
            "pair": pair_to_json(c.result.pair),
            "normalized": pair_to_json(c.normalized.pair),
            "family": c.family,
            "certificate": certificate_to_json(c.certificate, cfg.tols),
            "intertwine": c.intertwine,
            "offdiag": c.offdiag,
        }
        found.append(entry)
        rows.append(_point_row(c.normalized.point, c.certificate, cfg.tols, restart=c.restart,
                               intertwine=c.intertwine, offdiag=c.offdiag))
    out = {"command": "darboux", "seed": cfg.seed, "restarts": res.restarts, "solved": res.solved,
           "reachability": res.reachability(), "found": found}
    ok = len(found) >= n_accept and any(e["family"] in ("I", "II") for e in found)
    return Report(out, rows, EXIT_OK if ok else EXIT_CERT)


def _flat(prefix, X):
    return {f"{prefix}{i + 1}{j + 1}": X[i, j] for i in range(2) for j in range(2)}


def cmd_recurrence(cfg: RunConfig) -> Report:
    doc = read_input(cfg.input)
    W, D = _weight_and_operator(doc, cfg.m)
    ops = generate_ops(W, N=cfg.N, m=cfg.m)
    rows = []
    for n in range(cfg.N + 1):
        row = {"n": n}
        row.update(_flat("B", ops.B[n]))
        row.update(_flat("C", ops.C[n]))
        row.update(_flat("M", ops.M[n]))
        row.update(_flat("L", eigenvalue_lambda(n, D)))
        rows.append(row)
    out = {"command": "recurrence", "N": cfg.N, "rows": rows}
    return Report(out, rows, EXIT_OK)


def cmd_adcheck(cfg: RunConfig) -> Report:
    doc = read_input(cfg.input)
    W, D = _weight_and_operator(doc, cfg.m)
    ops = generate_ops(W, N=cfg.N + 3, m=cfg.m)
    L = jacobi_from_ops(ops)
    Z = ad_residuals(L, D, cfg.N)
    scale = max(2.0 * a2_of_L(L, D.a2).max_norm(0, cfg.N), 1e-300)
    rows = [{"n": n, **{k: float(np.abs(v[n]).max() / scale) for k, v in Z.items()}} for n in range(cfg.N + 1)]
    worst = max(max(r["Z1"], r["Z0"]) for r in rows)
    out = {"command": "adcheck", "N": cfg.N, "max_Z1_Z0": worst, "rows": rows}
    return Report(out, rows, EXIT_OK if worst < cfg.tols["ad"] else EXIT_CERT)


_DISPATCH = {
    "verify-point": cmd_verify_point,
    "build-family": cmd_build_family,
    "scan-family": cmd_scan_family,
    "deform": cmd_deform,
    "darboux": cmd_darboux,
    "recurrence": cmd_recurrence,
    "adcheck": cmd_adcheck,
}


# ---------------------------------------------------------------------------
# output

def _csv_value(v):
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return v


def render(report: Report, fmt: str) -> str:
    if fmt == "json":
        return dumps(report.doc)
    rows = report.rows or []
    buf = _io.StringIO()
    keys = []
    for r in rows:
        keys += [k for k in r if k not in keys]
    w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: _csv_value(v) for k, v in r.items()})
    return buf.getvalue()


def run(cfg: RunConfig):
    """Execute a configuration; returns (exit code, rendered report or None)."""
    try:
        cfg.validate()
        rep = _DISPATCH[cfg.command](cfg)
    except ConfigError as exc:
        return EXIT_CONFIG, dumps({"error": f"ConfigError: {exc}"})
    except _BREAKDOWN as exc:
        return EXIT_BREAKDOWN, dumps({"command": cfg.command, "error": f"{type(exc).__name__}: {exc}"})
    except BochnerError as exc:
        return EXIT_CERT, dumps({"command": cfg.command, "error": f"{type(exc).__name__}: {exc}"})
    return rep.code, render(rep, cfg.format)


def _parse_tol(items):
    out = {}
    for it in items or []:
        if "=" not in it:
            raise ConfigError(f"--tol-cert expects key=value, got {it!r}")
        k, v = it.split("=", 1)
        try:
            out[k.strip()] = float(v)
        except ValueError as exc:
            raise ConfigError(f"bad tolerance value {v!r}") from exc
        if not math.isfinite(out[k.strip()]):
            raise ConfigError("tolerances must be finite")
    return out


def build_parser():
    ap = argparse.ArgumentParser(prog="bochner-forge", description=__doc__.splitlines()[0])
    ap.add_argument("cmd", nargs="?", choices=COMMANDS, help="command (or use --command)")
    ap.add_argument("--command", dest="command", choices=COMMANDS)
    ap.add_argument("--input", help="path to a JSON document or inline JSON")
    ap.add_argument("--m", type=int, default=200, help="quadrature nodes per weight term")
    ap.add_argument("--N", type=int, default=20, help="polynomial count / table length")
    ap.add_argument("--tol-cert", action="append", metavar="KEY=VALUE",
                    help="override a certificate tolerance (repeatable)")
    ap.add_argument("--out", help="write the report here instead of stdout")
    ap.add_argument("--format", default="json", choices=("json", "csv"))
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threads", type=int, default=1)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    command = args.command or args.cmd
    if command is None:
        ap.print_usage(sys.stderr)
        return EXIT_CONFIG
    try:
        threads = int(os.environ.get("BOCHNER_THREADS", args.threads))
        cfg = RunConfig(command, args.input, args.m, args.N, _parse_tol(args.tol_cert), args.out,
                        args.format, args.seed, threads)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    code, text = run(cfg)
    if cfg.out and code != EXIT_CONFIG:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        (sys.stderr if code == EXIT_CONFIG else sys.stdout).write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
