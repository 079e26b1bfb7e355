"""Command-line front-end.

Exit codes: 0 success, 1 a check or decomposition failed, 2 usage or input error.
Exact results print as rational strings ("p/q"); float results carry a "tol".
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from caliber import catalog
from caliber.exterior import (
    GENERATOR_INDICES, FormatError, KForm, dumps_form, form_from_dict, is_self_dual,
    scalar_from_json, scalar_to_json, to_span,
)
from caliber.liealg import stabilizer_basis, stabilizer_dim
from caliber.optimize import (
    DEFAULT_SEED, FORM_CLASSES, SolverConfig, calibrated_frame, comass_numeric, normal_form,
    random_form,
)
from caliber.triality import VERTEX_LABELS, comass_exact, decompose_convex, decompose_up_to_conjugacy
from caliber.verify import VerifyConfig, verify_all

NUMERIC_TOL = 1e-6
SPAN_ORDER = ["".join(map(str, idx)) for idx in GENERATOR_INDICES]


class InputError(Exception):
    """Bad input file; reported with exit code 2."""


def _scalar(x):
    return scalar_to_json(x)


def _matrix(m) -> list:
    return [[_scalar(x) for x in row] for row in np.asarray(m).tolist()]


def _emit(out, payload, as_json: bool, plain: str) -> None:
    if as_json:
        out.write(json.dumps(payload, indent=2) + "\n")
    else:
        out.write(plain + "\n")


def read_input(path: str):
    """A form file, or a span file ``{"span": [7 coefficients]}``; returns a KForm."""
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    try:
        if isinstance(data, dict) and "span" in data:
            span = data["span"]
            if not isinstance(span, list) or len(span) != 7:
                raise FormatError("span: expected a list of 7 coefficients")
            return catalog.as_form([scalar_from_json(x, f"span[{i}]") for i, x in enumerate(span)])
        return form_from_dict(data)
    except FormatError as exc:
        raise InputError(f"{path}: {exc}") from exc


def _span_payload(coeffs) -> dict:
    return {"order": SPAN_ORDER, "coeffs": [_scalar(c) for c in coeffs]}


def _solver(args) -> SolverConfig:
    return SolverConfig(restarts=args.restarts, seed=args.seed)


# -- subcommands ----------------------------------------------------------------

def cmd_comass(args, out) -> int:
    omega = read_input(args.input)
    if omega.degree != 4:
        raise InputError("comass needs a 4-form")
    coeffs, residual = to_span(omega)
    exact_ok = not residual and omega.is_exact()
    method = args.method
    if method == "exact" and not exact_ok:
        raise InputError("exact method needs an exact form in the span of the seven generators")

    payload: dict = {}
    if method == "auto":
        if exact_ok:
            method = "exact"
        elif is_self_dual(omega, tol=1e-10):
            nf = normal_form(omega, _solver(args))
            if nf.success:
                value = float(comass_exact([float(c) for c in nf.coeffs]))
                payload = {
                    "value": value, "method": "normal_form+exact", "tol": NUMERIC_TOL,
                    "rotation": nf.rotation.tolist(), "residual": nf.residual_norm,
                    "span": _span_payload(nf.coeffs),
                }
                _emit(out, payload, args.json, repr(value))
                return 0
            method = "numeric"
        else:
            method = "numeric"

    if method == "exact":
        value = comass_exact(coeffs)
        payload = {"value": _scalar(value), "method": "exact", "residual": "0",
                   "span": _span_payload(coeffs)}
        _emit(out, payload, args.json, _scalar(value))
        return 0

    res = comass_numeric(omega, _solver(args))
    payload = {
        "value": res.value, "method": "numeric", "tol": NUMERIC_TOL, "converged": res.converged,
        "restarts": len(res.per_restart), "best_restart": res.best_restart,
        "frame": res.frame.tolist(),
    }
    if res.converged:
        rep = calibrated_frame(omega, res)
        payload["frame_value"] = rep.value
        payload["frame_consistent"] = rep.consistent
    _emit(out, payload, args.json, repr(res.value))
    return 0 if res.converged else 1


def cmd_verify(args, out) -> int:
    cfg = VerifyConfig.quick(args.seed) if args.quick else VerifyConfig(
        seed=args.seed, solver=SolverConfig(seed=args.seed))
    report = verify_all(cfg)
    if args.json:
        out.write(json.dumps(report.to_dict(timing=args.timing), indent=2, default=str) + "\n")
    else:
        for c in report.checks:
            out.write(c.line() + "\n")
        s = report.summary(timing=True)
        out.write(f"{s['passed']}/{s['total']} checks passed in {s['wall_time_s']} s\n")
    return 0 if report.passed else 1


def cmd_catalog(args, out) -> int:
    if args.format == "md":
        out.write(catalog.markdown_table() + "\n")
    elif args.format == "json":
        out.write(json.dumps(catalog.catalog_table(), indent=2) + "\n")
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["type", "name", *SPAN_ORDER, "comass", "norm2", "ratio", "stab_dim"])
        for row in catalog.catalog_table():
            w.writerow([f"({row['type'][0]},{row['type'][1]})", row["name"], *row["coeffs"],
                        row["comass"], row["norm2"], row["ratio"], row["stab_dim"]])
        out.write(buf.getvalue())
    return 0


def cmd_decompose(args, out) -> int:
    omega = read_input(args.input)
    coeffs, residual = to_span(omega) if omega.degree == 4 else (None, omega)
    if residual or not omega.is_exact():
        raise InputError("decompose needs an exact form in the span of the seven generators")
    conj = None
    if args.conjugate:
        found = decompose_up_to_conjugacy(coeffs)
        weights, conj = found if found else (None, None)
    else:
        weights = decompose_convex(coeffs)
    if weights is None:
        _emit(out, {"weights": None}, args.json, "NONE")
        return 1
    payload = {"weights": {label: _scalar(w) for label, w in zip(VERTEX_LABELS, weights)}}
    if conj is not None:
        payload["conjugate"] = _span_payload(conj)
    plain = "\n".join(f"{label} {_scalar(w)}" for label, w in zip(VERTEX_LABELS, weights) if w)
    _emit(out, payload, args.json, plain)
    return 0


def cmd_stabilizer(args, out) -> int:
    omega = read_input(args.input)
    if not omega.is_exact():
        raise InputError("stabilizer needs exact coefficients")
    dim = stabilizer_dim(omega)
    basis = stabilizer_basis(omega)
    payload = {"dimension": dim, "basis": [_matrix(X) for X in basis]}
    plain = f"dimension {dim}"
    if args.basis:
        plain += "\n" + "\n".join(json.dumps(_matrix(X)) for X in basis)
    _emit(out, payload, args.json, plain)
    return 0


def cmd_normal_form(args, out) -> int:
    omega = read_input(args.input)
    if omega.degree != 4 or not is_self_dual(omega, tol=1e-10):
        raise InputError("normal-form needs a self-dual 4-form")
    nf = normal_form(omega, _solver(args))
    payload = {
        "success": nf.success, "residual": nf.residual_norm, "tol": NUMERIC_TOL,
        "attempts": nf.attempts, "rotation": nf.rotation.tolist(), "span": _span_payload(nf.coeffs),
    }
    plain = " ".join(_scalar(c) if not isinstance(c, float) else repr(c) for c in nf.coeffs)
    _emit(out, payload, args.json, plain)
    return 0 if nf.success else 1


def cmd_random(args, out) -> int:
    out.write(dumps_form(random_form(args.seed, args.form_class)) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="caliber", description="Comass and calibrations of self-dual 4-forms in R^8.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_seed(p, restarts: int | None = None):
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)
        if restarts is not None:
            p.add_argument("--restarts", type=int, default=restarts)

    p = sub.add_parser("comass", help="comass of a 4-form")
    p.add_argument("--input", required=True)
    p.add_argument("--method", choices=("exact", "numeric", "auto"), default="auto")
    p.add_argument("--json", action="store_true")
    add_seed(p, SolverConfig().restarts)
    p.set_defaults(func=cmd_comass)

    p = sub.add_parser("verify", help="replay every acceptance check")
    p.add_argument("--json", action="store_true")
    p.add_argument("--quick", action="store_true", help="smaller samples, same tolerances")
    p.add_argument("--timing", action="store_true", help="include wall time in JSON output")
    add_seed(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("catalog", help="the nine orbit-type calibrations")
    p.add_argument("--format", choices=("md", "json", "csv"), default="md")
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("decompose", help="convex decomposition over the vertex forms")
    p.add_argument("--input", required=True)
    p.add_argument("--conjugate", action="store_true", help="decompose a diagonal conjugate instead")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("stabilizer", help="dimension and kernel basis of the stabilizer")
    p.add_argument("--input", required=True)
    p.add_argument("--basis", action="store_true", help="also print the basis in plain mode")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_stabilizer)

    p = sub.add_parser("normal-form", help="rotate a self-dual form into the generator span")
    p.add_argument("--input", required=True)
    p.add_argument("--json", action="store_true")
    add_seed(p, 20)
    p.set_defaults(func=cmd_normal_form)

    p = sub.add_parser("random", help="reproducible random exact 4-form")
    p.add_argument("--class", dest="form_class", choices=FORM_CLASSES, default="self_dual")
    add_seed(p)
    p.set_defaults(func=cmd_random)
    return parser


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    if getattr(args, "restarts", 1) < 1:
        err.write("error: --restarts must be positive\n")
        return 2
    try:
        return args.func(args, out)
    except InputError as exc:
        err.write(f"error: {exc}\n")
        return 2


def main() -> None:
    sys.exit(run())
