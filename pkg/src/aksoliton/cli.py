"""Command-line front end.

Exit codes: 0 success, 2 invalid input, 3 no minimal metric (no positive
solution of the Gram system), 4 criterion inapplicable (basis not nice),
5 verification mismatch or solver failure.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Any, Sequence

import numpy as np

from .algebra_io import AlgebraFileError, AlgebraSpec, bracket_to_json, load_algebra, parse_algebra
from .catalog import get_entry, list_entries, verify_entry
from .curvature import curvature_report, moment_map_gl
from .git_engine import minimal_metric_solve
from .lie_core import act_basis_change, is_unimodular, jacobi_defect, nilpotency_step
from .soliton import certify_soliton
from .symplectic import closedness_defect, darboux_normalize, form_action, is_canonical, j_operator, proj_sp

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NO_SOLUTION = 3
EXIT_NOT_NICE = 4
EXIT_MISMATCH = 5


# --------------------------------------------------------------------------
# output


def _plain(obj: Any) -> Any:
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def _scalar(v: Any) -> str:
    if isinstance(v, bool) or v is None or isinstance(v, (int, str)):
        return json.dumps(v)
    if not math.isfinite(v):
        return "null"
    return format(v + 0.0, ".17g")


def dumps_json(obj: Any, indent: int = 0) -> str:
    """JSON with every real printed at 17 significant digits."""
    obj = _plain(obj)
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {dumps_json(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if all(not isinstance(v, (dict, list)) for v in obj):
            return "[" + ", ".join(_scalar(v) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps_json(v, indent + 1) for v in obj) + "\n" + end + "]"
    return _scalar(obj)


def _text(obj: Any, indent: int = 0) -> list[str]:
    obj = _plain(obj)
    lines = []
    pad = "  " * indent
    for key, value in obj.items():
        if isinstance(value, dict):
            lines.append(f"{pad}{key}:")
            lines.extend(_text(value, indent + 1))
        elif isinstance(value, list) and value and isinstance(value[0], list):
            lines.append(f"{pad}{key}:")
            arr = np.array(value, dtype=float) if all(
                not isinstance(x, (dict, list)) for row in value for x in row
            ) else None
            if arr is not None:
                body = np.array2string(arr, precision=6, suppress_small=True, max_line_width=120)
                lines.extend(pad + "  " + ln for ln in body.splitlines())
            else:
                lines.extend(f"{pad}  {row}" for row in value)
        elif isinstance(value, list) and value and isinstance(value[0], dict):
            lines.append(f"{pad}{key}:")
            for item in value:
                lines.append(pad + "  - " + ", ".join(f"{k}={_fmt(v)}" for k, v in item.items()))
        elif isinstance(value, list):
            lines.append(f"{pad}{key}: [" + ", ".join(_fmt(v) for v in value) + "]")
        else:
            lines.append(f"{pad}{key}: {_fmt(value)}")
    return lines


def _fmt(v: Any) -> str:
    if isinstance(v, float):
        return f"{v:.10g}"
    return str(v)


def _emit(report: dict, fmt: str) -> None:
    if fmt == "json":
        print(dumps_json(report))
    else:
        print("\n".join(_text(report)))


# --------------------------------------------------------------------------
# input


def _params(values: Sequence[str] | None) -> dict[str, float]:
    out = {}
    for item in values or ():
        name, sep, raw = item.partition("=")
        if not sep or not name:
            raise AlgebraFileError(f"--param expects NAME=VALUE, got {item!r}")
        try:
            out[name.strip()] = float(raw)
        except ValueError as exc:
            raise AlgebraFileError(f"--param {name}: {raw!r} is not a number") from exc
    return out


def _load(args: argparse.Namespace) -> AlgebraSpec:
    params = _params(args.param)
    if args.entry:
        if args.path:
            raise AlgebraFileError("give either a file or --entry, not both")
        try:
            entry = get_entry(args.entry)
        except KeyError as exc:
            raise AlgebraFileError(str(exc.args[0])) from exc
        if entry.brackets is None:
            raise AlgebraFileError(f"catalog entry {entry.id} has no bracket data")
        return parse_algebra(entry.to_json(), params)
    if not args.path:
        raise AlgebraFileError("no input: give a file or --entry")
    return load_algebra(args.path, params)


def _validity(spec: AlgebraSpec, tol: float) -> dict:
    mu, omega = spec.mu, spec.omega
    jac = jacobi_defect(mu)
    report: dict[str, Any] = {"dim": mu.dim, "jacobi_defect": jac}
    problems = []
    if jac > tol:
        problems.append("Jacobi identity fails")
    if omega is not None:
        closed = closedness_defect(omega, mu)
        nondeg = omega.is_nondegenerate()
        report["closedness_defect"] = closed
        report["nondegenerate"] = nondeg
        if closed > tol:
            problems.append("form is not closed")
        if not nondeg:
            problems.append("form is degenerate")
    step = nilpotency_step(mu)
    uni, _ = is_unimodular(mu)
    report["nilpotent"] = step is not None
    report["nilpotency_step"] = step
    report["unimodular"] = uni
    report["valid"] = not problems
    report["problems"] = problems
    return report


# --------------------------------------------------------------------------
# commands


def cmd_validate(args: argparse.Namespace) -> int:
    spec = _load(args)
    report = _validity(spec, args.tol)
    _emit(report, args.format)
    return EXIT_OK if report["valid"] else EXIT_INVALID


def _require_valid(spec: AlgebraSpec, args: argparse.Namespace) -> dict | None:
    report = _validity(spec, args.tol)
    if report["valid"]:
        return None
    _emit(report, args.format)
    return report


def cmd_curvature(args: argparse.Namespace) -> int:
    spec = _load(args)
    if _require_valid(spec, args) is not None:
        return EXIT_INVALID
    cr = curvature_report(spec.mu, spec.omega, spec.metric)
    report = {
        "mm_gl": cr.mm_gl,
        "ricci": cr.ric,
        "scalar_curvature": cr.scal,
        "ric_ac": cr.ric_ac,
        "h_hat": cr.h_hat,
        "mean_curvature": cr.h_mean,
        "chern_ricci_operator": cr.chern_op,
        "chern_ricci_form": cr.chern_form.matrix,
        "nilpotency_defect": cr.nilpotency_defect,
    }
    _emit(report, args.format)
    return EXIT_OK


def cmd_minimal(args: argparse.Namespace) -> int:
    spec = _load(args)
    if _require_valid(spec, args) is not None:
        return EXIT_INVALID
    if spec.metric is not None:
        raise AlgebraFileError("minimal: the search starts from the canonical metric; drop the metric field")
    mu, omega = spec.mu, spec.omega
    report: dict[str, Any] = {}
    if not is_canonical(omega):
        g = darboux_normalize(omega)
        mu = act_basis_change(g, mu)
        omega = form_action(g, omega)
        report["basis_change"] = g
        report["normalized_brackets"] = bracket_to_json(mu)
    res = minimal_metric_solve(mu, omega, tol=args.tol, max_iter=args.max_iter,
                               trials=args.trials, seed=args.seed)
    report["status"] = res.status
    report["exists"] = res.exists
    report["nice_defect"] = res.nice_defect
    if res.weights is not None:
        report["weights"] = res.weights.weights
        report["weight_supports"] = [[list(t) for t in s] for s in res.weights.support]
        report["gram"] = res.weights.gram
    if res.x is not None:
        report["gram_solution"] = res.x
        report["beta"] = res.beta
        report["beta_norm_sq"] = res.beta_norm_sq
        report["y"] = res.y
        report["a_diag"] = res.a_diag
        report["residual"] = res.residual
        report["iterations"] = res.iterations
    if res.exists:
        m = proj_sp(moment_map_gl(res.mu_critical), j_operator(omega))
        report["critical_brackets"] = bracket_to_json(res.mu_critical)
        report["decomposition"] = {
            "scalar": -res.beta_norm_sq,
            "derivation_diag": np.diag(m) + res.beta_norm_sq,
        }
    _emit(report, args.format)
    return {
        "minimal": EXIT_OK,
        "no_positive_solution": EXIT_NO_SOLUTION,
        "not_nice": EXIT_NOT_NICE,
    }.get(res.status, EXIT_MISMATCH)


def cmd_certify(args: argparse.Namespace) -> int:
    spec = _load(args)
    if _require_valid(spec, args) is not None:
        return EXIT_INVALID
    cert = certify_soliton(spec.mu, spec.omega, spec.metric, tol=args.tol)
    report: dict[str, Any] = {
        "verdict": cert.verdict,
        "is_soliton": cert.is_soliton,
        "residual": cert.residual,
        "chern_ricci_operator": cert.chern_op,
        "ric_ac": cert.ric_ac,
    }
    if cert.is_soliton:
        report["c_values"] = list(cert.c_values)
        report["derivations"] = list(cert.d_witnesses)
        report["c"] = cert.c
        report["derivation"] = cert.d
    _emit(report, args.format)
    return EXIT_OK


def cmd_catalog_list(args: argparse.Namespace) -> int:
    ids = list_entries(args.tag)
    if args.format == "json":
        print(dumps_json({"entries": ids}))
    else:
        print("\n".join(ids))
    return EXIT_OK


def cmd_catalog_show(args: argparse.Namespace) -> int:
    try:
        entry = get_entry(args.id)
    except KeyError as exc:
        raise AlgebraFileError(str(exc.args[0])) from exc
    print(json.dumps(entry.to_json(), indent=2))
    return EXIT_OK


def cmd_catalog_verify(args: argparse.Namespace) -> int:
    ids = args.entry or list_entries(args.tag)
    for i in ids:
        try:
            get_entry(i)
        except KeyError as exc:
            raise AlgebraFileError(str(exc.args[0])) from exc
    reports = [verify_entry(i, args.tol) for i in ids]
    failed = [r.id for r in reports if not r.passed]
    if args.format == "json":
        doc = {
            "entries": [
                {
                    "id": r.id,
                    "passed": r.passed,
                    "checks": [
                        {"name": c.name, "passed": c.passed, "params": dict(c.params),
                         "observed": _plain(c.observed) if not isinstance(c.observed, str) else c.observed,
                         "expected": _plain(c.expected) if not isinstance(c.expected, str) else c.expected}
                        for c in r.checks
                    ],
                }
                for r in reports
            ],
            "passed": len(reports) - len(failed),
            "failed": failed,
        }
        print(dumps_json(doc))
    else:
        for r in reports:
            print(f"{'PASS' if r.passed else 'FAIL'} {r.id} ({len(r.checks)} checks)")
            for c in r.failures():
                print("    " + c.line())
        print(f"{len(reports) - len(failed)}/{len(reports)} entries passed")
    return EXIT_OK if not failed else EXIT_MISMATCH


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=1e-9, help="numerical tolerance (default 1e-9)")
    common.add_argument("--seed", type=int, default=42, help="seed for nice-basis sampling (default 42)")
    common.add_argument("--trials", type=int, default=5, help="nice-basis samples (default 5)")
    common.add_argument("--max-iter", type=int, default=200, help="Newton iterations (default 200)")
    common.add_argument("--format", choices=("text", "json"), default="text", help="output format")

    source = argparse.ArgumentParser(add_help=False)
    source.add_argument("path", nargs="?", help="algebra JSON file")
    source.add_argument("--entry", help="use a catalog entry instead of a file")
    source.add_argument("--param", action="append", metavar="NAME=VALUE",
                        help="override a parameter (repeatable)")

    parser = argparse.ArgumentParser(
        prog="aksoliton",
        description="Curvature, minimal metrics and soliton certificates for almost Kähler Lie algebras.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, func, text in (
        ("validate", cmd_validate, "check Jacobi identity, closedness and nondegeneracy"),
        ("curvature", cmd_curvature, "moment map, Ricci, anti-complexified Ricci and Chern-Ricci data"),
        ("minimal", cmd_minimal, "decide and solve for a minimal compatible metric"),
        ("certify", cmd_certify, "check the algebraic soliton conditions"),
    ):
        p = sub.add_parser(name, parents=[common, source], help=text, description=text)
        p.set_defaults(func=func)

    cat = sub.add_parser("catalog", help="list, show or verify catalog entries")
    cat_sub = cat.add_subparsers(dest="catalog_command", required=True)
    p = cat_sub.add_parser("list", parents=[common], help="list entry ids")
    p.add_argument("--tag", help="tag or id prefix filter")
    p.set_defaults(func=cmd_catalog_list)
    p = cat_sub.add_parser("show", parents=[common], help="print an entry as an algebra document")
    p.add_argument("id")
    p.set_defaults(func=cmd_catalog_show)
    p = cat_sub.add_parser("verify", parents=[common], help="recompute and compare recorded values")
    p.add_argument("--entry", action="append", help="entry id (repeatable); default all")
    p.add_argument("--tag", help="tag or id prefix filter when no --entry is given")
    p.set_defaults(func=cmd_catalog_verify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (AlgebraFileError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
