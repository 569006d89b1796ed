"""Command-line front end: ``latgen construct | bound | check``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import checks
from .bounds import BoundInputs, bound_report
from .cbc import ENGINES, ConstructionResult, EmptyCandidateSetError, ExclusionPolicy, construct
from .diagnostics import cost_audit, projection_report
from .korobov import LatticeParams
from .reduction import parse_schedule
from .serialize import csv_table, dumps

EXIT_INVALID = 1
EXIT_EMPTY = 2
EXIT_CHECK_FAILED = 3


class ConfigError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        _fail("invalid-config", message, EXIT_INVALID)


def _fail(kind, message, code):
    sys.stderr.write(json.dumps({"error": kind, "message": str(message)}) + "\n")
    raise SystemExit(code)


def parse_weights(spec: str, s: int) -> tuple[float, ...]:
    """``const:c`` | ``poly:a`` (gamma_j = j**-a) | ``list:v1,v2,...``."""
    kind, _, arg = spec.partition(":")
    kind = kind.strip().lower()
    if kind == "const":
        return (float(arg),) * s
    if kind == "poly":
        a = float(arg)
        return tuple(float(j) ** (-a) for j in range(1, s + 1))
    if kind == "list":
        values = tuple(float(v) for v in arg.split(",") if v.strip())
        if len(values) < s:
            raise ConfigError(f"weight list has {len(values)} entries, need {s}")
        return values[:s]
    raise ConfigError(f"unknown weight spec {spec!r}")


def _lattice_args(p, required=True):
    p.add_argument("--b", type=int, required=required, help="prime base")
    p.add_argument("--m", type=int, required=required, help="exponent, N = b^m")
    p.add_argument("--s", type=int, required=required, help="dimension")
    p.add_argument("--alpha", type=float, default=2.0, help="smoothness (> 1)")
    p.add_argument("--gamma", default="const:1", help="const:c | poly:a | list:v1,v2,...")
    p.add_argument("--schedule", default="const:0", help="list:0,0,1 | const:c | linear:c | log")


def _output_args(p):
    p.add_argument("--output", "-o", help="write to this file instead of stdout")
    p.add_argument("--format", choices=("json", "csv"), default="json")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="latgen", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("construct", help="construct a generating vector")
    _lattice_args(c)
    c.add_argument("--policy", default="no-repeat", help="none | no-repeat | anti-diagonal | custom:2=3,5;3=7")
    c.add_argument("--strict-exclusion", action="store_true", help="fail instead of releasing a candidate")
    c.add_argument("--engine", choices=ENGINES, default="fast")
    c.add_argument("--check-invariants", action="store_true", help="verify the product vector after every step")
    _output_args(c)

    bd = sub.add_parser("bound", help="evaluate the worst-case error bounds")
    _lattice_args(bd, required=False)
    bd.add_argument("--result", help="construction JSON to bound (overrides lattice flags)")
    bd.add_argument("--exclusion-sizes", help="list:0,1,1,... synthetic |E_j| sizes")
    bd.add_argument("--d", type=int, help="prefix length (default s)")
    bd.add_argument("--lambda", dest="lam", type=float, help="fix lambda instead of optimising")
    bd.add_argument("--lambda-grid", type=int, default=64, help="coarse grid size for the lambda search")
    bd.add_argument("--curve", action="store_true", help="include the bound for every d")
    _output_args(bd)

    ck = sub.add_parser("check", help="run the oracle cross-check suite")
    ck.add_argument("--checks", default=",".join(checks.CHECKS), help="comma list of " + ", ".join(checks.CHECKS))
    ck.add_argument("--d-max", type=int, default=12)
    ck.add_argument("--oracle-H", type=int, default=512)
    ck.add_argument("--lambda-grid", type=int, default=16)
    ck.add_argument("--result", help="verify the invariants of a construction JSON file instead")
    _output_args(ck)
    return parser


def _params(args) -> tuple[LatticeParams, object]:
    for name in ("b", "m", "s"):
        if getattr(args, name) is None:
            raise ConfigError(f"--{name} is required")
    gamma = parse_weights(args.gamma, args.s)
    params = LatticeParams(args.b, args.m, args.s, args.alpha, gamma)
    schedule = parse_schedule(args.schedule, args.s, args.b)
    return params, schedule


def _emit(args, text):
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def construction_document(result: ConstructionResult) -> dict:
    doc = result.to_dict()
    doc["diagnostics"] = projection_report(result).to_dict()
    doc["work"] = cost_audit(result).to_dict()
    return doc


def cmd_construct(args) -> int:
    params, schedule = _params(args)
    policy = ExclusionPolicy.parse(args.policy, strict=args.strict_exclusion)
    result = construct(params, schedule, policy, args.engine, check_invariants=args.check_invariants)
    if args.format == "csv":
        rows = [
            (j + 1, result.schedule.w[j], result.z_unscaled[j], result.z_scaled[j], result.exclusion_sizes[j], result.step_errors[j])
            for j in range(params.s)
        ]
        _emit(args, csv_table(("d", "w", "z_unscaled", "z_scaled", "exclusion_size", "step_error"), rows))
    else:
        _emit(args, dumps(construction_document(result)))
    return 0


def cmd_bound(args) -> int:
    step_errors = None
    if args.result:
        result = ConstructionResult.from_dict(json.loads(Path(args.result).read_text()))
        params, schedule, sizes = result.params, result.schedule, result.exclusion_sizes
        step_errors = result.step_errors
    else:
        params, schedule = _params(args)
        if args.exclusion_sizes:
            kind, _, arg = args.exclusion_sizes.partition(":")
            if kind != "list":
                raise ConfigError("--exclusion-sizes must be list:e1,e2,...")
            sizes = [int(v) for v in arg.split(",") if v.strip()]
        else:
            sizes = [0] * params.s
        if len(sizes) < params.s:
            raise ConfigError(f"need {params.s} exclusion sizes, got {len(sizes)}")
    d = args.d or params.s
    # validates the |E_j| < |Z_j| precondition up front
    BoundInputs(params, schedule, tuple(sizes), d, 1.0)
    report = bound_report(params, schedule, sizes, d, args.lam, args.lambda_grid, args.curve, step_errors)
    if args.format == "csv":
        rows = report.per_d or [
            {"d": d, "thm1": report.thm1_value, "lambda1": report.lambda_star_1, "thm2": report.thm2_value, "lambda2": report.lambda_star_2}
        ]
        header = list(rows[0].keys())
        _emit(args, csv_table(header, [[r[k] for k in header] for r in rows]))
    else:
        doc = {"b": params.b, "m": params.m, "N": params.N, "s": params.s, "alpha": params.alpha}
        doc.update(report.to_dict())
        doc["lambda_fixed"] = args.lam is not None
        _emit(args, dumps(doc))
    return 0


def cmd_check(args) -> int:
    if args.result:
        result = ConstructionResult.from_dict(json.loads(Path(args.result).read_text()))
        outcomes = checks.verify_result(result)
    else:
        wanted = [c.strip() for c in args.checks.split(",") if c.strip()]
        unknown = set(wanted) - set(checks.CHECKS)
        if unknown:
            raise ConfigError(f"unknown checks {sorted(unknown)}")
        outcomes = []
        results = None
        if "dual" in wanted:
            outcomes += checks.check_dual(args.oracle_H)
        if "engines" in wanted or "dominance" in wanted:
            found, results = checks.check_engines(checks.desk_configs())
            if "engines" in wanted:
                outcomes += found
        if "bounds" in wanted:
            outcomes += checks.check_bounds(args.d_max)
        if "dominance" in wanted:
            outcomes += checks.check_dominance(results)
    if args.format == "json":
        _emit(args, dumps({"checks": [{"name": o.name, "passed": o.passed, "detail": o.detail} for o in outcomes]}))
    else:
        _emit(args, csv_table(("name", "passed", "detail"), [(o.name, o.passed, json.dumps(o.detail)) for o in outcomes]))
    for o in outcomes:
        sys.stderr.write(o.line() + "\n")
    return 0 if all(o.passed for o in outcomes) else EXIT_CHECK_FAILED


COMMANDS = {"construct": cmd_construct, "bound": cmd_bound, "check": cmd_check}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except EmptyCandidateSetError as exc:
        _fail("empty-candidate-set", exc, EXIT_EMPTY)
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        _fail("invalid-config", exc, EXIT_INVALID)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
