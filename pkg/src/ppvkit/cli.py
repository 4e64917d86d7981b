"""Command-line interface.

Subcommands wire the parser, the operator ring, the rank-1 group solvers,
the integrability search, the 2x2 classifier and the numeric monodromy
scanner together, with a stable JSON output mode for downstream tooling
(--format json, or the PPVKIT_FORMAT environment variable).

Exit codes: 0 on success, 1 on domain errors (bad input data, unsupported
denominators, singular evaluations, ...), 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from .classify2x2 import TrichotomyVerdict, classify_2x2, interpret_verdict
from .fieldcore import FieldContext, FieldError, Rat, x_coefficients
from .groups import gm_contains, gm_del_subgroup_table, zariski_closure
from .monodromy import (
    EvalError,
    LoopSpec,
    PathTooCloseError,
    cross_check,
    monodromy_scan,
)
from .ore import OreOperator, OreError, annihilator_of_span, gcrd, lclm, right_divide
from .parser import ParseError, SystemFormatError, parse_expr, parse_system
from .rank1 import additive_group, classical_pv_group, multiplicative_group
from .systems import (
    AnsatzBounds,
    IntegrabilityReport,
    Matrix,
    ParamLinearSystem,
    check_integrability,
    isomonodromy_verdict,
    solve_complete_integrability,
)

DOMAIN_ERRORS = (
    FieldError,
    OreError,
    ParseError,
    SystemFormatError,
    PathTooCloseError,
    EvalError,
    ZeroDivisionError,
    ValueError,
    OSError,
)


# -- serialization helpers -------------------------------------------------------


def _matrix_strs(M: Matrix) -> list[list[str]]:
    return [[str(e) for e in row] for row in M]


def _report_dict(report: IntegrabilityReport) -> dict:
    return {
        "verdict": report.verdict,
        "witnesses": {h: _matrix_strs(B) for h, B in report.witnesses.items()},
        "violations": [
            {"pair": [i, j], "residual": _matrix_strs(R)}
            for i, j, R in report.violations
        ],
        "notes": report.notes,
    }


def _group_dict(group) -> dict:
    out = {"rendered": str(group)}
    if hasattr(group, "kind"):  # multiplicative
        out["family"] = "Gm"
        out["kind"] = group.kind
        if group.n is not None:
            out["n"] = group.n
        if group.operator is not None:
            out["operator"] = str(group.operator)
        out["upper_bound_only"] = group.upper_bound_only
    else:
        out["family"] = "Ga"
        out["kind"] = "full" if group.is_full else "kernel"
        if group.operator is not None:
            out["operator"] = str(group.operator)
    return out


def _verdict_dict(v: TrichotomyVerdict) -> dict:
    out = {"verdict": v.kind, "interpretation": interpret_verdict(v)}
    if v.witnesses:
        out["witnesses"] = {h: _matrix_strs(B) for h, B in v.witnesses.items()}
    if v.eigenvector is not None:
        out["eigenvector"] = [str(c) for c in v.eigenvector]
        out["exponent"] = str(v.exponent)
    if v.reasons:
        out["reasons"] = list(v.reasons)
    return out


# -- argument parsing helpers -------------------------------------------------------


def _parse_loop(spec: str) -> LoopSpec:
    fields = {}
    for piece in spec.split(","):
        if not piece:
            continue
        if "=" not in piece:
            raise ValueError(f"bad loop component {piece!r}; expected key=value")
        key, _, value = piece.partition("=")
        fields[key.strip()] = value.strip()
    unknown = set(fields) - {"center", "radius", "segments", "orientation"}
    if unknown:
        raise ValueError(f"unknown loop keys {sorted(unknown)}")
    return LoopSpec(
        center=complex(fields.get("center", "0")),
        radius=float(fields.get("radius", "1")),
        segments=int(fields.get("segments", "16")),
        orientation=int(fields.get("orientation", "1")),
    )


def _parse_grid_axis(spec: str) -> tuple[str, list[Fraction]]:
    if "=" not in spec:
        raise ValueError(f"bad grid {spec!r}; expected name=start:stop:count")
    name, _, rng = spec.partition("=")
    parts = rng.split(":")
    if len(parts) == 1:
        return name.strip(), [Fraction(parts[0])]
    if len(parts) != 3:
        raise ValueError(f"bad grid range {rng!r}; expected start:stop:count")
    start, stop, count = Fraction(parts[0]), Fraction(parts[1]), int(parts[2])
    if count < 1:
        raise ValueError("grid count must be at least 1")
    if count == 1:
        return name.strip(), [start]
    step = (stop - start) / (count - 1)
    return name.strip(), [start + k * step for k in range(count)]


def _build_grid(specs: list[str]) -> list[dict[str, Fraction]]:
    axes = [_parse_grid_axis(s) for s in specs]
    grid: list[dict[str, Fraction]] = [{}]
    for name, values in axes:
        grid = [dict(g, **{name: v}) for g in grid for v in values]
    return grid


def _load_system(path: str):
    text = Path(path).read_text(encoding="utf-8")
    spec = parse_system(text)
    ctx, matrices = spec.parse_matrices()
    return spec, ctx, matrices


def _bounds(args) -> AnsatzBounds:
    return AnsatzBounds(
        pole_headroom=args.pole_headroom,
        poly_degree=args.poly_degree,
    )


def _parse_operator(src: str, ctx: FieldContext, deriv: str) -> OreOperator:
    """Operator syntax: a polynomial in D with parameter coefficients."""
    value = parse_expr(src, ctx)
    coeffs = x_coefficients(value)  # ctx's main variable is D
    top = max(coeffs) if coeffs else 0
    dense = [coeffs.get(i, ctx.zero) for i in range(top + 1)]
    return OreOperator.from_coeffs(ctx, deriv, dense)


# -- subcommand handlers -------------------------------------------------------------


def _cmd_ore(args) -> dict:
    ctx = FieldContext(args.params, var="D")
    deriv = args.deriv or args.params[0]
    if deriv not in ctx.params:
        raise FieldError(f"derivation {deriv!r} is not a declared parameter")
    op = args.operation
    if op == "annihilator":
        gens = [parse_expr(s, ctx) for s in args.operands]
        for g in gens:
            if not g.is_param_only():
                raise OreError("annihilator generators must not involve D")
        L = annihilator_of_span(ctx, deriv, gens)
        return {
            "operation": op,
            "result": str(L),
            "order": L.order,
            "degenerate": L.order == 0,
        }
    ops = [_parse_operator(s, ctx, deriv) for s in args.operands]
    if len(ops) != 2:
        raise FieldError(f"ore {op} needs exactly two operands")
    L, M = ops
    if op == "mul":
        return {"operation": op, "result": str(L * M)}
    if op == "div":
        Q, R = right_divide(L, M)
        return {"operation": op, "quotient": str(Q), "remainder": str(R)}
    if op == "gcrd":
        return {"operation": op, "result": str(gcrd(L, M))}
    if op == "lclm":
        return {"operation": op, "result": str(lclm(L, M))}
    raise FieldError(f"unknown ore operation {op!r}")


def _cmd_group(args) -> dict:
    ctx = FieldContext(args.params, var=args.var)
    a = parse_expr(args.expr, ctx)
    answer = additive_group(a) if args.case == "add" else multiplicative_group(a)
    out = {
        "case": args.case,
        "input": str(a),
        "group": _group_dict(answer.group),
        "trace": {
            "integrated_part": str(answer.integrated_part),
            "residues": [[str(c), str(b)] for c, b in answer.residues],
            "exponential_part_present": answer.exponential_part_present,
        },
        "caveats": list(answer.caveats),
    }
    if args.closure:
        out["closure"] = str(classical_pv_group(answer))
    return out


def _cmd_check_integrable(args) -> dict:
    spec, ctx, matrices = _load_system(args.system)
    system = ParamLinearSystem(ctx, spec.n, matrices)
    return _report_dict(check_integrability(system))


def _cmd_solve_integrable(args) -> dict:
    spec, ctx, matrices = _load_system(args.system)
    A = matrices.get(spec.var)
    if A is None:
        raise SystemFormatError(f'system lacks the main-variable matrix "{spec.var}"')
    report = solve_complete_integrability(ctx, A, list(spec.params), _bounds(args))
    return _report_dict(report)


def _cmd_isomonodromy(args) -> dict:
    spec, ctx, matrices = _load_system(args.system)
    A = matrices.get(spec.var)
    if A is None:
        raise SystemFormatError(f'system lacks the main-variable matrix "{spec.var}"')
    report = isomonodromy_verdict(ctx, A, list(spec.params), _bounds(args))
    return _report_dict(report)


def _cmd_classify(args) -> dict:
    spec, ctx, matrices = _load_system(args.system)
    A = matrices.get(spec.var)
    if A is None:
        raise SystemFormatError(f'system lacks the main-variable matrix "{spec.var}"')
    verdict = classify_2x2(ctx, A, _bounds(args), degree_cap=args.degree_cap)
    return _verdict_dict(verdict)


def _cmd_monodromy(args) -> dict:
    spec, ctx, matrices = _load_system(args.system)
    A = matrices.get(spec.var)
    if A is None:
        raise SystemFormatError(f'system lacks the main-variable matrix "{spec.var}"')
    loop = _parse_loop(args.loop)
    grid = _build_grid(args.grid)
    report = monodromy_scan(ctx, A, loop, grid, tol=args.tol, eps=args.eps)
    return {
        "verdict": report.verdict,
        "spread": report.spread,
        "eps": report.eps,
        "tol": report.tol,
        "points": [
            {
                "assignment": {k: str(v) for k, v in p.assignment.items()},
                "invariants": [
                    [z.real, z.imag] for z in (p.invariants or ())
                ]
                if p.invariants is not None
                else None,
                "error": p.error,
            }
            for p in report.points
        ],
    }


def _cmd_cross_check(args) -> dict:
    spec, ctx, matrices = _load_system(args.system)
    A = matrices.get(spec.var)
    if A is None:
        raise SystemFormatError(f'system lacks the main-variable matrix "{spec.var}"')
    loop = _parse_loop(args.loop)
    grid = _build_grid(args.grid)
    report = cross_check(
        ctx,
        A,
        list(spec.params),
        loop,
        grid,
        bounds=_bounds(args),
        tol=args.tol,
        eps=args.eps,
    )
    return {
        "symbolic": report.symbolic_verdict,
        "numeric": report.numeric_verdict,
        "agreement": report.agreement,
        "spread": report.spread,
        "notes": report.notes,
    }


def _cmd_table(args) -> dict:
    ctx = FieldContext(["t"])
    rows = gm_del_subgroup_table(ctx, "t", n=args.n)
    chain_ok = True
    for n in range(1, 7):
        rows_n = gm_del_subgroup_table(ctx, "t", n=n)
        groups = [g for g, _ in rows_n]
        chain_ok = chain_ok and gm_contains(groups[1], groups[0]) and gm_contains(
            groups[2], groups[1]
        )
    return {
        "rows": [
            {"group": _group_dict(g), "fixed_field": label} for g, label in rows
        ],
        "containment_chain_verified": chain_ok,
    }


# -- human rendering -------------------------------------------------------------


def _human_lines(name: str, data: dict) -> list[str]:
    lines: list[str] = []

    def walk(prefix: str, value):
        if isinstance(value, dict):
            for k, v in value.items():
                walk(f"{prefix}{k}.", v) if isinstance(v, (dict, list)) else lines.append(
                    f"{prefix}{k} = {v}"
                )
        elif isinstance(value, list):
            if all(not isinstance(v, (dict, list)) for v in value):
                lines.append(f"{prefix[:-1]} = {value}")
            else:
                for idx, v in enumerate(value):
                    walk(f"{prefix}{idx}.", v) if isinstance(
                        v, (dict, list)
                    ) else lines.append(f"{prefix}{idx} = {v}")
        else:
            lines.append(f"{prefix[:-1]} = {value}")

    walk("", data)
    return lines


# -- entry point -------------------------------------------------------------------


def build_arg_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="ppvkit",
        description="Exact toolkit for parameterized linear differential equations",
    )
    top.add_argument(
        "--format",
        choices=["human", "json"],
        default=os.environ.get("PPVKIT_FORMAT", "human"),
        help="output format (env PPVKIT_FORMAT overrides the default)",
    )
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ore", help="operator ring arithmetic")
    p.add_argument("operation", choices=["mul", "div", "gcrd", "lclm", "annihilator"])
    p.add_argument("operands", nargs="+", help="operator or generator expressions")
    p.add_argument("--params", nargs="+", required=True)
    p.add_argument("--deriv", help="designated derivation (default: first parameter)")
    p.set_defaults(handler=_cmd_ore)

    p = sub.add_parser("group", help="rank-1 PPV group computation")
    p.add_argument("case", choices=["add", "mult"])
    p.add_argument("expr")
    p.add_argument("--params", nargs="+", required=True)
    p.add_argument("--var", default="x")
    p.add_argument("--closure", action="store_true", help="also print the Zariski closure")
    p.set_defaults(handler=_cmd_group)

    def add_bounds(p):
        p.add_argument("--pole-headroom", type=int, default=1, metavar="J")
        p.add_argument("--poly-degree", type=int, default=None, metavar="D")

    p = sub.add_parser("check-integrable", help="verify the integrability conditions")
    p.add_argument("system")
    p.set_defaults(handler=_cmd_check_integrable)

    p = sub.add_parser("solve-integrable", help="search for a rational completion")
    p.add_argument("system")
    add_bounds(p)
    p.set_defaults(handler=_cmd_solve_integrable)

    p = sub.add_parser("isomonodromy", help="completion search, isomonodromy vocabulary")
    p.add_argument("system")
    add_bounds(p)
    p.set_defaults(handler=_cmd_isomonodromy)

    p = sub.add_parser("classify-2x2", help="trichotomy for traceless 2x2 systems")
    p.add_argument("system")
    p.add_argument("--degree-cap", type=int, default=5)
    add_bounds(p)
    p.set_defaults(handler=_cmd_classify)

    def add_numeric(p):
        p.add_argument("--loop", default="center=0,radius=1,segments=16")
        p.add_argument(
            "--grid",
            action="append",
            required=True,
            help="name=start:stop:count (repeat for several parameters)",
        )
        p.add_argument("--tol", type=float, default=1e-9)
        p.add_argument("--eps", type=float, default=1e-6)

    p = sub.add_parser("monodromy", help="numeric monodromy scan over a parameter grid")
    p.add_argument("system")
    add_numeric(p)
    p.set_defaults(handler=_cmd_monodromy)

    p = sub.add_parser("cross-check", help="symbolic verdict vs numeric scan")
    p.add_argument("system")
    add_numeric(p)
    add_bounds(p)
    p.set_defaults(handler=_cmd_cross_check)

    p = sub.add_parser("table", help="subgroup/fixed-field table for the x^t example")
    p.add_argument("-n", type=int, default=1, help="torsion order for the first row")
    p.set_defaults(handler=_cmd_table)

    return top


def run(argv: list[str]) -> int:
    parser = build_arg_parser()
    args = parser.parse_args(argv)
    try:
        data = args.handler(args)
    except DOMAIN_ERRORS as exc:
        payload = {"error": {"type": type(exc).__name__, "message": str(exc)}}
        if hasattr(exc, "diagnostic"):
            payload["error"].update(exc.diagnostic())
        if args.format == "json":
            print(json.dumps(payload, indent=2))
        else:
            print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.format == "json":
        print(json.dumps(data, indent=2))
    else:
        for line in _human_lines(args.command, data):
            print(line)
    return 0


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
