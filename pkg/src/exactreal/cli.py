"""Command line: ``exactreal eval`` and ``exactreal analyze``.

Exit codes: 0 success, 1 syntax error, 2 domain error, 3 precision not
reached within the refinement cap, 4 cost budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from gmpy2 import mpq

from .engine import EvalConfig, evaluate
from .errors import CostLimitExceeded, DomainError, ExactRealError, ExprSyntaxError, PrecisionDivergence
from .expr import rationalize_sqrt_difference
from .parser import parse
from .perturbation import analyze
from .render import render_decimal

EXIT_OK, EXIT_SYNTAX, EXIT_DOMAIN, EXIT_DIVERGED, EXIT_BUDGET = 0, 1, 2, 3, 4


def _exit_code(err: ExactRealError) -> int:
    if isinstance(err, ExprSyntaxError):
        return EXIT_SYNTAX
    if isinstance(err, DomainError):
        return EXIT_DOMAIN
    if isinstance(err, CostLimitExceeded):
        return EXIT_BUDGET
    if isinstance(err, PrecisionDivergence):
        return EXIT_DIVERGED
    return EXIT_DOMAIN


def _rational_text(q: mpq) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def decimal_precision(p: int, digits: int) -> int:
    """Bits to request so ``digits`` decimals are backed by the engine bound."""
    return max(p, (10 ** digits).bit_length() + 4)


def cmd_eval(args: argparse.Namespace, out=None) -> int:
    out = out or sys.stdout
    e = parse(args.expr)
    if args.rationalize:
        e = rationalize_sqrt_difference(e)
    p = args.precision
    if args.decimal is not None:
        p = decimal_precision(p, args.decimal)
    cfg = EvalConfig(max_refine=args.max_refine, trace_enabled=args.trace or args.json,
                     max_terms=args.max_terms)
    res = evaluate(e, p, cfg)
    if args.json:
        payload = {"value": {"num": str(res.value.numerator), "den": str(res.value.denominator)},
                   "precision_bits": p}
        if args.trace and res.trace is not None:
            payload["trace"] = [r.as_dict() for r in res.trace.walk()]
        json.dump(payload, out)
        out.write("\n")
        return EXIT_OK
    if args.decimal is not None:
        print(render_decimal(res.value, args.decimal), file=out)
    else:
        print(_rational_text(res.value), file=out)
    if args.trace and res.trace is not None:
        for r in res.trace.walk():
            print(f"{r.node:12s} {r.op:7s} req={r.requested_p} got={r.delivered_p} "
                  f"refine={r.refinements} terms={r.terms} bits={r.coeff_bits}", file=out)
    return EXIT_OK


def cmd_analyze(args: argparse.Namespace, out=None) -> int:
    out = out or sys.stdout
    e = parse(args.expr)
    wrt = None if args.wrt is None else mpq(args.wrt)
    report = analyze(e, args.precision, mpq(args.threshold), wrt)
    json.dump(report.as_dict(), out, indent=2)
    out.write("\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="exactreal",
                                 description="Evaluate real expressions to a guaranteed relative precision.")
    sub = ap.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("eval", help="approximate an expression")
    ev.add_argument("expr")
    ev.add_argument("-p", "--precision", type=int, default=53,
                    help="relative error below 2**-p (default 53)")
    ev.add_argument("--decimal", type=int, metavar="D",
                    help="print D significant decimal digits")
    ev.add_argument("--json", action="store_true", help="print a JSON object")
    ev.add_argument("--trace", action="store_true", help="include the per-node trace")
    ev.add_argument("--max-refine", type=int, default=256)
    ev.add_argument("--max-terms", type=int, default=EvalConfig.max_terms,
                    help="largest series or Riemann sum attempted")
    ev.add_argument("--rationalize", action="store_true",
                    help="rewrite sqrt(a) - sqrt(b) as (a - b)/(sqrt(a) + sqrt(b)) first")
    ev.set_defaults(run=cmd_eval)

    an = sub.add_parser("analyze", help="condition numbers per node (JSON)")
    an.add_argument("expr")
    an.add_argument("-p", "--precision", type=int, default=32,
                    help="working precision of the analysis (default 32)")
    an.add_argument("--threshold", default="4",
                    help="flag looping nodes whose condition exceeds this (default 4)")
    an.add_argument("--wrt", help="treat constants equal to this value as the variable x")
    an.set_defaults(run=cmd_analyze)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "eval" and args.decimal is not None and args.decimal < 1:
        print("error: --decimal needs at least 1 digit", file=sys.stderr)
        return EXIT_SYNTAX
    try:
        return args.run(args)
    except ExactRealError as err:
        print(f"error: {err.describe(args.expr)}", file=sys.stderr)
        return _exit_code(err)
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_SYNTAX
