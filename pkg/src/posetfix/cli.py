"""Command-line front end.

Exit codes: 0 ok, 1 usage/parse error, 2 hypothesis failure, 3 vacuous or
unverifiable hypotheses, 4 no convergence, 5 range-inclusion error at runtime.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from posetfix import engine, hypotheses, jsonfmt, oracle, problem_file
from posetfix.errors import EvaluationError, RangeInclusionError, UsageError
from posetfix.problem import get_scheme

EXIT_OK, EXIT_USAGE, EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_NO_CONVERGENCE, EXIT_RANGE = range(6)


def _emit(obj, out):
    out.write(jsonfmt.dumps(obj) + "\n")
    out.flush()


def _sampling(pf, args):
    s = pf.sampling
    changes = {}
    for attr, flag in (
        ("resolution", "grid"),
        ("max_tuples", "max_tuples"),
        ("max_pairs", "max_pairs"),
        ("max_bases", "max_bases"),
        ("seed", "sample_seed"),
    ):
        v = getattr(args, flag, None)
        if v is not None:
            changes[attr] = v
    if getattr(args, "exhaustive", False):
        changes["exhaustive"] = True
    return replace(s, **changes)


def _problem(pf, args):
    p = pf.problem
    if getattr(args, "scheme", None):
        p = p.with_(scheme=get_scheme(args.scheme, p.arity))
    return p


def cmd_check(args, out) -> int:
    pf = problem_file.load(args.file)
    p = _problem(pf, args)
    report = hypotheses.check_all(p, _sampling(pf, args))
    for rec in report.as_dicts():
        _emit(rec, out)
    code = report.exit_code()
    _emit({"summary": {"exit_code": code, "exhaustive": report.exhaustive, "sampling": report.sampling}}, out)
    return code


def cmd_solve(args, out) -> int:
    pf = problem_file.load(args.file)
    p = _problem(pf, args)
    if p.seed is None:
        raise UsageError("the problem file has no seed")
    tol = args.tol if args.tol is not None else pf.tolerances["residual"]
    dtol = args.delta_tol if args.delta_tol is not None else pf.tolerances["delta"]
    max_iter = args.max_iter if args.max_iter is not None else pf.max_iter
    trace_fh = open(args.trace, "w", encoding="utf-8") if args.trace else None
    try:
        on_step = (lambda rec: _emit(rec, trace_fh)) if trace_fh else None
        result = engine.solve(
            p, p.seed, residual_tol=tol, delta_tol=dtol, max_iter=max_iter, force=args.force,
            samples=_sampling(pf, args), allow_inconclusive=args.allow_inconclusive,
            on_step=on_step,
        )
    finally:
        if trace_fh:
            trace_fh.close()
    summary = result.summary()
    if result.report is not None:
        bad = result.report.failed + result.report.inconclusive
        summary["hypotheses"] = [r.as_dict() for r in bad]
    _emit(summary, out)
    if result.status == engine.CONVERGED:
        return EXIT_OK
    if result.status == engine.HYPOTHESES_UNMET:
        return EXIT_FAIL if result.report.failed else EXIT_INCONCLUSIVE
    return EXIT_NO_CONVERGENCE


def cmd_oracle(args, out) -> int:
    pf = problem_file.load(args.file)
    p = _problem(pf, args)
    points = oracle.enumerate_fixed_points(p)
    _emit({"scheme": p.scheme.name, "count": len(points), "fixed_points": points}, out)
    return EXIT_OK


def cmd_normalize(args, out) -> int:
    pf = problem_file.load(args.file)
    out.write(problem_file.normalize(pf) + "\n")
    return EXIT_OK


def _add_sampling(sp):
    sp.add_argument("--grid", type=int, help="grid resolution (default: space's, or $%s)" % hypotheses.GRID_ENV)
    sp.add_argument("--max-tuples", type=int)
    sp.add_argument("--max-pairs", type=int)
    sp.add_argument("--max-bases", type=int)
    sp.add_argument("--sample-seed", type=int)
    sp.add_argument("--exhaustive", action="store_true", help="enumerate every tuple and pair")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="posetfix",
        description="Coupled, tripled and quartet fixed points on partially ordered metric spaces.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("check", help="verify hypotheses")
    sp.add_argument("file")
    sp.add_argument("--scheme", choices=["alternating", "cyclic"])
    _add_sampling(sp)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("solve", help="run the iteration from the file's seed")
    sp.add_argument("file")
    sp.add_argument("--tol", type=float, help="residual tolerance")
    sp.add_argument("--delta-tol", type=float)
    sp.add_argument("--max-iter", type=int)
    sp.add_argument("--force", action="store_true", help="iterate even if hypotheses fail")
    sp.add_argument("--allow-inconclusive", action="store_true",
                    help="accept vacuous or unverifiable hypothesis verdicts")
    sp.add_argument("--trace", metavar="PATH", help="write one JSON line per step")
    sp.add_argument("--scheme", choices=["alternating", "cyclic"])
    _add_sampling(sp)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("oracle", help="enumerate fixed points of a finite problem")
    sp.add_argument("file")
    sp.add_argument("--scheme", choices=["alternating", "cyclic"])
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("normalize", help="print the problem file with defaults filled in")
    sp.add_argument("file")
    sp.set_defaults(func=cmd_normalize)
    return ap


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args, out)
    except RangeInclusionError as exc:
        err.write(f"posetfix: range error: {exc}\n")
        return EXIT_RANGE
    except (UsageError, EvaluationError, OSError) as exc:
        err.write(f"posetfix: error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
