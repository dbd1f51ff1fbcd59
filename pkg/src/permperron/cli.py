"""Command-line interface.

Exit status: 0 success, 1 input error, 2 solver failure,
3 certificate or membership failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings

from . import matrixio
from .analysis import bound_report, detect_equality_case
from .core import first_omega_violation
from .exceptions import (DimensionMismatch, DimensionTooLarge, InvariantViolation, LoopLimitWarning,
                         MatrixFormatError, NoConvergence, PreconditionFailed, ReducibleWarning,
                         ResidualTooLarge)
from .experiments import Distribution, ExperimentConfig, run_convergence_experiment, write_csv
from .optimize import DEFAULT_MAX_LOOPS, alignment_holds, maximize_rho, minimize_rho
from .oracle import DEFAULT_LIMIT_N, oracle_extremes
from .spectral import DEFAULT_MAX_ITER, DEFAULT_TOL, is_irreducible, perron

EXIT_OK, EXIT_INPUT, EXIT_SOLVER, EXIT_CERT = 0, 1, 2, 3


class _Fail(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _settings(args) -> dict:
    return {"tol": args.tol, "max_iter": args.max_iter, "max_loops": args.max_loops, "limit_n": args.limit_n}


def _emit_json(obj, out) -> None:
    out.write(json.dumps(obj) + "\n")


def _matrix_rows(A) -> list:
    return [[float(v) for v in row] for row in A]


def _one_based(p) -> list:
    return [int(i) + 1 for i in p]


def cmd_maximize(args, out) -> int:
    A = matrixio.load(args.input)
    solve = maximize_rho if args.command == "maximize" else minimize_rho
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", LoopLimitWarning)
        res = solve(A, args.tol, args.max_iter, args.max_loops, init=args.init, unsafe_accept=args.unsafe_accept)
    if args.output:
        matrixio.dump(res.witness, args.output)
    if args.trace:
        with open(args.trace, "w") as fp:
            fp.write(res.trace.to_json() + "\n")
    if args.format == "json":
        _emit_json({
            "command": args.command,
            "rho": res.rho,
            "loops": res.loop_count,
            "certificate": res.certificate,
            "loop_limit_exceeded": res.loop_limit_exceeded,
            "witness": _matrix_rows(res.witness),
            "permutation": _one_based(res.permutation),
            "trace": json.loads(res.trace.to_json()),
            "settings": _settings(args),
        }, out)
    else:
        print(f"rho: {res.rho:.17g}", file=out)
        print(f"loops: {res.loop_count}", file=out)
        print(f"certificate: {str(res.certificate).lower()}", file=out)
        print("witness:", file=out)
        print(matrixio.pretty(res.witness), file=out)
    if caught:
        raise _Fail(EXIT_SOLVER, str(caught[0].message))
    return EXIT_OK if res.certificate else EXIT_CERT


def cmd_oracle(args, out) -> int:
    A = matrixio.load(args.input)
    rep = oracle_extremes(A, args.tol, args.max_iter, args.limit_n)
    if args.format == "json":
        _emit_json({
            "min_rho": rep.min_rho, "argmin": _matrix_rows(rep.argmin),
            "max_rho": rep.max_rho, "argmax": _matrix_rows(rep.argmax),
            "count": rep.count, "mean_row_sum": rep.mean_row_sum,
            "settings": _settings(args),
        }, out)
    else:
        print(f"count: {rep.count}", file=out)
        print(f"min: {rep.min_rho:.17g}", file=out)
        print(f"mean: {rep.mean_row_sum:.17g}", file=out)
        print(f"max: {rep.max_rho:.17g}", file=out)
        print("argmin:", file=out)
        print(matrixio.pretty(rep.argmin), file=out)
        print("argmax:", file=out)
        print(matrixio.pretty(rep.argmax), file=out)
    return EXIT_OK


def cmd_bound(args, out) -> int:
    A = matrixio.load(args.input)
    method = args.method
    if method == "auto":
        method = "oracle" if A.shape[0] <= args.limit_n else "algorithm"
    rep = bound_report(A, method, args.tol, args.max_iter, args.max_loops, args.limit_n)
    if args.format == "json":
        obj = json.loads(rep.to_json())
        obj["settings"] = _settings(args)
        _emit_json(obj, out)
    else:
        print(rep.summary(), file=out)
    return EXIT_OK


def cmd_equality(args, out) -> int:
    A = matrixio.load(args.input)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        case = detect_equality_case(A, args.equality_tol)
    if args.format == "json":
        _emit_json({"equality_case": case, "settings": _settings(args)}, out)
    else:
        print(case, file=out)
    return EXIT_OK


def cmd_certify(args, out) -> int:
    B = matrixio.load(args.input)
    A = matrixio.load(args.against)
    if B.shape != A.shape:
        raise _Fail(EXIT_INPUT, f"dimension mismatch: candidate is {B.shape[0]}x{B.shape[0]}, "
                                f"original is {A.shape[0]}x{A.shape[0]}")
    bad_row = first_omega_violation(B, A)
    if bad_row is not None:
        msg = f"candidate is not in Omega(original): row {bad_row + 1} holds a different multiset of entries"
        if args.format == "json":
            _emit_json({"in_omega": False, "offending_row": bad_row + 1, "certificate": False,
                        "settings": _settings(args)}, out)
        else:
            print("in_omega: false", file=out)
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_CERT
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ReducibleWarning)
        pair = perron(B, args.tol, args.max_iter)
    irreducible = is_irreducible(B)
    sense = "max" if args.direction == "max" else "min"
    cert = alignment_holds(B, pair.x, sense)
    if args.format == "json":
        _emit_json({"in_omega": True, "direction": args.direction, "rho": pair.rho,
                    "eigenvector": [float(v) for v in pair.x], "irreducible": irreducible,
                    "certificate": cert, "settings": _settings(args)}, out)
    else:
        print("in_omega: true", file=out)
        print(f"rho: {pair.rho:.17g}", file=out)
        print(f"irreducible: {str(irreducible).lower()}", file=out)
        print(f"certificate ({args.direction}): {str(cert).lower()}", file=out)
    if not irreducible:
        print("warning: candidate is reducible; the alignment certificate is only necessary-and-sufficient "
              "for irreducible matrices", file=sys.stderr)
    return EXIT_OK if cert else EXIT_CERT


def _parse_dims(text: str) -> tuple[int, ...]:
    """``"5,25,50"`` or ``"5:200:5"`` (inclusive stop)."""
    try:
        if ":" in text:
            lo, hi, step = (int(t) for t in text.split(":"))
            return tuple(range(lo, hi + 1, step))
        return tuple(int(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad dims {text!r}; use 5,25,50 or 5:200:5") from None


def _parse_dist(text: str) -> Distribution:
    try:
        return Distribution.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def cmd_experiment(args, out) -> int:
    cfg = ExperimentConfig(
        dims=args.dims, instances_per_dim=args.instances, seed=args.seed,
        distribution=args.dist, direction=args.direction,
        tol=args.tol, max_iter=args.max_iter, max_loops=args.max_loops,
    )
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        stats = run_convergence_experiment(cfg, oracle_check=args.oracle_check, workers=args.workers)
    if args.output:
        with open(args.output, "w", newline="") as fp:
            write_csv(stats, fp)
    else:
        write_csv(stats, out)
    log = sys.stderr
    for s in stats.per_dim:
        print(f"dim {s.dim:4d}: mean loops {s.mean_loops:.3f}, max {s.max_loops_observed}, "
              f"mean runtime {s.mean_runtime:.4f}s over {s.instance_count} instances", file=log)
    print(f"global max loops: {stats.max_loops_observed} (expected <= {stats.expected_max_loops})", file=log)
    if stats.exceeds_expectation:
        print("finding: loop count exceeded the expected bound", file=log)
    if stats.errors:
        print(f"{len(stats.errors)} instance(s) failed", file=log)
        return EXIT_SOLVER
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="permperron",
        description="Extreme Perron roots over row-wise entry permutations of a nonnegative matrix.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=DEFAULT_TOL, help="relative eigensolver tolerance")
    common.add_argument("--max-iter", type=int, default=DEFAULT_MAX_ITER, help="power iteration cap")
    common.add_argument("--max-loops", type=int, default=DEFAULT_MAX_LOOPS, help="alignment loop cap")
    common.add_argument("--limit-n", type=int, default=DEFAULT_LIMIT_N, help="largest n for exhaustive enumeration")
    common.add_argument("--format", choices=("text", "json"), default="text")

    fmt = argparse.ArgumentDefaultsHelpFormatter

    def add(name, help_):
        return sub.add_parser(name, parents=[common], help=help_, formatter_class=fmt)

    p = add("bound", "mean row sum against min/max Perron roots")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("--method", choices=("auto", "oracle", "algorithm"), default="auto")
    p.set_defaults(func=cmd_bound)

    for name in ("maximize", "minimize"):
        p = add(name, f"{name} the Perron root over Omega(A)")
        p.add_argument("-i", "--input", required=True)
        p.add_argument("-o", "--output", help="write the witness matrix here (.json for JSON)")
        p.add_argument("--trace", help="write the per-loop JSON trace here")
        p.add_argument("--init", choices=("row_norm", "row_sum", "identity"), default="row_norm",
                       help="initial row order heuristic")
        p.add_argument("--unsafe-accept", action="store_true",
                       help="skip the positive / fully indecomposable precondition")
        p.set_defaults(func=cmd_maximize)

    p = add("oracle", "exhaustive min/max over Omega(A) (small n)")
    p.add_argument("-i", "--input", required=True)
    p.set_defaults(func=cmd_oracle)

    p = add("certify", "check that a candidate is in Omega(original) and optimally aligned")
    p.add_argument("-i", "--input", required=True, help="candidate matrix")
    p.add_argument("--against", required=True, help="original matrix")
    p.add_argument("--direction", choices=("max", "min"), default="max")
    p.set_defaults(func=cmd_certify)

    p = add("equality", "report the equality case (flat_eigenvector, constant_rows or none)")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("--equality-tol", type=float, default=1e-10)
    p.set_defaults(func=cmd_equality)

    p = add("experiment", "loop-count study over random positive matrices, CSV output")
    p.add_argument("--dims", type=_parse_dims, default=tuple(range(5, 201, 5)), help="e.g. 5,25,50 or 5:200:5")
    p.add_argument("--instances", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dist", type=_parse_dist, default=Distribution(), help="KIND:LO:HI")
    p.add_argument("--direction", choices=("max", "min", "both"), default="both")
    p.add_argument("--oracle-check", action="store_true")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("-o", "--output", help="CSV path (default: stdout)")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None, out=None) -> int:
    out = out if out is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse uses 2 for usage errors; here 2 means solver failure
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args, out)
    except _Fail as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (MatrixFormatError, DimensionMismatch, DimensionTooLarge, PreconditionFailed, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NoConvergence, InvariantViolation, ResidualTooLarge) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
